#pragma once

#include <functional>

#include "openqx/types.hpp"

namespace openqx {

struct QuadratureOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-9;
  int max_subdivisions = 4000;
};

// Adaptive Gauss-Kronrod (G7/K15) integration of a matrix-valued integrand
// over [a, b]. Error is measured entrywise in max-abs norm. Throws
// QuadratureError when the subdivision budget is exhausted before the
// tolerance is met.
ComplexMatrix integrate_matrix(const std::function<ComplexMatrix(double)>& f,
                               double a, double b,
                               const QuadratureOptions& opts = {});

Complex integrate_scalar(const std::function<Complex(double)>& f, double a,
                         double b, const QuadratureOptions& opts = {});

// Composite Simpson over uniformly sampled values (trapezoid on the final
// interval when the sample count is even). Used for tabulated spectra.
ComplexMatrix integrate_sampled(const std::vector<ComplexMatrix>& values,
                                double step);

}  // namespace openqx
