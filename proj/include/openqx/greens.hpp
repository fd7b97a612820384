#pragma once

#include <vector>

#include "openqx/model.hpp"
#include "openqx/quadrature.hpp"
#include "openqx/spectral.hpp"
#include "openqx/types.hpp"

namespace openqx {

struct TimeGrid {
  double t_max = 1.0;
  int n_steps = 1;

  double step() const { return t_max / n_steps; }
  int size() const { return n_steps + 1; }
  double time(int k) const { return t_max * k / n_steps; }
};

TimeGrid make_time_grid(double t_max, int n_steps);

// u(t) and v(t,t) sampled on a shared grid.
struct GreenPair {
  TimeGrid grid;
  std::vector<ComplexMatrix> u;
  std::vector<ComplexMatrix> v;
};

// g(s) = int de/2pi J(e) e^{-i e s}. Discrete baths sum exactly; the flat
// band uses the closed-form finite-band kernel.
ComplexMatrix memory_kernel(const SpectralDensity& jd, double s,
                            const QuadratureOptions& opts = {});

// gtilde(t1,t2) = int de/2pi f(e) J(e) e^{-i e (t1-t2)}.
ComplexMatrix noise_kernel(const SpectralDensity& jd, const BathConfig& bath,
                           Statistics statistics, double t1, double t2,
                           const QuadratureOptions& opts = {});

// Dyson/Volterra solve of du/dt + i eps_S u + int_0^t g(t-s) u(s) ds = 0 with
// u(0) = I; composite trapezoid memory integral with one predictor-corrector
// pass per step. The flat band collapses to a local damping term; discrete
// baths use per-mode running sums so the memory cost stays linear.
std::vector<ComplexMatrix> solve_u(const SystemModel& model,
                                   const SpectralDensity& jd,
                                   const TimeGrid& grid, int workers = 0);

// u(t) = sum_l Z_l e^{-i e_l t} + int de/2pi D(e) e^{-i e t}; the independent
// route to u used to cross-check the Volterra solve.
std::vector<ComplexMatrix> reconstruct_u_spectral(
    const std::vector<LocalizedMode>& modes, const SpectrumTable& table,
    const TimeGrid& grid, int workers = 0);

// v(t,t) = int_0^t int_0^t u(t-t1) gtilde(t1,t2) u^dag(t-t2) dt1 dt2 by
// double trapezoid on the grid lattice, evaluated at the requested indices.
std::vector<ComplexMatrix> compute_v_at(const SystemModel& model,
                                        const SpectralDensity& jd,
                                        const BathConfig& bath,
                                        const std::vector<ComplexMatrix>& u,
                                        const TimeGrid& grid,
                                        const std::vector<int>& indices,
                                        int workers = 0);

std::vector<ComplexMatrix> compute_v(const SystemModel& model,
                                     const SpectralDensity& jd,
                                     const BathConfig& bath,
                                     const std::vector<ComplexMatrix>& u,
                                     const TimeGrid& grid, int workers = 0);

GreenPair green_pair(const SystemModel& model, const SpectralDensity& jd,
                     const BathConfig& bath, const TimeGrid& grid,
                     int workers = 0);

}  // namespace openqx
