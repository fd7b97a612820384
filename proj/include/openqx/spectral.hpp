#pragma once

#include <vector>

#include "openqx/model.hpp"
#include "openqx/quadrature.hpp"
#include "openqx/types.hpp"

namespace openqx {

// Sigma(z) = int de/2pi J(e)/(z - e). Discrete baths are summed exactly; the
// flat band has a closed-form log; the continuous families are integrated
// adaptively with the singular part split off near the real axis.
ComplexMatrix self_energy(const SpectralDensity& jd, Complex z,
                          const QuadratureOptions& opts = {});

// U(z) = (z I - eps_S - Sigma(z))^{-1}, with the defining residual checked.
ComplexMatrix resolvent(const SystemModel& model, const SpectralDensity& jd,
                        Complex z, const QuadratureOptions& opts = {});

// Real pole of U(z) outside the continuum with its residue matrix.
struct LocalizedMode {
  double energy = 0.0;
  ComplexMatrix residue;
};

struct RootSearchOptions {
  double scan_pad = 10.0;   // in units of the bandwidth
  int scan_points = 2000;   // total over both scan windows
  double cluster_tol = 1e-8;
  int contour_points = 64;
};

std::vector<LocalizedMode> find_localized_modes(
    const SystemModel& model, const SpectralDensity& jd,
    const RootSearchOptions& opts = {});

// D(e) = U(e + i eta) J(e) U(e - i eta) sampled on an energy grid,
// PSD-projected. min_eigenvalue records the most negative eigenvalue seen
// before clipping.
struct SpectrumTable {
  RealVector energies;
  std::vector<ComplexMatrix> density;
  double min_eigenvalue = 0.0;

  double step() const;
};

SpectrumTable spectrum(const SystemModel& model, const SpectralDensity& jd,
                       const BathConfig& bath, const RealVector& grid,
                       int workers = 0);

RealVector uniform_grid(double lo, double hi, int points);

// Uniform interior plus geometric refinement into both endpoints; resolves
// the slow edge layers of hard-cutoff densities.
RealVector graded_grid(double lo, double hi, int interior_points,
                       double edge_fraction = 0.05, int points_per_decade = 64,
                       double min_scale = 1e-12);

bool is_uniform(const RealVector& energies);

// Simpson on uniform grids, trapezoid on graded ones.
ComplexMatrix integrate_table(const std::vector<ComplexMatrix>& values,
                              const RealVector& energies);

// int de/2pi D(e) over the table.
ComplexMatrix spectral_weight(const SpectrumTable& table);

// sum_l Z_l + int de/2pi D(e); equals the identity by u(0) = I.
ComplexMatrix sum_rule_total(const std::vector<LocalizedMode>& modes,
                             const SpectrumTable& table);

}  // namespace openqx
