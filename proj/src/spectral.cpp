#include "openqx/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "openqx/parallel.hpp"

namespace openqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ComplexMatrix discrete_self_energy(const SpectralDensity& jd, Complex z) {
  const int d = jd.dimension();
  ComplexMatrix sigma = ComplexMatrix::Zero(d, d);
  for (int k = 0; k < jd.mode_energies.size(); ++k) {
    const ComplexVector v = jd.mode_couplings.col(k);
    sigma += (v * v.adjoint()) / (z - jd.mode_energies(k));
  }
  return sigma;
}

// int_a^b de / (z - e) = log((z - a)/(z - b)), continuous off the real band.
Complex band_log(Complex z, double a, double b) {
  return std::log((z - a) / (z - b));
}

}  // namespace

ComplexMatrix self_energy(const SpectralDensity& jd, Complex z,
                          const QuadratureOptions& opts) {
  if (jd.kind == SpectralKind::DiscreteModes) {
    return discrete_self_energy(jd, z);
  }
  const double a = jd.support_min;
  const double b = jd.support_max;
  const bool inside = z.real() > a && z.real() < b;
  if (inside && z.imag() == 0.0) {
    throw ValidationError("self_energy: z on the continuum requires Im z != 0");
  }
  if (jd.kind == SpectralKind::WideBand) {
    return jd.wideband_amplitude * (band_log(z, a, b) / kTwoPi);
  }
  if (inside && std::abs(z.imag()) < 0.1 * jd.bandwidth()) {
    // Subtract the value at Re z so the integrand stays smooth across the
    // near-singular point; the removed part integrates to the band log.
    const ComplexMatrix j_at = evaluate_spectral_density(jd, z.real());
    ComplexMatrix smooth = integrate_matrix(
        [&](double e) -> ComplexMatrix {
          return (evaluate_spectral_density(jd, e) - j_at) / (z - e);
        },
        a, b, opts);
    return (smooth + j_at * band_log(z, a, b)) / kTwoPi;
  }
  return integrate_matrix(
             [&](double e) -> ComplexMatrix {
               return evaluate_spectral_density(jd, e) / (z - e);
             },
             a, b, opts) /
         kTwoPi;
}

ComplexMatrix resolvent(const SystemModel& model, const SpectralDensity& jd,
                        Complex z, const QuadratureOptions& opts) {
  const int d = model.dimension();
  const ComplexMatrix denom = z * ComplexMatrix::Identity(d, d) - model.eps_s -
                              self_energy(jd, z, opts);
  Eigen::PartialPivLU<ComplexMatrix> lu(denom);
  ComplexMatrix u = lu.solve(ComplexMatrix::Identity(d, d));
  const double residual = max_abs(denom * u - ComplexMatrix::Identity(d, d));
  if (!u.allFinite() || residual > 1e-10 * (1.0 + max_abs(denom) * max_abs(u))) {
    throw SingularMatrixError(
        "resolvent: singular at z = (" + std::to_string(z.real()) + ", " +
        std::to_string(z.imag()) + "); near a localized-mode energy");
  }
  return u;
}

namespace {

// Sorted eigenvalue branches of eps_S + Sigma(e) for real e off the support.
RealVector dressed_levels(const SystemModel& model, const SpectralDensity& jd,
                          double e) {
  const ComplexMatrix h = hermitize(model.eps_s + self_energy(jd, e));
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  return es.eigenvalues();
}

struct ScanWindow {
  double lo, hi;
};

double bisect_branch(const SystemModel& model, const SpectralDensity& jd,
                     int branch, double lo, double hi, double f_lo) {
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double f_mid = dressed_levels(model, jd, mid)(branch) - mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<LocalizedMode> find_localized_modes(const SystemModel& model,
                                                const SpectralDensity& jd,
                                                const RootSearchOptions& opts) {
  const int d = model.dimension();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eps_es(model.eps_s);
  const double eig_lo = eps_es.eigenvalues().minCoeff();
  const double eig_hi = eps_es.eigenvalues().maxCoeff();

  const bool empty_support =
      jd.has_modes() && jd.mode_energies.size() == 0;
  const double scale =
      std::max({jd.bandwidth(), eig_hi - eig_lo, 1.0});
  const double pad = opts.scan_pad * scale;

  std::vector<ScanWindow> windows;
  if (empty_support) {
    windows.push_back({eig_lo - pad, eig_hi + pad});
  } else {
    const double margin = 1e-9 * scale;
    windows.push_back({std::min(jd.support_min, eig_lo) - pad,
                       jd.support_min - margin});
    windows.push_back({jd.support_max + margin,
                       std::max(jd.support_max, eig_hi) + pad});
  }

  // Bracket sign changes of each eigenvalue branch of eps_S + Sigma(e) - e.
  std::vector<double> roots;
  const int points_per_window =
      std::max(16, opts.scan_points / static_cast<int>(windows.size()));
  for (const auto& win : windows) {
    if (!(win.hi > win.lo)) continue;
    const double h = (win.hi - win.lo) / points_per_window;
    RealVector prev = dressed_levels(model, jd, win.lo);
    double prev_e = win.lo;
    for (int k = 1; k <= points_per_window; ++k) {
      const double e = win.lo + k * h;
      RealVector cur = dressed_levels(model, jd, e);
      for (int branch = 0; branch < d; ++branch) {
        const double f_prev = prev(branch) - prev_e;
        const double f_cur = cur(branch) - e;
        if (f_prev == 0.0) {
          roots.push_back(prev_e);
        } else if ((f_prev > 0.0) != (f_cur > 0.0)) {
          roots.push_back(bisect_branch(model, jd, branch, prev_e, e, f_prev));
        }
      }
      prev = cur;
      prev_e = e;
    }
  }
  std::sort(roots.begin(), roots.end());

  // Merge near-degenerate roots; one joint residue carries the multiplicity.
  std::vector<double> centers;
  const double cluster = opts.cluster_tol * scale;
  for (double r : roots) {
    if (centers.empty() || r - centers.back() > cluster) {
      centers.push_back(r);
    }
  }

  std::vector<LocalizedMode> modes;
  for (size_t i = 0; i < centers.size(); ++i) {
    const double c = centers[i];
    double radius = 0.25 * scale;
    if (!empty_support) {
      radius = std::min(radius, 0.5 * std::abs(c - jd.support_min));
      radius = std::min(radius, 0.5 * std::abs(c - jd.support_max));
    }
    if (i > 0) radius = std::min(radius, 0.5 * (c - centers[i - 1]));
    if (i + 1 < centers.size()) {
      radius = std::min(radius, 0.5 * (centers[i + 1] - c));
    }
    if (jd.has_modes()) {
      for (int k = 0; k < jd.mode_energies.size(); ++k) {
        radius = std::min(radius, 0.5 * std::abs(c - jd.mode_energies(k)));
      }
    }
    if (!(radius > 0.0)) {
      throw RootSearchError("find_localized_modes: contour radius collapsed at e = " +
                            std::to_string(c));
    }
    if (!empty_support && c > jd.support_min - radius &&
        c < jd.support_max + radius) {
      throw RootSearchError(
          "find_localized_modes: contour circle intersects the support");
    }

    // Z_l = (1/2pi i) oint U(z) dz on a circle; the trapezoid rule is
    // spectrally accurate for periodic integrands.
    ComplexMatrix z_l = ComplexMatrix::Zero(d, d);
    for (int m = 0; m < opts.contour_points; ++m) {
      const double theta = kTwoPi * m / opts.contour_points;
      const Complex phase(std::cos(theta), std::sin(theta));
      z_l += resolvent(model, jd, c + radius * phase) * phase;
    }
    z_l *= radius / opts.contour_points;
    modes.push_back(LocalizedMode{c, hermitize(z_l)});
  }
  return modes;
}

double SpectrumTable::step() const {
  return energies.size() > 1 ? energies(1) - energies(0) : 0.0;
}

SpectrumTable spectrum(const SystemModel& model, const SpectralDensity& jd,
                       const BathConfig& bath, const RealVector& grid,
                       int workers) {
  if (jd.kind == SpectralKind::DiscreteModes) {
    throw ValidationError("spectrum: discrete-mode bath has no continuum");
  }
  const int d = model.dimension();
  SpectrumTable table;
  table.energies = grid;
  table.density.assign(grid.size(), ComplexMatrix::Zero(d, d));
  std::vector<double> min_eig(grid.size(), 0.0);
  const double eta = bath.regularization_eta;

  parallel_for(
      static_cast<int>(grid.size()),
      [&](int k) {
        const double e = grid(k);
        if (e < jd.support_min || e > jd.support_max) return;
        const ComplexMatrix u_plus = resolvent(model, jd, Complex(e, eta));
        ComplexMatrix dens =
            hermitize(u_plus * evaluate_spectral_density(jd, e) * u_plus.adjoint());
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(dens);
        RealVector vals = es.eigenvalues();
        min_eig[k] = vals.minCoeff();
        for (int i = 0; i < vals.size(); ++i) vals(i) = std::max(vals(i), 0.0);
        table.density[k] = es.eigenvectors() *
                           vals.cast<Complex>().asDiagonal() *
                           es.eigenvectors().adjoint();
      },
      workers);
  table.min_eigenvalue =
      grid.size() ? *std::min_element(min_eig.begin(), min_eig.end()) : 0.0;
  return table;
}

RealVector uniform_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw ValidationError("uniform_grid: bad range");
  RealVector g(points);
  for (int k = 0; k < points; ++k) {
    g(k) = lo + (hi - lo) * k / (points - 1);
  }
  return g;
}

RealVector graded_grid(double lo, double hi, int interior_points,
                       double edge_fraction, int points_per_decade,
                       double min_scale) {
  if (!(hi > lo) || interior_points < 2) {
    throw ValidationError("graded_grid: bad range");
  }
  const double span = hi - lo;
  const double edge = edge_fraction * span;
  const int decades = static_cast<int>(std::ceil(-std::log10(min_scale)));
  std::vector<double> xs;
  xs.push_back(lo);
  for (int k = decades * points_per_decade; k >= points_per_decade; --k) {
    xs.push_back(lo + edge * std::pow(10.0, -double(k) / points_per_decade));
  }
  const double inner_lo = lo + 0.1 * edge;
  const double inner_hi = hi - 0.1 * edge;
  for (int i = 0; i <= interior_points; ++i) {
    xs.push_back(inner_lo + (inner_hi - inner_lo) * i / interior_points);
  }
  for (int k = points_per_decade; k <= decades * points_per_decade; ++k) {
    xs.push_back(hi - edge * std::pow(10.0, -double(k) / points_per_decade));
  }
  xs.push_back(hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  RealVector g(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) g(i) = xs[i];
  return g;
}

bool is_uniform(const RealVector& energies) {
  if (energies.size() < 3) return true;
  const double h = energies(1) - energies(0);
  for (int k = 1; k + 1 < energies.size(); ++k) {
    if (std::abs(energies(k + 1) - energies(k) - h) > 1e-9 * std::abs(h)) {
      return false;
    }
  }
  return true;
}

ComplexMatrix integrate_table(const std::vector<ComplexMatrix>& values,
                              const RealVector& energies) {
  if (is_uniform(energies)) {
    return integrate_sampled(values, energies(1) - energies(0));
  }
  ComplexMatrix acc = ComplexMatrix::Zero(values[0].rows(), values[0].cols());
  for (int k = 0; k + 1 < energies.size(); ++k) {
    acc += 0.5 * (energies(k + 1) - energies(k)) * (values[k] + values[k + 1]);
  }
  return acc;
}

ComplexMatrix spectral_weight(const SpectrumTable& table) {
  return integrate_table(table.density, table.energies) / kTwoPi;
}

ComplexMatrix sum_rule_total(const std::vector<LocalizedMode>& modes,
                             const SpectrumTable& table) {
  ComplexMatrix total = spectral_weight(table);
  for (const auto& mode : modes) total += mode.residue;
  return total;
}

}  // namespace openqx
