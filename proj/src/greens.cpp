#include "openqx/greens.hpp"

#include <cmath>
#include <numbers>

#include "openqx/parallel.hpp"

namespace openqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex cis(double phase) { return Complex(std::cos(phase), std::sin(phase)); }

// int_a^b e^{-i e s} de, stable at s -> 0.
Complex band_phase_integral(double a, double b, double s) {
  if (std::abs(s) * (b - a) < 1e-8) {
    return Complex(b - a, -0.5 * s * (b * b - a * a));
  }
  return (cis(-a * s) - cis(-b * s)) / Complex(0.0, s);
}

}  // namespace

TimeGrid make_time_grid(double t_max, int n_steps) {
  if (!(t_max > 0.0) || n_steps < 1) {
    throw ValidationError("TimeGrid: t_max > 0 and n_steps >= 1 required");
  }
  return TimeGrid{t_max, n_steps};
}

ComplexMatrix memory_kernel(const SpectralDensity& jd, double s,
                            const QuadratureOptions& opts) {
  const int d = jd.dimension();
  switch (jd.kind) {
    case SpectralKind::DiscreteModes: {
      ComplexMatrix g = ComplexMatrix::Zero(d, d);
      for (int k = 0; k < jd.mode_energies.size(); ++k) {
        const ComplexVector v = jd.mode_couplings.col(k);
        g += (v * v.adjoint()) * cis(-jd.mode_energies(k) * s);
      }
      return g;
    }
    case SpectralKind::WideBand:
      return jd.wideband_amplitude *
             (band_phase_integral(jd.support_min, jd.support_max, s) / kTwoPi);
    default:
      return integrate_matrix(
                 [&](double e) -> ComplexMatrix {
                   return evaluate_spectral_density(jd, e) * cis(-e * s);
                 },
                 jd.support_min, jd.support_max, opts) /
             kTwoPi;
  }
}

ComplexMatrix noise_kernel(const SpectralDensity& jd, const BathConfig& bath,
                           Statistics statistics, double t1, double t2,
                           const QuadratureOptions& opts) {
  const int d = jd.dimension();
  const double s = t1 - t2;
  if (jd.kind == SpectralKind::DiscreteModes) {
    ComplexMatrix g = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < jd.mode_energies.size(); ++k) {
      const ComplexVector v = jd.mode_couplings.col(k);
      g += occupation(bath, statistics, jd.mode_energies(k)) *
           (v * v.adjoint()) * cis(-jd.mode_energies(k) * s);
    }
    return g;
  }
  double lo = jd.support_min;
  double hi = jd.support_max;
  if (std::isinf(bath.beta)) {
    // Zero-temperature distribution is a step: empty integrand above mu for
    // fermions, everywhere for bosons.
    if (statistics == Statistics::Boson) return ComplexMatrix::Zero(d, d);
    hi = std::min(hi, bath.mu);
    if (hi <= lo) return ComplexMatrix::Zero(d, d);
  }
  return integrate_matrix(
             [&](double e) -> ComplexMatrix {
               return occupation(bath, statistics, e) *
                      evaluate_spectral_density(jd, e) * cis(-e * s);
             },
             lo, hi, opts) /
         kTwoPi;
}

std::vector<ComplexMatrix> solve_u(const SystemModel& model,
                                   const SpectralDensity& jd,
                                   const TimeGrid& grid, int workers) {
  const int d = model.dimension();
  const int n = grid.n_steps;
  const double h = grid.step();

  const bool discrete = jd.kind == SpectralKind::DiscreteModes;
  const bool wideband = jd.kind == SpectralKind::WideBand;
  const int n_modes = discrete ? static_cast<int>(jd.mode_energies.size()) : 0;

  std::vector<ComplexMatrix> kernel;
  if (!discrete && !wideband) {
    kernel.assign(n + 1, ComplexMatrix());
    parallel_for(
        n + 1, [&](int m) { kernel[m] = memory_kernel(jd, m * h); }, workers);
  }
  ComplexMatrix local_term;
  if (wideband) local_term = 0.5 * jd.wideband_amplitude;

  std::vector<ComplexMatrix> u(n + 1);
  u[0] = ComplexMatrix::Identity(d, d);

  // Discrete baths keep the memory integral linear in n: per mode a running
  // row sum r_k(j) = sum_{m<=j} e^{i e_k m h} V_k^dag u_m.
  std::vector<Eigen::RowVectorXcd> mode_rows(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    mode_rows[k] = jd.mode_couplings.col(k).adjoint() * u[0];
  }

  const ComplexMatrix i_eps = kImag * model.eps_s;

  // Trapezoid memory integral at tau_j. The endpoint sample enters with
  // weight 1/2; `endpoint_in_rows` says whether the running sums already
  // contain it (corrector) or not (predictor).
  auto memory_at = [&](int j, const ComplexMatrix& endpoint,
                       bool endpoint_in_rows) -> ComplexMatrix {
    if (wideband) return local_term * endpoint;
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    if (j == 0) return acc;
    if (discrete) {
      for (int k = 0; k < n_modes; ++k) {
        const double ek = jd.mode_energies(k);
        const auto vk = jd.mode_couplings.col(k);
        Eigen::RowVectorXcd row = mode_rows[k] - 0.5 * (vk.adjoint() * u[0]);
        if (endpoint_in_rows) {
          row -= 0.5 * cis(ek * j * h) * (vk.adjoint() * endpoint);
        } else {
          row += 0.5 * cis(ek * j * h) * (vk.adjoint() * endpoint);
        }
        acc += (h * cis(-ek * j * h)) * (vk * row);
      }
      return acc;
    }
    acc = 0.5 * kernel[j] * u[0];
    for (int m = 1; m < j; ++m) acc += kernel[j - m] * u[m];
    acc += 0.5 * kernel[0] * endpoint;
    return h * acc;
  };

  for (int j = 0; j < n; ++j) {
    const ComplexMatrix f_j = -i_eps * u[j] - memory_at(j, u[j], true);
    const ComplexMatrix predictor = u[j] + h * f_j;
    const ComplexMatrix f_next =
        -i_eps * predictor - memory_at(j + 1, predictor, false);
    u[j + 1] = u[j] + 0.5 * h * (f_j + f_next);

    if (operator_norm(u[j + 1]) > 1.0 + 1e-4) {
      throw InstabilityError("solve_u: ||u|| grew beyond 1 + 1e-4 at t = " +
                             std::to_string(grid.time(j + 1)) +
                             "; reduce the step size");
    }
    for (int k = 0; k < n_modes; ++k) {
      mode_rows[k] += cis(jd.mode_energies(k) * (j + 1) * h) *
                      (jd.mode_couplings.col(k).adjoint() * u[j + 1]);
    }
  }
  return u;
}

std::vector<ComplexMatrix> reconstruct_u_spectral(
    const std::vector<LocalizedMode>& modes, const SpectrumTable& table,
    const TimeGrid& grid, int workers) {
  const int n_e = static_cast<int>(table.energies.size());
  if (n_e < 3) throw ValidationError("reconstruct_u_spectral: spectrum grid too coarse");
  if (!is_uniform(table.energies)) {
    throw ValidationError("reconstruct_u_spectral: uniform spectrum grid required");
  }
  const double de = table.step();
  if (de >= std::numbers::pi / grid.t_max) {
    throw NyquistError(
        "reconstruct_u_spectral: spectrum grid spacing must be below pi/t_max");
  }
  const int d = static_cast<int>(table.density.front().rows());

  // Simpson coefficients over the energy grid (trapezoid tail if even count).
  std::vector<double> coef(n_e, 0.0);
  const int segments = n_e - 1;
  int last_even = (segments % 2 == 0) ? segments : segments - 1;
  for (int k = 0; k + 2 <= last_even; k += 2) {
    coef[k] += de / 3.0;
    coef[k + 1] += 4.0 * de / 3.0;
    coef[k + 2] += de / 3.0;
  }
  if (segments % 2 != 0) {
    coef[segments - 1] += 0.5 * de;
    coef[segments] += 0.5 * de;
  }

  std::vector<ComplexMatrix> u(grid.size());
  parallel_for(
      grid.size(),
      [&](int k) {
        const double t = grid.time(k);
        ComplexMatrix acc = ComplexMatrix::Zero(d, d);
        for (int m = 0; m < n_e; ++m) {
          acc += (coef[m] * cis(-table.energies(m) * t)) * table.density[m];
        }
        acc /= kTwoPi;
        for (const auto& mode : modes) {
          acc += mode.residue * cis(-mode.energy * t);
        }
        u[k] = acc;
      },
      workers);
  return u;
}

namespace {

std::vector<ComplexMatrix> compute_v_discrete(
    const SpectralDensity& jd, const BathConfig& bath, Statistics statistics,
    const std::vector<ComplexMatrix>& u, const TimeGrid& grid) {
  const int d = static_cast<int>(u.front().rows());
  const int n = grid.n_steps;
  const double h = grid.step();
  const int n_modes = static_cast<int>(jd.mode_energies.size());

  std::vector<double> f(n_modes);
  for (int k = 0; k < n_modes; ++k) {
    f[k] = occupation(bath, statistics, jd.mode_energies(k));
  }

  // The separable kernel factorizes the double trapezoid into per-mode
  // running sums: v_k = h^2 sum_k f_k y y^dag with y the trapezoid sum of
  // e^{i e r h} u_r V.
  std::vector<ComplexVector> sums(n_modes);
  for (int k = 0; k < n_modes; ++k) sums[k] = u[0] * jd.mode_couplings.col(k);

  std::vector<ComplexMatrix> v(n + 1, ComplexMatrix::Zero(d, d));
  for (int j = 1; j <= n; ++j) {
    for (int k = 0; k < n_modes; ++k) {
      sums[k] += cis(jd.mode_energies(k) * j * h) * (u[j] * jd.mode_couplings.col(k));
    }
    ComplexMatrix acc = ComplexMatrix::Zero(d, d);
    for (int k = 0; k < n_modes; ++k) {
      const ComplexVector y = sums[k] - 0.5 * (u[0] * jd.mode_couplings.col(k)) -
                              0.5 * cis(jd.mode_energies(k) * j * h) *
                                  (u[j] * jd.mode_couplings.col(k));
      acc += f[k] * (y * y.adjoint());
    }
    v[j] = hermitize(h * h * acc);
  }
  return v;
}

}  // namespace

std::vector<ComplexMatrix> compute_v_at(const SystemModel& model,
                                        const SpectralDensity& jd,
                                        const BathConfig& bath,
                                        const std::vector<ComplexMatrix>& u,
                                        const TimeGrid& grid,
                                        const std::vector<int>& indices,
                                        int workers) {
  const int d = model.dimension();
  const int n = grid.n_steps;
  const double h = grid.step();
  if (static_cast<int>(u.size()) != n + 1) {
    throw ValidationError("compute_v: u samples must live on the grid");
  }

  if (jd.kind == SpectralKind::DiscreteModes) {
    auto all = compute_v_discrete(jd, bath, model.statistics, u, grid);
    std::vector<ComplexMatrix> out(indices.size());
    for (size_t i = 0; i < indices.size(); ++i) out[i] = all.at(indices[i]);
    return out;
  }

  // gtilde depends on t1 - t2 only; one kernel table covers the lattice.
  std::vector<ComplexMatrix> table(n + 1);
  parallel_for(
      n + 1,
      [&](int m) {
        table[m] = noise_kernel(jd, bath, model.statistics, m * h, 0.0);
      },
      workers);
  auto noise_at = [&](int m) -> ComplexMatrix {
    if (m >= 0) return table[m];
    return table[-m].adjoint();
  };

  std::vector<ComplexMatrix> out(indices.size());
  parallel_for(
      static_cast<int>(indices.size()),
      [&](int slot) {
        const int k = indices[slot];
        ComplexMatrix acc = ComplexMatrix::Zero(d, d);
        for (int p = 0; p <= k; ++p) {
          const double wp = (p == 0 || p == k) ? 0.5 : 1.0;
          ComplexMatrix inner = ComplexMatrix::Zero(d, d);
          for (int q = 0; q <= k; ++q) {
            const double wq = (q == 0 || q == k) ? 0.5 : 1.0;
            inner += wq * (noise_at(p - q) * u[k - q].adjoint());
          }
          acc += wp * (u[k - p] * inner);
        }
        out[slot] = hermitize(h * h * acc);
        if (k == 0) out[slot].setZero();
      },
      workers);
  return out;
}

std::vector<ComplexMatrix> compute_v(const SystemModel& model,
                                     const SpectralDensity& jd,
                                     const BathConfig& bath,
                                     const std::vector<ComplexMatrix>& u,
                                     const TimeGrid& grid, int workers) {
  std::vector<int> indices(grid.size());
  for (int k = 0; k < grid.size(); ++k) indices[k] = k;
  return compute_v_at(model, jd, bath, u, grid, indices, workers);
}

GreenPair green_pair(const SystemModel& model, const SpectralDensity& jd,
                     const BathConfig& bath, const TimeGrid& grid,
                     int workers) {
  GreenPair pair;
  pair.grid = grid;
  pair.u = solve_u(model, jd, grid, workers);
  pair.v = compute_v(model, jd, bath, pair.u, grid, workers);
  return pair;
}

}  // namespace openqx
