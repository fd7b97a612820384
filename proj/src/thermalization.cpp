#include "openqx/thermalization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace openqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

ComplexMatrix steady_occupation(const SpectrumTable& table,
                                const BathConfig& bath, Statistics statistics,
                                const std::vector<LocalizedMode>& modes) {
  if (!modes.empty()) {
    throw ValidationError(
        "steady_occupation: localized modes present; v(t,t) keeps "
        "oscillating and no steady occupation exists");
  }
  std::vector<ComplexMatrix> weighted(table.density.size());
  for (size_t k = 0; k < table.density.size(); ++k) {
    weighted[k] =
        occupation(bath, statistics, table.energies(static_cast<int>(k))) *
        table.density[k];
  }
  return hermitize(integrate_table(weighted, table.energies) / kTwoPi);
}

DensityMatrix steady_state(const ComplexMatrix& n_bar,
                           const FockBasis& basis) {
  return thermal_like_state(n_bar, basis).state;
}

DensityMatrix grand_canonical_state(const SystemModel& model,
                                    const BathConfig& bath,
                                    const FockBasis& basis) {
  return thermal_like_state(
             occupation_matrix(bath, model.statistics, model.eps_s), basis)
      .state;
}

std::vector<SweepPoint> weak_coupling_sweep(
    const SystemModel& model,
    const std::function<SpectralDensity(double)>& family,
    const BathConfig& bath, const std::vector<double>& couplings,
    int spectrum_points, int workers) {
  const ComplexMatrix target =
      occupation_matrix(bath, model.statistics, model.eps_s);
  std::vector<SweepPoint> out(couplings.size());
  for (size_t i = 0; i < couplings.size(); ++i) {
    const SpectralDensity jd = family(couplings[i]);
    const auto modes = find_localized_modes(model, jd);
    if (!modes.empty()) {
      throw ValidationError(
          "weak_coupling_sweep: localized mode appeared at coupling " +
          std::to_string(couplings[i]));
    }
    const RealVector grid =
        uniform_grid(jd.support_min, jd.support_max, spectrum_points);
    const SpectrumTable table = spectrum(model, jd, bath, grid, workers);
    const ComplexMatrix n_bar =
        steady_occupation(table, bath, model.statistics, modes);
    out[i] = SweepPoint{couplings[i], operator_norm(n_bar - target)};
  }
  return out;
}

double estimate_relaxation_rate(const SpectrumTable& table) {
  const int n = static_cast<int>(table.energies.size());
  RealVector profile(n);
  for (int k = 0; k < n; ++k) profile(k) = table.density[k].trace().real();
  const double peak = profile.maxCoeff();
  if (!(peak > 0.0)) {
    throw ValidationError("estimate_relaxation_rate: empty spectrum");
  }

  // FWHM per local maximum above 20% of the global peak; the narrowest peak
  // sets the slowest relaxation.
  double min_width = std::numeric_limits<double>::infinity();
  for (int k = 1; k + 1 < n; ++k) {
    if (profile(k) < 0.2 * peak) continue;
    if (profile(k) < profile(k - 1) || profile(k) < profile(k + 1)) continue;
    const double half = 0.5 * profile(k);
    double left = table.energies(0);
    for (int m = k; m > 0; --m) {
      if (profile(m - 1) < half) {
        const double frac = (profile(m) - half) / (profile(m) - profile(m - 1));
        left = table.energies(m) - frac * table.step();
        break;
      }
    }
    double right = table.energies(n - 1);
    for (int m = k; m + 1 < n; ++m) {
      if (profile(m + 1) < half) {
        const double frac = (profile(m) - half) / (profile(m) - profile(m + 1));
        right = table.energies(m) + frac * table.step();
        break;
      }
    }
    min_width = std::min(min_width, right - left);
  }
  if (!std::isfinite(min_width)) min_width = table.step();
  return min_width;
}

MemoryReport detect_memory(const SystemModel& model, const SpectralDensity& jd,
                           const BathConfig& bath,
                           const std::vector<LocalizedMode>& modes,
                           const std::vector<DensityMatrix>& probes,
                           const MemoryOptions& opts, int workers) {
  if (probes.size() < 2) {
    throw ValidationError("detect_memory: at least two probe states required");
  }
  const TimeGrid grid = make_time_grid(opts.t_final, opts.n_steps);

  // Averages must span several beat periods of the localized-mode gaps so
  // the cross terms cancel.
  double window = opts.window_fraction * opts.t_final;
  if (modes.size() >= 2) {
    double min_gap = std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < modes.size(); ++a) {
      for (size_t b = a + 1; b < modes.size(); ++b) {
        min_gap = std::min(min_gap,
                           std::abs(modes[a].energy - modes[b].energy));
      }
    }
    window = std::max(window, std::min(10.0 * kTwoPi / min_gap,
                                       0.8 * opts.t_final));
  }
  const int first_index = std::max(
      0, grid.size() - 1 -
             static_cast<int>(std::round(window / grid.step())));
  std::vector<int> sample_indices;
  const int samples = std::max(2, opts.window_samples);
  for (int s = 0; s < samples; ++s) {
    const int idx = first_index + static_cast<int>(std::round(
                                      s * double(grid.n_steps - first_index) /
                                      (samples - 1)));
    if (sample_indices.empty() || idx != sample_indices.back()) {
      sample_indices.push_back(idx);
    }
  }

  MemoryReport report;
  report.has_localized_modes = !modes.empty();
  const auto u = solve_u(model, jd, grid, workers);
  const auto v = compute_v_at(model, jd, bath, u, grid, sample_indices, workers);
  for (const DensityMatrix& probe : probes) {
    ComplexMatrix mean =
        ComplexMatrix::Zero(probe.basis.size(), probe.basis.size());
    for (size_t s = 0; s < sample_indices.size(); ++s) {
      const DressedMatrices dressed =
          dress(u[sample_indices[s]], v[s], model.statistics);
      mean += evolve_exact(probe, dressed).mat;
    }
    mean /= static_cast<double>(sample_indices.size());
    report.averages.emplace_back(probe.basis, std::move(mean));
  }
  for (size_t a = 0; a < report.averages.size(); ++a) {
    for (size_t b = a + 1; b < report.averages.size(); ++b) {
      report.witness = std::max(
          report.witness,
          trace_distance(report.averages[a], report.averages[b]));
    }
  }
  return report;
}

}  // namespace openqx
