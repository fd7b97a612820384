#pragma once

#include <functional>
#include <vector>

#include "openqx/density.hpp"
#include "openqx/evolution.hpp"
#include "openqx/greens.hpp"
#include "openqx/spectral.hpp"
#include "openqx/types.hpp"

namespace openqx {

// n_bar = int de/2pi f(e) D(e); the fluctuation-dissipation fixed point of
// v(t,t). Refuses to run when localized modes are present.
ComplexMatrix steady_occupation(const SpectrumTable& table,
                                const BathConfig& bath, Statistics statistics,
                                const std::vector<LocalizedMode>& modes);

// rho(inf) = thermal-like state at v = n_bar.
DensityMatrix steady_state(const ComplexMatrix& n_bar, const FockBasis& basis);

// Grand-canonical Gibbs state of the bare system: the Gaussian state with
// occupation matrix f(eps_S).
DensityMatrix grand_canonical_state(const SystemModel& model,
                                    const BathConfig& bath,
                                    const FockBasis& basis);

struct SweepPoint {
  double coupling = 0.0;
  double deviation = 0.0;  // || n_bar(lambda) - f(eps_S) ||
};

// Rebuilds the spectral density at each coupling and records how far the
// steady occupation sits from the bare Bose/Fermi distribution.
std::vector<SweepPoint> weak_coupling_sweep(
    const SystemModel& model,
    const std::function<SpectralDensity(double)>& family,
    const BathConfig& bath, const std::vector<double>& couplings,
    int spectrum_points, int workers = 0);

// Smallest decay width read off the D(e) peaks (FWHM); sets the "large t"
// horizon 50 / Gamma_min.
double estimate_relaxation_rate(const SpectrumTable& table);

struct MemoryOptions {
  double t_final = 50.0;
  int n_steps = 2000;
  int window_samples = 16;
  double window_fraction = 0.25;  // widened to cover localized-mode beats
};

struct MemoryReport {
  double witness = 0.0;  // max pairwise trace distance of windowed averages
  bool has_localized_modes = false;
  std::vector<DensityMatrix> averages;
};

// Evolves the probe states to the horizon and compares their long-time
// window averages; a witness above threshold means the initial state
// survives into the steady state.
MemoryReport detect_memory(const SystemModel& model, const SpectralDensity& jd,
                           const BathConfig& bath,
                           const std::vector<LocalizedMode>& modes,
                           const std::vector<DensityMatrix>& probes,
                           const MemoryOptions& opts, int workers = 0);

struct SteadyStateReport {
  ComplexMatrix n_bar;
  DensityMatrix rho_inf;
  bool has_localized_modes = false;
  double distance_to_grand_canonical = 0.0;
  double memory_witness = 0.0;
};

}  // namespace openqx
