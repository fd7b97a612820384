#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "openqx/presets.hpp"
#include "openqx/thermalization.hpp"
#include "test_support.hpp"

using namespace openqx;
using namespace openqx::testing;

namespace {

ComplexMatrix scalar(double x) {
  ComplexMatrix m(1, 1);
  m(0, 0) = x;
  return m;
}

struct SteadySetup {
  SpectrumTable table;
  std::vector<LocalizedMode> modes;
  ComplexMatrix n_bar;
  double t_large;
};

SteadySetup prepare_steady(const Scenario& sc) {
  SteadySetup out;
  out.modes = find_localized_modes(sc.model, sc.jd);
  const RealVector grid =
      uniform_grid(sc.jd.support_min, sc.jd.support_max, sc.spectrum_points);
  out.table = spectrum(sc.model, sc.jd, sc.bath, grid);
  out.n_bar =
      steady_occupation(out.table, sc.bath, sc.model.statistics, out.modes);
  out.t_large = 50.0 / estimate_relaxation_rate(out.table);
  return out;
}

}  // namespace

TEST_CASE("steady occupation: empty bath gives zero") {
  const Scenario sc = fermion_lorentzian_scenario(1);
  const RealVector grid = uniform_grid(-6.0, 6.0, 1201);
  const BathConfig cold = make_bath(kBetaInfinity, -7.0, sc.bath.regularization_eta);
  const SpectrumTable table = spectrum(sc.model, sc.jd, cold, grid);
  const ComplexMatrix n_bar =
      steady_occupation(table, cold, Statistics::Fermion, {});
  CHECK(max_abs(n_bar) < 1e-12);
}

TEST_CASE("weak wide band: steady occupation is f at the level energy") {
  const SystemModel model = make_system(scalar(1.0), Statistics::Fermion);
  const SpectralDensity jd = wideband_density(scalar(0.05), -300.0, 300.0);
  const BathConfig bath = make_bath(0.5, 0.0, 1e-7);
  const RealVector grid = uniform_grid(-300.0, 300.0, 120001);
  const SpectrumTable table = spectrum(model, jd, bath, grid, 2);
  const ComplexMatrix n_bar =
      steady_occupation(table, bath, Statistics::Fermion, {});
  const double expect = occupation(bath, Statistics::Fermion, 1.0);
  CHECK(std::abs(n_bar(0, 0).real() - expect) < 2e-3);
}

TEST_CASE("steady occupation refuses localized modes") {
  const Scenario sc = fermion_ohmic_gapped_scenario();
  const auto modes = find_localized_modes(sc.model, sc.jd);
  REQUIRE(!modes.empty());
  const RealVector grid = uniform_grid(0.0, 8.0, 801);
  const SpectrumTable table = spectrum(sc.model, sc.jd, sc.bath, grid);
  CHECK_THROWS_AS(
      steady_occupation(table, sc.bath, Statistics::Fermion, modes),
      ValidationError);
}

TEST_CASE("fluctuation-dissipation closure at T = 50 / Gamma_min") {
  // Three no-bound-state scenarios; v(T,T) must land on int f D / 2pi.
  for (const char* name : {"fermion-d1-lorentzian", "fermion-d2-lorentzian",
                           "boson-d1-lorentzian"}) {
    CAPTURE(name);
    const Scenario sc = preset_scenario(name);
    const SteadySetup steady = prepare_steady(sc);
    REQUIRE(steady.modes.empty());
    const double t_final = steady.t_large;
    const int n_steps = static_cast<int>(std::ceil(t_final / 0.01));
    const TimeGrid grid = make_time_grid(t_final, n_steps);
    const auto u = solve_u(sc.model, sc.jd, grid);
    const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, grid, {n_steps});
    CHECK(max_abs(v[0] - steady.n_bar) < 1e-3);
    CHECK(max_abs(u[n_steps]) < 1e-3);
  }
}

TEST_CASE("steady state with off-diagonal coherences matches the dynamics") {
  const Scenario sc = fermion_lorentzian_scenario(2);
  const SteadySetup steady = prepare_steady(sc);
  REQUIRE(steady.modes.empty());
  // The dressed occupation carries genuine coherence.
  CHECK(std::abs(steady.n_bar(0, 1)) > 1e-4);

  const FockBasis basis = scenario_basis(sc);
  const DensityMatrix rho_inf = steady_state(steady.n_bar, basis);

  const double t_final = steady.t_large;
  const int n_steps = static_cast<int>(std::ceil(t_final / 0.01));
  const TimeGrid grid = make_time_grid(t_final, n_steps);
  const auto u = solve_u(sc.model, sc.jd, grid);
  const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, grid, {n_steps});
  const DressedMatrices dressed = dress(u[n_steps], v[0], Statistics::Fermion);
  const DensityMatrix late = evolve_exact(initial_state(sc), dressed);
  CHECK(trace_distance(late, rho_inf) < 2e-3);
}

TEST_CASE("weak-coupling sweep converges to the grand-canonical distribution") {
  const Scenario sc = weak_coupling_base_scenario();
  const auto sweep = weak_coupling_sweep(
      sc.model,
      [&](double coupling) { return scale_density(sc.jd, coupling); },
      sc.bath, sc.sweep_couplings, sc.spectrum_points);
  REQUIRE(sweep.size() == 4);
  // Monotone decrease with 5% slack, then the thermal limit.
  for (size_t i = 1; i < sweep.size(); ++i) {
    CHECK(sweep[i].deviation < 1.05 * sweep[i - 1].deviation);
  }
  CHECK(sweep.back().deviation <= 5e-3);
  // Halving the coupling roughly halves the deviation.
  const double ratio = sweep[1].deviation / sweep[2].deviation;
  CHECK(ratio > 1.3);
  CHECK(ratio < 3.0);

  // Gibbs-state distance at the weakest coupling.
  const FockBasis basis = scenario_basis(sc);
  const SpectralDensity jd_weak = scale_density(sc.jd, sc.sweep_couplings.back());
  const RealVector grid =
      uniform_grid(jd_weak.support_min, jd_weak.support_max, sc.spectrum_points);
  const SpectrumTable table = spectrum(sc.model, jd_weak, sc.bath, grid);
  const ComplexMatrix n_bar =
      steady_occupation(table, sc.bath, Statistics::Fermion, {});
  const DensityMatrix rho_inf = steady_state(n_bar, basis);
  const DensityMatrix gibbs = grand_canonical_state(sc.model, sc.bath, basis);
  CHECK(trace_distance(rho_inf, gibbs) < 1e-2);
}

TEST_CASE("memory detection") {
  SUBCASE("decoupled system keeps orthogonal probes apart") {
    const SystemModel model = make_system(scalar(0.4), Statistics::Fermion);
    const SpectralDensity jd =
        discrete_density(RealVector(0), ComplexMatrix::Zero(1, 0));
    const BathConfig bath = make_bath(1.0, -5.0, 1e-6);
    const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
    const auto modes = find_localized_modes(model, jd);
    REQUIRE(modes.size() == 1);
    MemoryOptions opts;
    opts.t_final = 20.0;
    opts.n_steps = 400;
    const MemoryReport report = detect_memory(
        model, jd, bath, modes,
        {vacuum_state(basis), fock_state(basis, OccupationSequence({1}))},
        opts);
    CHECK(report.witness == doctest::Approx(1.0).epsilon(1e-4));
  }
  SUBCASE("bound state retains initial-state memory; control collapses") {
    const Scenario sc = fermion_ohmic_gapped_scenario();
    const auto modes = find_localized_modes(sc.model, sc.jd);
    REQUIRE(modes.size() == 1);
    const FockBasis basis = scenario_basis(sc);
    MemoryOptions opts;
    opts.t_final = sc.grid.t_max;
    opts.n_steps = sc.grid.n_steps;
    opts.window_samples = 8;
    const MemoryReport report = detect_memory(
        sc.model, sc.jd, sc.bath, modes,
        {vacuum_state(basis), fock_state(basis, OccupationSequence({1}))},
        opts);
    CHECK(report.witness >= 1e-3);
    // Fermion d=1: the witness is the surviving population difference,
    // |Z|^2 up to the small continuum remainder.
    const double z = modes[0].residue(0, 0).real();
    CHECK(std::abs(report.witness - z * z) < 0.05 * z * z + 2e-3);

    // u at large times beats against the localized mode alone.
    const auto u = solve_u(sc.model, sc.jd, sc.grid);
    for (int k = sc.grid.n_steps * 3 / 4; k <= sc.grid.n_steps;
         k += sc.grid.n_steps / 20) {
      const double t = sc.grid.time(k);
      const Complex survived =
          z * std::exp(Complex(0.0, -modes[0].energy * t));
      CHECK(std::abs(u[k](0, 0) - survived) < 1e-3);
    }

    // No-bound-state control with the same probes.
    const Scenario control = fermion_lorentzian_scenario(1);
    const auto control_modes = find_localized_modes(control.model, control.jd);
    REQUIRE(control_modes.empty());
    const RealVector grid = uniform_grid(control.jd.support_min,
                                         control.jd.support_max,
                                         control.spectrum_points);
    const SpectrumTable table =
        spectrum(control.model, control.jd, control.bath, grid);
    MemoryOptions copts;
    copts.t_final = 50.0 / estimate_relaxation_rate(table);
    copts.n_steps = static_cast<int>(std::ceil(copts.t_final / 0.01));
    copts.window_samples = 6;
    const FockBasis cbasis = scenario_basis(control);
    const MemoryReport creport = detect_memory(
        control.model, control.jd, control.bath, control_modes,
        {vacuum_state(cbasis), fock_state(cbasis, OccupationSequence({1}))},
        copts);
    CHECK(creport.witness < 2e-3);
  }
}

TEST_CASE("relaxation-rate estimate tracks the line width") {
  const double gamma = 0.4;
  const SystemModel model = make_system(scalar(0.5), Statistics::Fermion);
  const SpectralDensity jd = wideband_density(scalar(gamma), -150.0, 150.0);
  const BathConfig bath = make_bath(1.0, 0.0, 1e-6);
  const RealVector grid = uniform_grid(-3.0, 4.0, 7001);
  const SpectrumTable table = spectrum(model, jd, bath, grid);
  // Lorentzian line of half-width gamma/2: FWHM = gamma.
  CHECK(estimate_relaxation_rate(table) == doctest::Approx(gamma).epsilon(0.05));
}
