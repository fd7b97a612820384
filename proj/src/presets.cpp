#include "openqx/presets.hpp"

#include <cmath>

namespace openqx {

namespace {

ComplexMatrix scalar(double x) {
  ComplexMatrix m(1, 1);
  m(0, 0) = x;
  return m;
}

void set_fock_initial(Scenario& sc, const std::vector<int>& counts) {
  OccupationSequence occ(counts);
  sc.initial = {{occ, occ, Complex(1.0, 0.0)}};
}

}  // namespace

Scenario fermion_discrete_scenario(int levels, int modes) {
  Scenario sc;
  sc.name = "fermion-d" + std::to_string(levels) + "-discrete" +
            std::to_string(modes);
  if (levels == 1) {
    sc.model = make_system(scalar(0.3), Statistics::Fermion);
  } else if (levels == 2) {
    ComplexMatrix eps(2, 2);
    eps << Complex(0.45, 0.0), Complex(0.12, 0.05), Complex(0.12, -0.05),
        Complex(-0.25, 0.0);
    sc.model = make_system(eps, Statistics::Fermion);
  } else {
    throw ValidationError("fermion_discrete_scenario: levels must be 1 or 2");
  }
  const int d = levels;
  RealVector energies(modes);
  ComplexMatrix couplings(d, modes);
  for (int k = 0; k < modes; ++k) {
    // Spread across [-1, 1] with mildly varied couplings; nothing symmetric
    // enough to create accidental degeneracies.
    energies(k) = -1.0 + 2.0 * (k + 0.5) / modes + 0.013 * k;
    for (int i = 0; i < d; ++i) {
      couplings(i, k) =
          Complex(0.16 + 0.02 * ((k + i) % 3), 0.03 * ((k + 2 * i) % 2));
    }
  }
  sc.jd = discrete_density(energies, couplings);
  sc.bath = make_bath(2.0, 0.1, 1e-6 * std::max(sc.jd.bandwidth(), 1.0));
  sc.n_cap = d;
  sc.grid = make_time_grid(4.0, 8000);
  sc.spectrum_points = 2001;
  set_fock_initial(sc, std::vector<int>(d, 1));
  return sc;
}

Scenario boson_discrete_scenario(int levels, int modes) {
  Scenario sc;
  sc.name = "boson-d" + std::to_string(levels) + "-discrete" +
            std::to_string(modes);
  if (levels == 1) {
    sc.model = make_system(scalar(1.5), Statistics::Boson, 8);
  } else if (levels == 2) {
    ComplexMatrix eps(2, 2);
    eps << Complex(1.3, 0.0), Complex(0.1, 0.04), Complex(0.1, -0.04),
        Complex(1.75, 0.0);
    sc.model = make_system(eps, Statistics::Boson, 8);
  } else {
    throw ValidationError("boson_discrete_scenario: levels must be 1 or 2");
  }
  const int d = levels;
  RealVector energies(modes);
  ComplexMatrix couplings(d, modes);
  for (int k = 0; k < modes; ++k) {
    energies(k) = 0.9 + 1.4 * (k + 0.5) / modes + 0.017 * k;
    for (int i = 0; i < d; ++i) {
      couplings(i, k) =
          Complex(0.13 + 0.02 * ((k + i) % 3), 0.02 * ((k + i) % 2));
    }
  }
  sc.jd = discrete_density(energies, couplings);
  // mu far below the modes keeps occupations small and the truncated basis
  // essentially exact.
  sc.bath = make_bath(1.2, -0.8, 1e-6 * std::max(sc.jd.bandwidth(), 1.0));
  sc.n_cap = 8;
  sc.grid = make_time_grid(3.0, 6000);
  sc.spectrum_points = 2001;
  set_fock_initial(sc, std::vector<int>(d, 1));
  return sc;
}

Scenario fermion_lorentzian_scenario(int levels) {
  Scenario sc;
  sc.name = "fermion-d" + std::to_string(levels) + "-lorentzian";
  if (levels == 1) {
    sc.model = make_system(scalar(0.2), Statistics::Fermion);
    sc.jd = lorentzian_density({LorentzianTerm{scalar(0.5), 0.0, 1.0}}, -6.0,
                               6.0);
  } else if (levels == 2) {
    ComplexMatrix eps(2, 2);
    eps << Complex(0.35, 0.0), Complex(0.1, 0.0), Complex(0.1, 0.0),
        Complex(-0.15, 0.0);
    sc.model = make_system(eps, Statistics::Fermion);
    ComplexMatrix amp(2, 2);
    amp << Complex(0.45, 0.0), Complex(0.12, 0.0), Complex(0.12, 0.0),
        Complex(0.45, 0.0);
    sc.jd = lorentzian_density({LorentzianTerm{amp, 0.1, 1.2}}, -6.0, 6.0);
  } else {
    throw ValidationError("fermion_lorentzian_scenario: levels must be 1 or 2");
  }
  sc.bath = make_bath(2.0, 0.0, 1e-8 * sc.jd.bandwidth());
  sc.n_cap = levels;
  sc.grid = make_time_grid(12.0, 3000);
  sc.spectrum_points = 6001;
  set_fock_initial(sc, std::vector<int>(levels, 1));
  return sc;
}

Scenario boson_lorentzian_scenario() {
  Scenario sc;
  sc.name = "boson-d1-lorentzian";
  sc.model = make_system(scalar(5.9), Statistics::Boson, 8);
  sc.jd = lorentzian_density({LorentzianTerm{scalar(0.5), 6.0, 1.0}}, 2.0, 10.0);
  // mu below the band keeps f finite on the support.
  sc.bath = make_bath(0.8, 0.5, 1e-8 * sc.jd.bandwidth());
  sc.n_cap = 8;
  sc.grid = make_time_grid(10.0, 2500);
  sc.spectrum_points = 6001;
  set_fock_initial(sc, {1});
  return sc;
}

Scenario fermion_wideband_scenario() {
  Scenario sc;
  sc.name = "fermion-d1-wideband";
  sc.model = make_system(scalar(1.0), Statistics::Fermion);
  sc.jd = wideband_density(scalar(0.4), -40.0, 42.0);
  sc.bath = make_bath(kBetaInfinity, -41.0, 1e-6 * sc.jd.bandwidth());
  sc.n_cap = 1;
  sc.grid = make_time_grid(8.0, 16000);
  sc.spectrum_points = 4001;
  set_fock_initial(sc, {1});
  return sc;
}

Scenario fermion_lorentzian_bound_scenario() {
  Scenario sc;
  sc.name = "fermion-d1-lorentzian-bound";
  sc.model = make_system(scalar(-0.8), Statistics::Fermion);
  sc.jd = lorentzian_density({LorentzianTerm{scalar(1.2), 0.0, 0.4}}, -1.0, 1.0);
  sc.bath = make_bath(1.5, 0.0, 1e-8 * sc.jd.bandwidth());
  sc.n_cap = 1;
  sc.grid = make_time_grid(12.0, 4000);
  sc.spectrum_points = 8001;
  set_fock_initial(sc, {1});
  return sc;
}

Scenario fermion_ohmic_gapped_scenario() {
  Scenario sc;
  sc.name = "fermion-d1-ohmic-gapped";
  // System level below the band; the gap guarantees a bound state.
  sc.model = make_system(scalar(-0.5), Statistics::Fermion);
  sc.jd = ohmic_density(scalar(0.6), 1.0, 8.0);
  sc.bath = make_bath(1.0, 0.5, 1e-8 * sc.jd.bandwidth());
  sc.n_cap = 1;
  sc.grid = make_time_grid(60.0, 6000);
  sc.spectrum_points = 6001;
  set_fock_initial(sc, {1});
  return sc;
}

Scenario weak_coupling_base_scenario() {
  Scenario sc;
  sc.name = "fermion-d1-weak-coupling";
  sc.model = make_system(scalar(0.0), Statistics::Fermion);
  // Unit-amplitude shape; the sweep rescales it by lambda x bandwidth.
  sc.jd = lorentzian_density({LorentzianTerm{scalar(1.0), 0.0, 0.3}}, -0.5, 0.5);
  sc.bath = make_bath(1.0, -0.1, 1e-8 * sc.jd.bandwidth());
  sc.n_cap = 1;
  sc.grid = make_time_grid(20.0, 2000);
  sc.spectrum_points = 4001;
  sc.sweep_couplings = {0.4, 0.2, 0.1, 0.05};
  set_fock_initial(sc, {1});
  return sc;
}

std::vector<std::string> preset_names() {
  return {"fermion-d1-discrete6", "fermion-d1-discrete5",
          "fermion-d2-discrete5", "fermion-d2-discrete6",
          "boson-d1-discrete6",   "boson-d2-discrete5",
          "fermion-d1-lorentzian", "fermion-d2-lorentzian",
          "boson-d1-lorentzian",  "fermion-d1-wideband",
          "fermion-d1-lorentzian-bound", "fermion-d1-ohmic-gapped",
          "fermion-d1-weak-coupling"};
}

Scenario preset_scenario(const std::string& name) {
  if (name == "fermion-d1-discrete6") return fermion_discrete_scenario(1, 6);
  if (name == "fermion-d1-discrete5") return fermion_discrete_scenario(1, 5);
  if (name == "fermion-d2-discrete5") return fermion_discrete_scenario(2, 5);
  if (name == "fermion-d2-discrete6") return fermion_discrete_scenario(2, 6);
  if (name == "boson-d1-discrete6") return boson_discrete_scenario(1, 6);
  if (name == "boson-d2-discrete5") return boson_discrete_scenario(2, 5);
  if (name == "fermion-d1-lorentzian") return fermion_lorentzian_scenario(1);
  if (name == "fermion-d2-lorentzian") return fermion_lorentzian_scenario(2);
  if (name == "boson-d1-lorentzian") return boson_lorentzian_scenario();
  if (name == "fermion-d1-wideband") return fermion_wideband_scenario();
  if (name == "fermion-d1-lorentzian-bound") {
    return fermion_lorentzian_bound_scenario();
  }
  if (name == "fermion-d1-ohmic-gapped") return fermion_ohmic_gapped_scenario();
  if (name == "fermion-d1-weak-coupling") return weak_coupling_base_scenario();
  throw ValidationError("unknown preset '" + name + "'");
}

}  // namespace openqx
