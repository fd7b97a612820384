#pragma once

#include <string>
#include <vector>

#include "openqx/density.hpp"
#include "openqx/greens.hpp"
#include "openqx/model.hpp"

namespace openqx {

// One rho_IJ(0) coefficient.
struct InitialStateEntry {
  OccupationSequence row;
  OccupationSequence col;
  Complex coeff;
};

// A full pipeline configuration: what the config file maps onto and what the
// bundled presets construct directly.
struct Scenario {
  std::string name = "scenario";
  SystemModel model;
  BathConfig bath;
  SpectralDensity jd;
  int n_cap = 1;
  std::vector<InitialStateEntry> initial;
  TimeGrid grid{1.0, 100};
  int spectrum_points = 4001;
  std::vector<double> snapshot_times;
  std::vector<double> sweep_couplings;
  std::string out_dir = "out";
  int workers = 0;
};

FockBasis scenario_basis(const Scenario& sc);

// Builds and validates rho(0): Hermitian pairing, unit trace, and equal
// particle totals per (I, J) pair.
DensityMatrix initial_state(const Scenario& sc);

Complex parse_complex(const std::string& text);
std::string format_complex(Complex z);

Scenario parse_scenario_text(const std::string& text,
                             const std::string& source = "<config>");
Scenario load_scenario(const std::string& path);

}  // namespace openqx
