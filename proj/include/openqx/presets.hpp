#pragma once

#include <string>
#include <vector>

#include "openqx/scenario.hpp"

namespace openqx {

// Bundled scenarios used by the verification battery and the test suite.
std::vector<std::string> preset_names();
Scenario preset_scenario(const std::string& name);

// Parametric builders behind the named presets.
Scenario fermion_discrete_scenario(int levels, int modes);
Scenario boson_discrete_scenario(int levels, int modes);
Scenario fermion_lorentzian_scenario(int levels);
Scenario boson_lorentzian_scenario();
Scenario fermion_wideband_scenario();
Scenario fermion_lorentzian_bound_scenario();
Scenario fermion_ohmic_gapped_scenario();
Scenario weak_coupling_base_scenario();

}  // namespace openqx
