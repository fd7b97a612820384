#pragma once

#include <string>
#include <vector>

#include "openqx/density.hpp"
#include "openqx/greens.hpp"
#include "openqx/spectral.hpp"
#include "openqx/thermalization.hpp"

namespace openqx {

// All numeric output uses 15 significant digits.
std::string format_sig(double x);

void write_text_file(const std::string& path, const std::string& content);

std::string spectrum_csv(const SpectrumTable& table);
std::string spectrum_json(const SpectrumTable& table,
                          const std::vector<LocalizedMode>& modes);
std::string greens_csv(const GreenPair& pair);
std::string greens_json(const GreenPair& pair);
std::string state_json(const DensityMatrix& rho, double time);
std::string state_csv_row_header(const FockBasis& basis);
std::string state_csv_row(const DensityMatrix& rho, double time);
std::string steady_report_json(const SteadyStateReport& report,
                               const FockBasis& basis);
std::string sweep_csv(const std::vector<SweepPoint>& sweep);

}  // namespace openqx
