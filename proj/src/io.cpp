#include "openqx/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "openqx/scenario.hpp"

namespace openqx {

namespace {

using nlohmann::json;

json matrix_json(const ComplexMatrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) {
      row.push_back(format_complex(m(r, c)));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string format_sig(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", x);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string spectrum_csv(const SpectrumTable& table) {
  std::ostringstream os;
  const int d = table.density.empty() ? 0 : static_cast<int>(table.density[0].rows());
  os << "energy";
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      os << ",re_D_" << i + 1 << j + 1 << ",im_D_" << i + 1 << j + 1;
    }
  }
  os << "\n";
  for (int k = 0; k < table.energies.size(); ++k) {
    os << format_sig(table.energies(k));
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        os << "," << format_sig(table.density[k](i, j).real()) << ","
           << format_sig(table.density[k](i, j).imag());
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string spectrum_json(const SpectrumTable& table,
                          const std::vector<LocalizedMode>& modes) {
  json out;
  out["min_eigenvalue_before_clip"] = table.min_eigenvalue;
  json mode_list = json::array();
  for (const auto& mode : modes) {
    mode_list.push_back(
        {{"energy", mode.energy}, {"residue", matrix_json(mode.residue)}});
  }
  out["localized_modes"] = std::move(mode_list);
  json grid = json::array();
  for (int k = 0; k < table.energies.size(); ++k) grid.push_back(table.energies(k));
  out["energies"] = std::move(grid);
  json dens = json::array();
  for (const auto& m : table.density) dens.push_back(matrix_json(m));
  out["density"] = std::move(dens);
  return out.dump(1);
}

std::string greens_csv(const GreenPair& pair) {
  std::ostringstream os;
  const int d = pair.u.empty() ? 0 : static_cast<int>(pair.u[0].rows());
  os << "time";
  for (const char* name : {"u", "v"}) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        os << ",re_" << name << "_" << i + 1 << j + 1 << ",im_" << name << "_"
           << i + 1 << j + 1;
      }
    }
  }
  os << "\n";
  for (int k = 0; k < pair.grid.size(); ++k) {
    os << format_sig(pair.grid.time(k));
    for (const auto* series : {&pair.u, &pair.v}) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          os << "," << format_sig((*series)[k](i, j).real()) << ","
             << format_sig((*series)[k](i, j).imag());
        }
      }
    }
    os << "\n";
  }
  return os.str();
}

std::string greens_json(const GreenPair& pair) {
  json out;
  out["t_max"] = pair.grid.t_max;
  out["n_steps"] = pair.grid.n_steps;
  json u = json::array(), v = json::array();
  for (const auto& m : pair.u) u.push_back(matrix_json(m));
  for (const auto& m : pair.v) v.push_back(matrix_json(m));
  out["u"] = std::move(u);
  out["v"] = std::move(v);
  return out.dump(1);
}

std::string state_json(const DensityMatrix& rho, double time) {
  json out;
  out["time"] = time;
  json labels = json::array();
  for (int i = 0; i < rho.basis.size(); ++i) labels.push_back(rho.basis.label(i));
  out["basis"] = std::move(labels);
  out["matrix"] = matrix_json(rho.mat);
  const StateAudit audit = audit_state(rho);
  out["audit"] = {{"trace_deviation", audit.trace_deviation},
                  {"hermiticity", audit.hermiticity},
                  {"min_eigenvalue", audit.min_eigenvalue}};
  return out.dump(1);
}

std::string state_csv_row_header(const FockBasis& basis) {
  std::ostringstream os;
  os << "time";
  for (int i = 0; i < basis.size(); ++i) os << ",pop_" << basis.label(i);
  os << ",purity,trace_deviation,min_eigenvalue\n";
  return os.str();
}

std::string state_csv_row(const DensityMatrix& rho, double time) {
  std::ostringstream os;
  os << format_sig(time);
  for (int i = 0; i < rho.basis.size(); ++i) {
    os << "," << format_sig(rho.mat(i, i).real());
  }
  const StateAudit audit = audit_state(rho);
  os << "," << format_sig(purity(rho)) << ","
     << format_sig(audit.trace_deviation) << ","
     << format_sig(audit.min_eigenvalue) << "\n";
  return os.str();
}

std::string steady_report_json(const SteadyStateReport& report,
                               const FockBasis& basis) {
  json out;
  out["n_bar"] = matrix_json(report.n_bar);
  out["has_localized_modes"] = report.has_localized_modes;
  out["distance_to_grand_canonical"] = report.distance_to_grand_canonical;
  out["memory_witness"] = report.memory_witness;
  json labels = json::array();
  for (int i = 0; i < basis.size(); ++i) labels.push_back(basis.label(i));
  out["basis"] = std::move(labels);
  out["rho_infinity"] = matrix_json(report.rho_inf.mat);
  return out.dump(1);
}

std::string sweep_csv(const std::vector<SweepPoint>& sweep) {
  std::ostringstream os;
  os << "coupling,deviation\n";
  for (const auto& point : sweep) {
    os << format_sig(point.coupling) << "," << format_sig(point.deviation)
       << "\n";
  }
  return os.str();
}

}  // namespace openqx
