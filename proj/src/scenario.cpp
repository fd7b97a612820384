#include "openqx/scenario.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace openqx {

namespace {

struct ConfigLine {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

[[noreturn]] void fail(const std::string& source, int line,
                       const std::string& msg) {
  throw ValidationError(source + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) parts.push_back(trim(cur));
  return parts;
}

std::vector<std::string> tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& text) {
  try {
    size_t used = 0;
    const double val = std::stod(text, &used);
    while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
    if (used != text.size()) throw std::invalid_argument(text);
    return val;
  } catch (const std::exception&) {
    throw ValidationError("bad numeric literal '" + text + "'");
  }
}

int to_int(const std::string& text) {
  try {
    size_t used = 0;
    const int val = std::stoi(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return val;
  } catch (const std::exception&) {
    throw ValidationError("bad integer literal '" + text + "'");
  }
}

std::vector<ConfigLine> tokenize(const std::string& text,
                                 const std::string& source) {
  std::vector<ConfigLine> out;
  std::istringstream is(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string line = raw;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(source, line_no, "unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(source, line_no, "expected key = value");
    if (section.empty()) fail(source, line_no, "key outside any [section]");
    out.push_back(ConfigLine{section, trim(line.substr(0, eq)),
                             trim(line.substr(eq + 1)), line_no});
  }
  return out;
}

}  // namespace

Complex parse_complex(const std::string& text) {
  const std::string s = trim(text);
  if (s.empty()) throw ValidationError("empty complex literal");
  // Forms: "a", "bi", "a+bi", "a-bi".
  size_t split_pos = std::string::npos;
  for (size_t p = 1; p < s.size(); ++p) {
    if ((s[p] == '+' || s[p] == '-') && s[p - 1] != 'e' && s[p - 1] != 'E') {
      split_pos = p;
    }
  }
  auto part_value = [&](std::string part) -> double {
    if (part.empty() || part == "+") part = "1";
    if (part == "-") part = "-1";
    return to_double(part);
  };
  if (s.back() == 'i' || s.back() == 'j') {
    const std::string body = s.substr(0, s.size() - 1);
    if (split_pos == std::string::npos) {
      return Complex(0.0, part_value(body));
    }
    return Complex(part_value(s.substr(0, split_pos)),
                   part_value(body.substr(split_pos)));
  }
  return Complex(part_value(s), 0.0);
}

std::string format_complex(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%.15g%+.15gi", z.real(), z.imag());
  return buf;
}

namespace {

ComplexMatrix parse_matrix(const std::string& text, const std::string& source,
                           int line) {
  const auto rows = split(text, ';');
  if (rows.empty()) fail(source, line, "empty matrix");
  std::vector<std::vector<Complex>> data;
  for (const auto& row : rows) {
    std::vector<Complex> entries;
    for (const auto& tok : tokens(row)) entries.push_back(parse_complex(tok));
    if (!entries.empty()) data.push_back(std::move(entries));
  }
  if (data.empty()) fail(source, line, "empty matrix");
  ComplexMatrix m(data.size(), data[0].size());
  for (size_t r = 0; r < data.size(); ++r) {
    if (data[r].size() != data[0].size()) {
      fail(source, line, "ragged matrix rows");
    }
    for (size_t c = 0; c < data[r].size(); ++c) m(r, c) = data[r][c];
  }
  return m;
}

std::vector<int> parse_counts(const std::string& text, int levels,
                              const std::string& source, int line) {
  std::vector<int> counts;
  for (const auto& tok : tokens(text)) counts.push_back(to_int(tok));
  if (static_cast<int>(counts.size()) != levels) {
    fail(source, line, "occupation needs one count per level");
  }
  for (int c : counts) {
    if (c < 0) fail(source, line, "negative occupation");
  }
  return counts;
}

void apply_initial_preset(Scenario& sc, const std::string& value,
                          const std::string& source, int line) {
  const int d = sc.model.dimension();
  auto counts_of = [&](const std::string& text) {
    return OccupationSequence(parse_counts(text, d, source, line));
  };
  if (value == "vacuum") {
    sc.initial.push_back(
        {OccupationSequence(std::vector<int>(d, 0)),
         OccupationSequence(std::vector<int>(d, 0)), Complex(1.0, 0.0)});
    return;
  }
  const size_t colon = value.find(':');
  const std::string head = colon == std::string::npos ? value
                                                      : trim(value.substr(0, colon));
  const std::string body = colon == std::string::npos ? ""
                                                      : trim(value.substr(colon + 1));
  if (head == "fock") {
    auto occ = counts_of(body);
    sc.initial.push_back({occ, occ, Complex(1.0, 0.0)});
  } else if (head == "mixed") {
    // "counts @ weight, counts @ weight, ..."
    for (const auto& part : split(body, ',')) {
      const auto at = part.find('@');
      if (at == std::string::npos) fail(source, line, "mixed needs counts @ weight");
      auto occ = counts_of(trim(part.substr(0, at)));
      const double w = to_double(trim(part.substr(at + 1)));
      sc.initial.push_back({occ, occ, Complex(w, 0.0)});
    }
  } else if (head == "superpose") {
    // Equal coherent superposition of two kets.
    const auto kets = split(body, '&');
    if (kets.size() != 2) fail(source, line, "superpose needs two kets");
    auto a = counts_of(kets[0]);
    auto b = counts_of(kets[1]);
    sc.initial.push_back({a, a, Complex(0.5, 0.0)});
    sc.initial.push_back({a, b, Complex(0.5, 0.0)});
    sc.initial.push_back({b, a, Complex(0.5, 0.0)});
    sc.initial.push_back({b, b, Complex(0.5, 0.0)});
  } else {
    fail(source, line, "unknown initial preset '" + value + "'");
  }
}

}  // namespace

FockBasis scenario_basis(const Scenario& sc) {
  return FockBasis::build(sc.model.dimension(), sc.model.statistics, sc.n_cap,
                          sc.model.n_max);
}

DensityMatrix initial_state(const Scenario& sc) {
  FockBasis basis = scenario_basis(sc);
  ComplexMatrix mat = ComplexMatrix::Zero(basis.size(), basis.size());
  for (const auto& entry : sc.initial) {
    if (entry.row.total() != entry.col.total()) {
      throw ValidationError(
          "initial state: rho_IJ requires equal particle totals in I and J");
    }
    const int i = basis.index_of(entry.row);
    const int j = basis.index_of(entry.col);
    if (i < 0 || j < 0) {
      throw ValidationError("initial state: occupation outside the basis");
    }
    mat(i, j) += entry.coeff;
  }
  if (hermiticity_deviation(mat) > 1e-10) {
    throw ValidationError("initial state: Hermitian pairs missing");
  }
  if (std::abs(mat.trace() - Complex(1.0, 0.0)) > 1e-9) {
    throw ValidationError("initial state: trace must be 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(mat));
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("initial state: not positive semidefinite");
  }
  return DensityMatrix(std::move(basis), std::move(mat));
}

Scenario parse_scenario_text(const std::string& text,
                             const std::string& source) {
  const auto lines = tokenize(text, source);
  auto find_one = [&](const std::string& section, const std::string& key,
                      const char* fallback) -> std::pair<std::string, int> {
    for (const auto& l : lines) {
      if (l.section == section && l.key == key) return {l.value, l.line};
    }
    if (fallback) return {fallback, 0};
    fail(source, 1, "missing required key [" + section + "] " + key);
  };

  Scenario sc;
  sc.name = find_one("system", "name", "scenario").first;

  // [system]
  {
    auto [stat_text, stat_line] = find_one("system", "statistics", nullptr);
    Statistics stats;
    if (stat_text == "fermion") {
      stats = Statistics::Fermion;
    } else if (stat_text == "boson") {
      stats = Statistics::Boson;
    } else {
      fail(source, stat_line, "statistics must be fermion or boson");
    }
    auto [eps_text, eps_line] = find_one("system", "eps", nullptr);
    ComplexMatrix eps = parse_matrix(eps_text, source, eps_line);
    int n_max = to_int(find_one("system", "n_max", "1").first);
    try {
      sc.model = make_system(eps, stats, n_max);
    } catch (const ValidationError& err) {
      fail(source, eps_line, err.what());
    }
    sc.n_cap = to_int(
        find_one("system", "n_cap",
                 stats == Statistics::Fermion
                     ? std::to_string(sc.model.dimension()).c_str()
                     : "8")
            .first);
  }

  // [spectral]
  {
    auto [kind_text, kind_line] = find_one("spectral", "kind", nullptr);
    const int d = sc.model.dimension();
    auto support_of = [&](const char* fallback) -> std::pair<double, double> {
      auto [sup_text, sup_line] = find_one("spectral", "support", fallback);
      const auto toks = tokens(sup_text);
      if (toks.size() != 2) fail(source, sup_line, "support needs two numbers");
      return {to_double(toks[0]), to_double(toks[1])};
    };
    try {
      if (kind_text == "lorentzian") {
        std::vector<LorentzianTerm> terms;
        for (const auto& l : lines) {
          if (l.section != "spectral" || l.key != "term") continue;
          const auto parts = split(l.value, '|');
          if (parts.size() != 2) {
            fail(source, l.line, "term = <center> <width> | <amplitude>");
          }
          const auto head = tokens(parts[0]);
          if (head.size() != 2) {
            fail(source, l.line, "term needs a center and a width");
          }
          terms.push_back(LorentzianTerm{parse_matrix(parts[1], source, l.line),
                                         to_double(head[0]), to_double(head[1])});
        }
        auto [lo, hi] = support_of(nullptr);
        sc.jd = lorentzian_density(std::move(terms), lo, hi);
      } else if (kind_text == "ohmic") {
        auto [amp_text, amp_line] = find_one("spectral", "amplitude", nullptr);
        const double cutoff =
            to_double(find_one("spectral", "cutoff", "1.0").first);
        auto [lo, hi] = support_of(nullptr);
        if (lo != 0.0) fail(source, kind_line, "ohmic support starts at 0");
        sc.jd = ohmic_density(parse_matrix(amp_text, source, amp_line), cutoff, hi);
      } else if (kind_text == "wideband") {
        auto [amp_text, amp_line] = find_one("spectral", "amplitude", nullptr);
        auto [lo, hi] = support_of(nullptr);
        sc.jd = wideband_density(parse_matrix(amp_text, source, amp_line), lo, hi);
      } else if (kind_text == "discrete") {
        std::vector<double> energies;
        std::vector<ComplexVector> columns;
        for (const auto& l : lines) {
          if (l.section != "spectral" || l.key != "mode") continue;
          const auto parts = split(l.value, '|');
          if (parts.size() != 2) {
            fail(source, l.line, "mode = <energy> | <coupling column>");
          }
          energies.push_back(to_double(parts[0]));
          const auto comps = tokens(parts[1]);
          if (static_cast<int>(comps.size()) != d) {
            fail(source, l.line, "coupling column needs one entry per level");
          }
          ComplexVector col(d);
          for (int i = 0; i < d; ++i) col(i) = parse_complex(comps[i]);
          columns.push_back(col);
        }
        RealVector e(energies.size());
        ComplexMatrix v(d, energies.size());
        for (size_t k = 0; k < energies.size(); ++k) {
          e(k) = energies[k];
          v.col(k) = columns[k];
        }
        sc.jd = discrete_density(e, v);
      } else {
        fail(source, kind_line, "unknown spectral kind '" + kind_text + "'");
      }
    } catch (const ValidationError& err) {
      fail(source, kind_line, err.what());
    }
  }

  // [bath]
  {
    auto [beta_text, beta_line] = find_one("bath", "beta", nullptr);
    const double beta =
        beta_text == "inf" ? kBetaInfinity : to_double(beta_text);
    const double mu = to_double(find_one("bath", "mu", "0").first);
    const double default_eta =
        1e-6 * std::max(sc.jd.bandwidth(), 1.0);
    const double eta = to_double(
        find_one("bath", "eta", std::to_string(default_eta).c_str()).first);
    try {
      sc.bath = make_bath(beta, mu, eta);
    } catch (const ValidationError& err) {
      fail(source, beta_line, err.what());
    }
  }

  // [grid]
  sc.grid = make_time_grid(
      to_double(find_one("grid", "t_max", "1.0").first),
      to_int(find_one("grid", "steps", "200").first));
  sc.spectrum_points =
      to_int(find_one("grid", "spectrum_points", "4001").first);

  // [initial]
  for (const auto& l : lines) {
    if (l.section != "initial") continue;
    if (l.key == "preset") {
      apply_initial_preset(sc, l.value, source, l.line);
    } else if (l.key == "entry") {
      const auto parts = split(l.value, '|');
      if (parts.size() != 3) {
        fail(source, l.line, "entry = <I counts> | <J counts> | <coeff>");
      }
      const int d = sc.model.dimension();
      sc.initial.push_back(
          {OccupationSequence(parse_counts(parts[0], d, source, l.line)),
           OccupationSequence(parse_counts(parts[1], d, source, l.line)),
           parse_complex(parts[2])});
    } else {
      fail(source, l.line, "unknown [initial] key '" + l.key + "'");
    }
  }
  if (sc.initial.empty()) {
    apply_initial_preset(sc, "vacuum", source, 0);
  }

  // [thermalize]
  for (const auto& tok :
       tokens(find_one("thermalize", "couplings", "").first)) {
    sc.sweep_couplings.push_back(to_double(tok));
  }

  // [output]
  sc.out_dir = find_one("output", "directory", "out").first;
  for (const auto& tok : tokens(find_one("output", "snapshots", "").first)) {
    sc.snapshot_times.push_back(to_double(tok));
  }
  sc.workers = to_int(find_one("output", "workers", "0").first);

  // Validate the initial state eagerly so config errors surface here.
  initial_state(sc);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), path);
}

}  // namespace openqx
