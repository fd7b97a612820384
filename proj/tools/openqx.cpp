#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <random>

#include "openqx/evolution.hpp"
#include "openqx/io.hpp"
#include "openqx/oracle.hpp"
#include "openqx/presets.hpp"
#include "openqx/thermalization.hpp"

namespace fs = std::filesystem;
using namespace openqx;

namespace {

struct CommonArgs {
  std::string config;
  std::string preset;
  std::string out_dir;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "scenario configuration file");
  cmd->add_option("--preset", args.preset, "bundled scenario name");
  cmd->add_option("--workers", args.workers, "worker thread count");
  cmd->add_option("--out", args.out_dir, "output directory");
}

Scenario resolve_scenario(const CommonArgs& args) {
  if (!args.config.empty() && !args.preset.empty()) {
    throw ValidationError("pass either --config or --preset, not both");
  }
  Scenario sc;
  if (!args.config.empty()) {
    sc = load_scenario(args.config);
  } else if (!args.preset.empty()) {
    sc = preset_scenario(args.preset);
  } else {
    throw ValidationError(
        "a scenario is required: --config <path> or --preset <name>");
  }
  if (args.workers > 0) sc.workers = args.workers;
  if (!args.out_dir.empty()) sc.out_dir = args.out_dir;
  fs::create_directories(sc.out_dir);
  return sc;
}

std::string out_path(const Scenario& sc, const std::string& file) {
  return (fs::path(sc.out_dir) / file).string();
}

int run_spectrum(const Scenario& sc) {
  const auto modes = find_localized_modes(sc.model, sc.jd);
  const RealVector grid =
      uniform_grid(sc.jd.support_min, sc.jd.support_max, sc.spectrum_points);
  const SpectrumTable table = spectrum(sc.model, sc.jd, sc.bath, grid, sc.workers);
  write_text_file(out_path(sc, "spectrum.csv"), spectrum_csv(table));
  write_text_file(out_path(sc, "spectrum.json"), spectrum_json(table, modes));

  // Self-energy on both rims of the cut.
  std::ostringstream sigma_csv;
  const int d = sc.model.dimension();
  sigma_csv << "energy";
  for (const char* side : {"plus", "minus"}) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        sigma_csv << ",re_sigma_" << side << "_" << i + 1 << j + 1
                  << ",im_sigma_" << side << "_" << i + 1 << j + 1;
      }
    }
  }
  sigma_csv << "\n";
  const int stride = std::max(1, static_cast<int>(grid.size()) / 512);
  for (int k = 0; k < grid.size(); k += stride) {
    const Complex z(grid(k), sc.bath.regularization_eta);
    const ComplexMatrix up = self_energy(sc.jd, z);
    const ComplexMatrix down = self_energy(sc.jd, std::conj(z));
    sigma_csv << format_sig(grid(k));
    for (const ComplexMatrix* m : {&up, &down}) {
      for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
          sigma_csv << "," << format_sig((*m)(i, j).real()) << ","
                    << format_sig((*m)(i, j).imag());
        }
      }
    }
    sigma_csv << "\n";
  }
  write_text_file(out_path(sc, "self_energy.csv"), sigma_csv.str());

  const ComplexMatrix total = sum_rule_total(modes, table);
  const double dev = max_abs(total - ComplexMatrix::Identity(d, d));
  std::cout << "spectrum: " << modes.size()
            << " localized mode(s), sum-rule deviation " << format_sig(dev)
            << "\n";
  return 0;
}

int run_greens(const Scenario& sc) {
  const GreenPair pair = green_pair(sc.model, sc.jd, sc.bath, sc.grid, sc.workers);
  write_text_file(out_path(sc, "greens.csv"), greens_csv(pair));
  write_text_file(out_path(sc, "greens.json"), greens_json(pair));
  std::cout << "greens: " << pair.grid.size() << " samples, |u(t_max)| = "
            << format_sig(operator_norm(pair.u.back())) << "\n";
  return 0;
}

int run_evolve(const Scenario& sc) {
  const FockBasis basis = scenario_basis(sc);
  const DensityMatrix rho0 = initial_state(sc);
  std::vector<double> times = sc.snapshot_times;
  if (times.empty()) {
    for (int s = 1; s <= 8; ++s) times.push_back(sc.grid.t_max * s / 8.0);
  }
  std::vector<int> indices;
  for (double t : times) {
    int k = static_cast<int>(std::llround(t / sc.grid.step()));
    indices.push_back(std::clamp(k, 0, sc.grid.n_steps));
  }

  const auto u = solve_u(sc.model, sc.jd, sc.grid, sc.workers);
  const auto v =
      compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, indices, sc.workers);

  std::ostringstream csv;
  csv << state_csv_row_header(basis);
  bool audits_ok = true;
  double max_truncation = 0.0;
  std::ostringstream all_states;
  all_states << "[\n";
  for (size_t s = 0; s < indices.size(); ++s) {
    const double t = sc.grid.time(indices[s]);
    const DressedMatrices dressed =
        dress(u[indices[s]], v[s], sc.model.statistics);
    EvolutionReport report;
    const DensityMatrix state = evolve_exact(rho0, dressed, &report);
    max_truncation = std::max(max_truncation, report.thermal_truncation_mass);
    const StateAudit audit = audit_state(state);
    if (!audit.pass()) {
      audits_ok = false;
      std::cerr << "audit failure at t = " << t << ": trace dev "
                << audit.trace_deviation << ", min eig "
                << audit.min_eigenvalue << ", hermiticity "
                << audit.hermiticity << "\n";
    }
    csv << state_csv_row(state, t);
    if (s) all_states << ",\n";
    all_states << state_json(state, t);
  }
  all_states << "\n]\n";
  write_text_file(out_path(sc, "populations.csv"), csv.str());
  write_text_file(out_path(sc, "states.json"), all_states.str());
  std::cout << "evolve: " << indices.size() << " snapshots, audits "
            << (audits_ok ? "pass" : "FAIL") << ", truncation mass "
            << format_sig(max_truncation) << "\n";
  return audits_ok ? 0 : 1;
}

int run_thermalize(const Scenario& sc) {
  const FockBasis basis = scenario_basis(sc);
  const auto modes = find_localized_modes(sc.model, sc.jd);
  const RealVector grid =
      uniform_grid(sc.jd.support_min, sc.jd.support_max, sc.spectrum_points);
  const SpectrumTable table = spectrum(sc.model, sc.jd, sc.bath, grid, sc.workers);

  SteadyStateReport report;
  report.has_localized_modes = !modes.empty();

  std::vector<DensityMatrix> probes;
  probes.push_back(vacuum_state(basis));
  probes.push_back(initial_state(sc));

  MemoryOptions mem_opts;
  mem_opts.t_final = std::min(50.0 / estimate_relaxation_rate(table),
                              20.0 * sc.grid.t_max);
  // Cap the horizon grid so the v sweep stays at desk scale.
  mem_opts.n_steps = std::min(
      static_cast<int>(std::ceil(mem_opts.t_final / sc.grid.step())), 8000);
  mem_opts.window_samples = 8;
  const MemoryReport memory = detect_memory(sc.model, sc.jd, sc.bath, modes,
                                            probes, mem_opts, sc.workers);
  report.memory_witness = memory.witness;

  if (modes.empty()) {
    report.n_bar = steady_occupation(table, sc.bath, sc.model.statistics, modes);
    report.rho_inf = steady_state(report.n_bar, basis);
    report.distance_to_grand_canonical = trace_distance(
        report.rho_inf, grand_canonical_state(sc.model, sc.bath, basis));
  } else {
    // No steady state exists; report the windowed average of the first probe.
    report.n_bar =
        ComplexMatrix::Zero(sc.model.dimension(), sc.model.dimension());
    report.rho_inf = memory.averages.front();
  }
  write_text_file(out_path(sc, "steady.json"), steady_report_json(report, basis));

  if (!sc.sweep_couplings.empty()) {
    const auto sweep = weak_coupling_sweep(
        sc.model,
        [&](double coupling) { return scale_density(sc.jd, coupling); },
        sc.bath, sc.sweep_couplings, sc.spectrum_points, sc.workers);
    write_text_file(out_path(sc, "sweep.csv"), sweep_csv(sweep));
  }
  std::cout << "thermalize: "
            << (modes.empty() ? "no localized modes" : "localized modes present")
            << ", memory witness " << format_sig(memory.witness) << "\n";
  return 0;
}

struct VerifyResult {
  bool pass = true;
  void report(const std::string& name, double dev, double tol) {
    const bool ok = dev <= tol;
    pass = pass && ok;
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": max deviation "
              << format_sig(dev) << " (tolerance " << format_sig(tol) << ")\n";
  }
};

void verify_discrete_fermion(const Scenario& sc, VerifyResult& result) {
  const FockBasis basis = scenario_basis(sc);
  const DiscretizedBath db = bath_from_modes(sc.model, sc.jd);
  const ManyBodyOracle oracle(db, sc.bath, basis);
  const auto u = solve_u(sc.model, sc.jd, sc.grid, sc.workers);
  std::vector<int> idx;
  for (int s = 1; s <= 20; ++s) idx.push_back(sc.grid.n_steps * s / 20);
  const auto v =
      compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx, sc.workers);
  const DensityMatrix rho0 = initial_state(sc);
  double worst = 0.0;
  for (size_t s = 0; s < idx.size(); ++s) {
    const DressedMatrices dressed = dress(u[idx[s]], v[s], sc.model.statistics);
    const DensityMatrix ours = evolve_exact(rho0, dressed);
    const DensityMatrix ed = oracle.evolve(rho0, sc.grid.time(idx[s]));
    worst = std::max(worst, max_abs(ours.mat - ed.mat));
  }
  result.report(sc.name + " vs many-body oracle", worst, 1e-6);
}

void verify_discrete_boson(const Scenario& sc, VerifyResult& result) {
  const FockBasis basis = scenario_basis(sc);
  const auto u = solve_u(sc.model, sc.jd, sc.grid, sc.workers);
  std::vector<int> idx = {sc.grid.n_steps / 2, sc.grid.n_steps};
  const auto v =
      compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx, sc.workers);
  const DensityMatrix rho0 = initial_state(sc);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  double worst = 0.0;
  double worst_onebody = 0.0;
  for (size_t s = 0; s < idx.size(); ++s) {
    const DressedMatrices dressed = dress(u[idx[s]], v[s], Statistics::Boson);
    const DensityMatrix out = evolve_exact(rho0, dressed);
    for (int rep = 0; rep < 10; ++rep) {
      ComplexVector eta(basis.levels());
      for (int i = 0; i < basis.levels(); ++i) {
        eta(i) = Complex(dist(gen), dist(gen));
      }
      worst = std::max(worst,
                       std::abs(coherent_overlap(out, eta) -
                                coherent_matrix_element(rho0, dressed, eta)));
    }
    const ComplexMatrix expect =
        u[idx[s]] * one_body_matrix(rho0) * u[idx[s]].adjoint() + v[s];
    worst_onebody =
        std::max(worst_onebody, max_abs(one_body_matrix(out) - expect));
  }
  result.report(sc.name + " coherent-state routes", worst, 1e-7);
  result.report(sc.name + " one-body closure", worst_onebody, 1e-6);
}

void verify_continuum(const Scenario& sc, VerifyResult& result) {
  const auto modes = find_localized_modes(sc.model, sc.jd);
  const RealVector grid =
      uniform_grid(sc.jd.support_min, sc.jd.support_max, sc.spectrum_points);
  const SpectrumTable table = spectrum(sc.model, sc.jd, sc.bath, grid, sc.workers);
  const auto direct = solve_u(sc.model, sc.jd, sc.grid, sc.workers);
  const auto spectral_route =
      reconstruct_u_spectral(modes, table, sc.grid, sc.workers);
  double worst = 0.0;
  for (int k = 0; k <= sc.grid.n_steps; ++k) {
    worst = std::max(worst, max_abs(direct[k] - spectral_route[k]));
  }
  result.report(sc.name + " route equivalence", worst,
                modes.empty() ? 1e-4 : 1e-3);

  const DiscretizedBath db = discretize(sc.model, sc.jd, 400);
  const TotalPropagator prop(db);
  std::vector<int> idx = {sc.grid.n_steps / 4, sc.grid.n_steps / 2,
                          sc.grid.n_steps};
  const auto v =
      compute_v_at(sc.model, sc.jd, sc.bath, direct, sc.grid, idx, sc.workers);
  double worst_block = 0.0;
  for (size_t s = 0; s < idx.size(); ++s) {
    const double t = sc.grid.time(idx[s]);
    if (t > db.recurrence_time()) continue;
    worst_block =
        std::max(worst_block, max_abs(direct[idx[s]] - prop.system_block(t)));
    worst_block = std::max(
        worst_block,
        max_abs(v[s] - prop.oracle_v(sc.bath, sc.model.statistics, t)));
  }
  result.report(sc.name + " block oracle (N=400)", worst_block, 1e-3);
}

void verify_wideband(const Scenario& sc, VerifyResult& result) {
  const auto u = solve_u(sc.model, sc.jd, sc.grid, sc.workers);
  double worst = 0.0;
  for (int k = 0; k <= sc.grid.n_steps; k += 100) {
    const double t = sc.grid.time(k);
    const double gamma = sc.jd.wideband_amplitude(0, 0).real();
    const double w0 = sc.model.eps_s(0, 0).real();
    worst = std::max(
        worst,
        std::abs(u[k](0, 0) - std::exp(Complex(-0.5 * gamma * t, -w0 * t))));
  }
  result.report(sc.name + " analytic damped phase", worst, 1e-6);
}

int run_verify(const CommonArgs& args) {
  std::vector<std::string> names;
  if (!args.preset.empty()) {
    names.push_back(args.preset);
  } else {
    names = {"fermion-d1-discrete6", "fermion-d2-discrete5",
             "boson-d1-discrete6", "fermion-d1-lorentzian",
             "fermion-d1-wideband"};
  }
  VerifyResult result;
  for (const auto& name : names) {
    Scenario sc = preset_scenario(name);
    if (args.workers > 0) sc.workers = args.workers;
    switch (sc.jd.kind) {
      case SpectralKind::DiscreteModes:
        if (sc.model.statistics == Statistics::Fermion) {
          verify_discrete_fermion(sc, result);
        } else {
          verify_discrete_boson(sc, result);
        }
        break;
      case SpectralKind::WideBand:
        verify_wideband(sc, result);
        break;
      default:
        verify_continuum(sc, result);
        break;
    }
  }
  std::cout << (result.pass ? "verify: all checks passed"
                            : "verify: tolerance failures")
            << "\n";
  return result.pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"openqx: exact open-system dynamics through particle exchange"};
  app.require_subcommand(1);

  CommonArgs args;
  CLI::App* spectrum_cmd =
      app.add_subcommand("spectrum", "emit Sigma, D(e), localized modes");
  CLI::App* greens_cmd = app.add_subcommand("greens", "emit u(t) and v(t,t)");
  CLI::App* evolve_cmd = app.add_subcommand("evolve", "emit rho(t) snapshots");
  CLI::App* thermalize_cmd =
      app.add_subcommand("thermalize", "steady state, sweep, memory report");
  CLI::App* verify_cmd = app.add_subcommand(
      "verify", "run oracle comparisons and report PASS/FAIL");
  for (CLI::App* cmd :
       {spectrum_cmd, greens_cmd, evolve_cmd, thermalize_cmd, verify_cmd}) {
    add_common(cmd, args);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (spectrum_cmd->parsed()) return run_spectrum(resolve_scenario(args));
    if (greens_cmd->parsed()) return run_greens(resolve_scenario(args));
    if (evolve_cmd->parsed()) return run_evolve(resolve_scenario(args));
    if (thermalize_cmd->parsed()) return run_thermalize(resolve_scenario(args));
    if (verify_cmd->parsed()) return run_verify(args);
  } catch (const ValidationError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "numerical failure: " << err.what() << "\n";
    return 2;
  }
  return 1;
}
