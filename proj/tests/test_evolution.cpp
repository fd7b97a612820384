#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "openqx/evolution.hpp"
#include "openqx/oracle.hpp"
#include "openqx/presets.hpp"
#include "test_support.hpp"

using namespace openqx;
using namespace openqx::testing;

namespace {

ComplexMatrix scalar(double x) {
  ComplexMatrix m(1, 1);
  m(0, 0) = x;
  return m;
}

// Random valid density matrix over the basis, block-diagonal in particle
// number as the physical constraint requires.
DensityMatrix random_state(const FockBasis& basis) {
  std::vector<int> sector(basis.size());
  for (int i = 0; i < basis.size(); ++i) sector[i] = basis.state(i).total();
  return DensityMatrix(basis, random_density(basis.size(), sector));
}

}  // namespace

TEST_CASE("dressed matrices at t = 0 are the identity data") {
  const ComplexMatrix u = ComplexMatrix::Identity(2, 2);
  const ComplexMatrix v = ComplexMatrix::Zero(2, 2);
  const DressedMatrices d = dress(u, v, Statistics::Fermion);
  CHECK(max_abs(d.a_tilde) == 0.0);
  CHECK(max_abs(d.u_tilde - u) == 0.0);
  CHECK(max_abs(d.thermal_weight) == 0.0);
}

TEST_CASE("fermionic dressing rejects a fully blocked level") {
  const ComplexMatrix u = 0.5 * ComplexMatrix::Identity(1, 1);
  CHECK_THROWS_AS(dress(u, ComplexMatrix::Identity(1, 1), Statistics::Fermion),
                  SingularMatrixError);
}

TEST_CASE("thermal-like state") {
  SUBCASE("v = 0 is the vacuum projector") {
    const FockBasis basis = FockBasis::build(2, Statistics::Boson, 4, 4);
    const ThermalState th =
        thermal_like_state(ComplexMatrix::Zero(2, 2), basis);
    CHECK(th.truncation_mass == 0.0);
    const DensityMatrix vac = vacuum_state(basis);
    CHECK(max_abs(th.state.mat - vac.mat) == 0.0);
  }
  SUBCASE("fermion d=1 at v = 1/2 is maximally mixed") {
    const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
    const ThermalState th = thermal_like_state(0.5 * ComplexMatrix::Identity(1, 1), basis);
    CHECK(std::abs(th.state.mat(0, 0) - 0.5) < 1e-14);
    CHECK(std::abs(th.state.mat(1, 1) - 0.5) < 1e-14);
  }
  SUBCASE("boson d=1 at v = 1 is the geometric distribution") {
    const FockBasis basis = FockBasis::build(1, Statistics::Boson, 24, 24);
    const ThermalState th =
        thermal_like_state(ComplexMatrix::Identity(1, 1), basis);
    double total = 0.0;
    for (int k = 0; k <= 24; ++k) {
      const double expect = 0.5 * std::pow(0.5, k);
      CHECK(std::abs(th.raw(k, k).real() - expect) < 1e-14);
      total += expect;
    }
    CHECK(th.truncation_mass == doctest::Approx(1.0 - total).epsilon(1e-10));
  }
  SUBCASE("truncation-mass guard throws") {
    const FockBasis basis = FockBasis::build(1, Statistics::Boson, 4, 4);
    CHECK_THROWS_AS(thermal_like_state(ComplexMatrix::Identity(1, 1), basis),
                    TruncationError);
  }
  SUBCASE("rotated thermal state keeps the one-body matrix") {
    ComplexMatrix v(2, 2);
    v << Complex(0.25, 0.0), Complex(0.1, 0.05), Complex(0.1, -0.05),
        Complex(0.15, 0.0);
    const FockBasis basis = FockBasis::build(2, Statistics::Boson, 14, 14);
    const ThermalState th = thermal_like_state(v, basis);
    CHECK(max_abs(one_body_matrix(th.state) - v) < 1e-7);
    const StateAudit audit = audit_state(th.state);
    CHECK(audit.hermiticity < 1e-10);
    CHECK(audit.min_eigenvalue > -1e-12);
  }
}

TEST_CASE("identity propagation at t = 0 is exact") {
  for (int d = 1; d <= 3; ++d) {
    const FockBasis basis = FockBasis::build(d, Statistics::Fermion, d, 1);
    const DressedMatrices dressed =
        dress(ComplexMatrix::Identity(d, d), ComplexMatrix::Zero(d, d),
              Statistics::Fermion);
    for (int rep = 0; rep < 5; ++rep) {
      const DensityMatrix rho0 = random_state(basis);
      const DensityMatrix out = evolve_exact(rho0, dressed);
      CHECK(max_abs(out.mat - rho0.mat) <= 1e-12);
    }
  }
  for (int d = 1; d <= 2; ++d) {
    const FockBasis basis = FockBasis::build(d, Statistics::Boson, 6, 6);
    const DressedMatrices dressed =
        dress(ComplexMatrix::Identity(d, d), ComplexMatrix::Zero(d, d),
              Statistics::Boson);
    for (int rep = 0; rep < 5; ++rep) {
      const DensityMatrix rho0 = random_state(basis);
      const DensityMatrix out = evolve_exact(rho0, dressed);
      CHECK(max_abs(out.mat - rho0.mat) <= 1e-12);
    }
  }
}

TEST_CASE("vacuum initial state always returns the thermal-like state") {
  const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
  const DensityMatrix rho0 = vacuum_state(basis);
  ComplexMatrix u = 0.6 * ComplexMatrix::Identity(1, 1);
  ComplexMatrix v = 0.3 * ComplexMatrix::Identity(1, 1);
  const DressedMatrices dressed = dress(u, v, Statistics::Fermion);
  const DensityMatrix out = evolve_exact(rho0, dressed);
  const ThermalState th = thermal_like_state(v, basis);
  CHECK(max_abs(out.mat - th.raw) < 1e-14);
}

TEST_CASE("pure dissipation: vacuum bath fermion decays as |u|^2") {
  const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
  const DensityMatrix rho0 = fock_state(basis, OccupationSequence({1}));
  const Complex u_val(0.4, -0.35);
  const DressedMatrices dressed =
      dress(u_val * ComplexMatrix::Identity(1, 1), ComplexMatrix::Zero(1, 1),
            Statistics::Fermion);
  const DensityMatrix out = evolve_exact(rho0, dressed);
  CHECK(std::abs(out.mat(1, 1).real() - std::norm(u_val)) < 1e-14);
  CHECK(std::abs(out.mat(0, 0).real() - (1.0 - std::norm(u_val))) < 1e-14);
}

TEST_CASE("exact evolution matches the many-body oracle") {
  // The end-to-end arbiter: all split weights, signs, and operator-string
  // conventions must line up with brute-force ED.
  for (const char* name : {"fermion-d1-discrete6", "fermion-d2-discrete5"}) {
    CAPTURE(name);
    const Scenario sc = preset_scenario(name);
    const FockBasis basis = scenario_basis(sc);
    const DiscretizedBath db = bath_from_modes(sc.model, sc.jd);
    const ManyBodyOracle oracle(db, sc.bath, basis);
    const auto u = solve_u(sc.model, sc.jd, sc.grid);

    std::vector<DensityMatrix> states;
    states.push_back(vacuum_state(basis));
    states.push_back(fock_state(
        basis, OccupationSequence(std::vector<int>(basis.levels(), 1))));
    states.push_back(random_state(basis));

    std::vector<int> idx;
    for (int s = 1; s <= 8; ++s) idx.push_back(sc.grid.n_steps * s / 8);
    const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx);

    double worst = 0.0;
    for (size_t s = 0; s < idx.size(); ++s) {
      const double t = sc.grid.time(idx[s]);
      const DressedMatrices dressed = dress(u[idx[s]], v[s], sc.model.statistics);
      for (const auto& rho0 : states) {
        const DensityMatrix ours = evolve_exact(rho0, dressed);
        const DensityMatrix ed = oracle.evolve(rho0, t);
        worst = std::max(worst, max_abs(ours.mat - ed.mat));
      }
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("one-body consistency of the assembled state") {
  const Scenario sc = fermion_discrete_scenario(2, 5);
  const FockBasis basis = scenario_basis(sc);
  const auto u = solve_u(sc.model, sc.jd, sc.grid);
  std::vector<int> idx = {sc.grid.n_steps / 3, sc.grid.n_steps};
  const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx);
  const DensityMatrix rho0 = initial_state(sc);
  for (size_t s = 0; s < idx.size(); ++s) {
    const DressedMatrices dressed = dress(u[idx[s]], v[s], sc.model.statistics);
    const DensityMatrix out = evolve_exact(rho0, dressed);
    const ComplexMatrix expect =
        u[idx[s]] * one_body_matrix(rho0) * u[idx[s]].adjoint() + v[s];
    CHECK(max_abs(one_body_matrix(out) - expect) < 1e-6);
  }
}

TEST_CASE("trace, positivity, Hermiticity audits along a trajectory") {
  const Scenario sc = boson_discrete_scenario(1, 6);
  const FockBasis basis = scenario_basis(sc);
  const auto u = solve_u(sc.model, sc.jd, sc.grid);
  std::vector<int> idx;
  for (int s = 0; s <= 6; ++s) idx.push_back(sc.grid.n_steps * s / 6);
  const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx);
  const DensityMatrix rho0 = initial_state(sc);
  for (size_t s = 0; s < idx.size(); ++s) {
    EvolutionReport report;
    const DressedMatrices dressed = dress(u[idx[s]], v[s], sc.model.statistics);
    const DensityMatrix out = evolve_exact(rho0, dressed, &report);
    CHECK(report.trace_deviation < 1e-6);
    const StateAudit audit = audit_state(out);
    CHECK(audit.trace_deviation < 1e-6);
    CHECK(audit.min_eigenvalue > -1e-8);
    CHECK(audit.hermiticity < 1e-10);
  }
}

TEST_CASE("coherent-state matrix elements") {
  SUBCASE("eta = 0 picks the vacuum population; vacuum state gives 1") {
    const Scenario sc = boson_discrete_scenario(1, 6);
    const FockBasis basis = scenario_basis(sc);
    const DensityMatrix vac = vacuum_state(basis);
    ComplexVector eta = ComplexVector::Zero(1);
    CHECK(std::abs(coherent_overlap(vac, eta) - 1.0) < 1e-14);
    eta(0) = Complex(0.3, -0.2);
    CHECK(std::abs(coherent_overlap(vac, eta) - 1.0) < 1e-14);
  }
  SUBCASE("fermionic input is rejected") {
    const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
    const DensityMatrix rho = vacuum_state(basis);
    ComplexVector eta = ComplexVector::Zero(1);
    CHECK_THROWS_AS(coherent_overlap(rho, eta), ValidationError);
  }
  SUBCASE("closed form equals the assembled overlap") {
    for (const char* name : {"boson-d1-discrete6", "boson-d2-discrete5"}) {
      CAPTURE(name);
      const Scenario sc = preset_scenario(name);
      const FockBasis basis = scenario_basis(sc);
      const auto u = solve_u(sc.model, sc.jd, sc.grid);
      std::vector<int> idx = {sc.grid.n_steps / 2, sc.grid.n_steps};
      const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx);
      const DensityMatrix rho0 = initial_state(sc);
      std::uniform_real_distribution<double> dist(-0.5, 0.5);
      for (size_t s = 0; s < idx.size(); ++s) {
        const DressedMatrices dressed =
            dress(u[idx[s]], v[s], Statistics::Boson);
        const DensityMatrix out = evolve_exact(rho0, dressed);
        for (int rep = 0; rep < 25; ++rep) {
          ComplexVector eta(basis.levels());
          for (int i = 0; i < basis.levels(); ++i) {
            eta(i) = Complex(dist(rng()), dist(rng()));
          }
          const Complex a = coherent_overlap(out, eta);
          const Complex b = coherent_matrix_element(rho0, dressed, eta);
          CHECK(std::abs(a - b) < 1e-7);
        }
      }
    }
  }
}

TEST_CASE("operator-string sandwich identity on coherent states") {
  // <eta*| (a^dag u~)_{Ibar} rho_th (u~^dag a)_{Jbar} |eta> equals the scalar
  // string times the Gaussian core.
  const FockBasis basis = FockBasis::build(1, Statistics::Boson, 16, 16);
  const ComplexMatrix u = 0.55 * ComplexMatrix::Identity(1, 1);
  const ComplexMatrix v = 0.22 * ComplexMatrix::Identity(1, 1);
  const DressedMatrices dressed = dress(u, v, Statistics::Boson);
  const ThermalState th = thermal_like_state(v, basis);

  ComplexMatrix raise = ComplexMatrix::Zero(basis.size(), basis.size());
  raise += dressed.u_tilde(0, 0) * basis.creation_op(0);
  ComplexMatrix lower = ComplexMatrix::Zero(basis.size(), basis.size());
  lower += std::conj(dressed.u_tilde(0, 0)) * basis.annihilation_op(0);

  std::uniform_real_distribution<double> dist(-0.4, 0.4);
  for (int rep = 0; rep < 10; ++rep) {
    ComplexVector eta(1);
    eta(0) = Complex(dist(rng()), dist(rng()));
    for (int nbar = 0; nbar <= 2; ++nbar) {
      ComplexMatrix op = th.raw;
      for (int r = 0; r < nbar; ++r) op = raise * op * lower;
      const Complex lhs = coherent_overlap(DensityMatrix(basis, op), eta);
      const Complex eta_u = std::conj(eta(0)) * dressed.u_tilde(0, 0);
      const Complex u_eta = std::conj(dressed.u_tilde(0, 0)) * eta(0);
      const Complex core =
          std::exp(std::norm(eta(0)) * dressed.thermal_weight(0, 0)) /
          (1.0 + v(0, 0));
      const Complex rhs =
          std::pow(eta_u, nbar) * core * std::pow(u_eta, nbar);
      CHECK(std::abs(lhs - rhs) < 1e-9);
    }
  }
}

TEST_CASE("master-equation coefficients") {
  SUBCASE("closed system: eps~ = eps_S, gamma = gamma~ = 0") {
    ComplexMatrix eps(2, 2);
    eps << Complex(0.6, 0.0), Complex(0.2, 0.1), Complex(0.2, -0.1),
        Complex(-0.4, 0.0);
    const SystemModel model = make_system(eps, Statistics::Fermion);
    const SpectralDensity jd =
        discrete_density(RealVector(0), ComplexMatrix::Zero(2, 0));
    const BathConfig bath = make_bath(1.0, -10.0, 1e-6);
    const TimeGrid grid = make_time_grid(2.0, 2000);
    GreenPair pair;
    pair.grid = grid;
    pair.u = solve_u(model, jd, grid);
    pair.v = compute_v(model, jd, bath, pair.u, grid);
    const MasterEqCoefficients coeffs =
        extract_me_coefficients(pair);
    for (int k = 0; k <= grid.n_steps; k += 400) {
      CHECK(max_abs(coeffs.eps_tilde[k] - eps) < 1e-4);
      CHECK(max_abs(coeffs.gamma[k]) < 1e-4);
      CHECK(max_abs(coeffs.gamma_tilde[k]) < 1e-4);
    }
  }
  SUBCASE("wide band: gamma = Gamma/2, eps~ = w0") {
    const Scenario sc = fermion_wideband_scenario();
    GreenPair pair;
    pair.grid = sc.grid;
    pair.u = solve_u(sc.model, sc.jd, sc.grid);
    pair.v.assign(sc.grid.size(), ComplexMatrix::Zero(1, 1));
    const MasterEqCoefficients coeffs =
        extract_me_coefficients(pair);
    for (int k = 0; k <= sc.grid.n_steps; k += 2000) {
      CHECK(std::abs(coeffs.gamma[k](0, 0).real() - 0.2) < 1e-4);
      CHECK(std::abs(coeffs.eps_tilde[k](0, 0).real() - 1.0) < 1e-4);
    }
  }
}

TEST_CASE("near-singular u is reported when extracting coefficients") {
  // A revival-like zero crossing of u makes kappa = du/dt u^{-1} blow up.
  const TimeGrid grid = make_time_grid(2.0, 20);
  GreenPair pair;
  pair.grid = grid;
  for (int k = 0; k <= 20; ++k) {
    pair.u.push_back((1.0 - grid.time(k)) * ComplexMatrix::Identity(1, 1));
    pair.v.push_back(ComplexMatrix::Zero(1, 1));
  }
  CHECK_THROWS_AS(extract_me_coefficients(pair), SingularMatrixError);
}

TEST_CASE("master-equation closure against the exact assembly") {
  for (const char* name :
       {"fermion-d1-discrete6", "fermion-d2-discrete5", "boson-d1-discrete6"}) {
    CAPTURE(name);
    const Scenario sc = preset_scenario(name);
    const FockBasis basis = scenario_basis(sc);
    // A coarser grid than the solver grid keeps the RK4 run cheap.
    const int stride = 4;
    const TimeGrid me_grid =
        make_time_grid(sc.grid.t_max, sc.grid.n_steps / stride);
    GreenPair pair;
    pair.grid = me_grid;
    const auto u_fine = solve_u(sc.model, sc.jd, sc.grid);
    const auto v_fine = compute_v(sc.model, sc.jd, sc.bath, u_fine, sc.grid);
    for (int k = 0; k <= me_grid.n_steps; ++k) {
      pair.u.push_back(u_fine[k * stride]);
      pair.v.push_back(v_fine[k * stride]);
    }
    const MasterEqCoefficients coeffs =
        extract_me_coefficients(pair);
    const DensityMatrix rho0 = initial_state(sc);
    const auto trajectory = integrate_master_equation(rho0, coeffs);

    double worst = 0.0;
    for (int k = 0; k <= me_grid.n_steps; k += 25) {
      const DressedMatrices dressed =
          dress(pair.u[k], pair.v[k], sc.model.statistics);
      const DensityMatrix exact = evolve_exact(rho0, dressed);
      worst = std::max(worst, trace_norm(trajectory[k].mat - exact.mat));
    }
    CHECK(worst < 1e-5);
  }
}

TEST_CASE("unitary master equation preserves purity") {
  const FockBasis basis = FockBasis::build(1, Statistics::Fermion, 1, 1);
  const TimeGrid grid = make_time_grid(3.0, 600);
  MasterEqCoefficients coeffs;
  coeffs.grid = grid;
  coeffs.eps_tilde.assign(grid.size(), 0.8 * ComplexMatrix::Identity(1, 1));
  coeffs.gamma.assign(grid.size(), ComplexMatrix::Zero(1, 1));
  coeffs.gamma_tilde.assign(grid.size(), ComplexMatrix::Zero(1, 1));
  ComplexMatrix rho(2, 2);
  rho << Complex(0.5, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0),
      Complex(0.5, 0.0);
  rho(0, 1) = Complex(0.35, 0.2);
  rho(1, 0) = Complex(0.35, -0.2);
  const DensityMatrix rho0(basis, rho);
  const double p0 = purity(rho0);
  const auto traj = integrate_master_equation(rho0, coeffs, {600});
  CHECK(std::abs(purity(traj[0]) - p0) < 1e-10);
}

TEST_CASE("empty-bath decay rate matches |u|^2") {
  const Scenario sc = fermion_wideband_scenario();
  const FockBasis basis = scenario_basis(sc);
  const int stride = 4;
  const TimeGrid me_grid = make_time_grid(sc.grid.t_max, sc.grid.n_steps / stride);
  GreenPair pair;
  pair.grid = me_grid;
  const auto u_fine = solve_u(sc.model, sc.jd, sc.grid);
  for (int k = 0; k <= me_grid.n_steps; ++k) pair.u.push_back(u_fine[k * stride]);
  pair.v.assign(me_grid.size(), ComplexMatrix::Zero(1, 1));
  const MasterEqCoefficients coeffs =
      extract_me_coefficients(pair);
  const DensityMatrix rho0 = fock_state(basis, OccupationSequence({1}));
  const auto traj = integrate_master_equation(rho0, coeffs);
  for (int k = 0; k <= me_grid.n_steps; k += 500) {
    const double t = me_grid.time(k);
    CHECK(std::abs(traj[k].mat(1, 1).real() - std::exp(-0.4 * t)) < 1e-5);
    CHECK(std::abs(traj[k].mat(1, 1).real() - std::norm(pair.u[k](0, 0))) <
          1e-5);
  }
}

TEST_CASE("bosonic d=2 one-body consistency") {
  const Scenario sc = boson_discrete_scenario(2, 5);
  const auto u = solve_u(sc.model, sc.jd, sc.grid);
  std::vector<int> idx = {sc.grid.n_steps / 2, sc.grid.n_steps};
  const auto v = compute_v_at(sc.model, sc.jd, sc.bath, u, sc.grid, idx);
  const DensityMatrix rho0 = initial_state(sc);
  for (size_t s = 0; s < idx.size(); ++s) {
    const DressedMatrices dressed = dress(u[idx[s]], v[s], Statistics::Boson);
    const DensityMatrix out = evolve_exact(rho0, dressed);
    const ComplexMatrix expect =
        u[idx[s]] * one_body_matrix(rho0) * u[idx[s]].adjoint() + v[s];
    CHECK(max_abs(one_body_matrix(out) - expect) < 1e-6);
  }
}
