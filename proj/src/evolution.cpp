#include "openqx/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace openqx {

namespace {

// Eigen-decomposed v with small negative eigenvalues clipped; the shared
// backend for dressing and the thermal-like state.
struct OccupationSpectrum {
  RealVector values;
  ComplexMatrix vectors;
  bool diagonal = false;
};

OccupationSpectrum decompose_v(const ComplexMatrix& v, Statistics statistics) {
  if (hermiticity_deviation(v) > 1e-8) {
    throw ValidationError("v(t,t) must be Hermitian");
  }
  OccupationSpectrum spec;
  double off_diag = 0.0;
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < v.cols(); ++j) {
      if (i != j) off_diag = std::max(off_diag, std::abs(v(i, j)));
    }
  }
  if (off_diag < 1e-15) {
    spec.diagonal = true;
    spec.values = v.diagonal().real();
    spec.vectors = ComplexMatrix::Identity(v.rows(), v.cols());
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(v));
    spec.values = es.eigenvalues();
    spec.vectors = es.eigenvectors();
  }
  for (int i = 0; i < spec.values.size(); ++i) {
    if (spec.values(i) < -1e-8) {
      throw ValidationError("v(t,t) has a negative occupation eigenvalue");
    }
    spec.values(i) = std::max(spec.values(i), 0.0);
    if (statistics == Statistics::Fermion && spec.values(i) > 1.0 + 1e-8) {
      throw ValidationError("fermionic v(t,t) eigenvalue exceeds 1");
    }
  }
  return spec;
}

}  // namespace

DressedMatrices dress(const ComplexMatrix& u, const ComplexMatrix& v,
                      Statistics statistics) {
  const double sign = statistics_sign(statistics);
  OccupationSpectrum spec = decompose_v(v, statistics);

  ComplexVector inv_occ(spec.values.size());
  ComplexVector weight(spec.values.size());
  for (int i = 0; i < spec.values.size(); ++i) {
    const double denom = 1.0 + sign * spec.values(i);
    if (std::abs(denom) < 1e-12) {
      throw SingularMatrixError(
          "dress: (1 - v) is singular; a fermionic level is fully blocked");
    }
    inv_occ(i) = 1.0 / denom;
    weight(i) = spec.values(i) / denom;
  }
  const ComplexMatrix inv =
      spec.vectors * inv_occ.asDiagonal() * spec.vectors.adjoint();

  DressedMatrices dressed;
  dressed.statistics = statistics;
  dressed.u = u;
  dressed.v = v;
  dressed.u_tilde = inv * u;
  dressed.a_tilde =
      ComplexMatrix::Identity(u.rows(), u.cols()) - u.adjoint() * dressed.u_tilde;
  dressed.thermal_weight =
      spec.vectors * weight.asDiagonal() * spec.vectors.adjoint();
  return dressed;
}

ThermalState thermal_like_state(const ComplexMatrix& v,
                                const FockBasis& basis) {
  const Statistics statistics = basis.statistics();
  OccupationSpectrum spec = decompose_v(v, statistics);
  const int dim = basis.size();

  // Occupation probabilities per rotated mode: geometric for bosons,
  // two-point for fermions.
  auto mode_prob = [&](double n, int k) -> double {
    if (statistics == Statistics::Fermion) return k ? n : 1.0 - n;
    if (n <= 0.0) return k == 0 ? 1.0 : 0.0;
    return std::pow(n / (1.0 + n), k) / (1.0 + n);
  };

  RealVector populations(dim);
  for (int idx = 0; idx < dim; ++idx) {
    const auto& counts = basis.state(idx).counts;
    double p = 1.0;
    for (int level = 0; level < basis.levels(); ++level) {
      p *= mode_prob(spec.values(level), counts[level]);
    }
    populations(idx) = p;
  }
  const double kept = populations.sum();
  const double mass = 1.0 - kept;
  if (mass > 1e-6) {
    throw TruncationError("thermal_like_state: truncated probability " +
                          std::to_string(mass) + " exceeds 1e-6");
  }

  ThermalState out;
  out.truncation_mass = mass;
  if (spec.diagonal) {
    out.raw = populations.cast<Complex>().asDiagonal();
  } else {
    // Fock representation of the mode rotation S: <I|K_c> is the permanent
    // (determinant) of the replicated submatrix over the normalizations.
    ComplexMatrix transform = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      const auto& row_occ = basis.state(i);
      for (int k = 0; k < dim; ++k) {
        const auto& col_occ = basis.state(k);
        if (row_occ.total() != col_occ.total()) continue;
        const ComplexMatrix sub =
            build_submatrix(spec.vectors, row_occ, col_occ);
        transform(i, k) = matrix_function(sub, statistics) /
                          (normalization(row_occ) * normalization(col_occ));
      }
    }
    out.raw = hermitize(transform * populations.cast<Complex>().asDiagonal() *
                        transform.adjoint());
  }
  ComplexMatrix normalized = out.raw / out.raw.trace().real();
  out.state = DensityMatrix(basis, std::move(normalized));
  return out;
}

DensityMatrix evolve_exact(const DensityMatrix& rho0,
                           const DressedMatrices& dressed,
                           EvolutionReport* report) {
  const FockBasis& basis = rho0.basis;
  const Statistics statistics = basis.statistics();
  if (statistics != dressed.statistics) {
    throw ValidationError("evolve_exact: statistics mismatch");
  }
  const int d = basis.levels();
  const int dim = basis.size();

  ThermalState thermal = thermal_like_state(dressed.v, basis);

  // Component operators of the dressed strings.
  std::vector<ComplexMatrix> raise_op(d), lower_op(d);
  for (int k = 0; k < d; ++k) {
    ComplexMatrix up = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix down = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < d; ++i) {
      up += dressed.u_tilde(i, k) * basis.creation_op(i);
      down += std::conj(dressed.u_tilde(i, k)) * basis.annihilation_op(i);
    }
    raise_op[k] = std::move(up);
    lower_op[k] = std::move(down);
  }
  auto left_string = [&](const OccupationSequence& occ) {
    ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
    for (int k = 0; k < d; ++k) {
      for (int rep = 0; rep < occ.counts[k]; ++rep) m = m * raise_op[k];
    }
    return m;
  };
  auto right_string = [&](const OccupationSequence& occ) {
    ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
    for (int k = d - 1; k >= 0; --k) {
      for (int rep = 0; rep < occ.counts[k]; ++rep) m = m * lower_op[k];
    }
    return m;
  };

  ComplexMatrix acc = ComplexMatrix::Zero(dim, dim);
  for (int i_idx = 0; i_idx < dim; ++i_idx) {
    for (int j_idx = 0; j_idx < dim; ++j_idx) {
      const Complex coeff = rho0.mat(i_idx, j_idx);
      if (coeff == Complex(0.0, 0.0)) continue;
      const OccupationSequence& row_occ = basis.state(i_idx);
      const OccupationSequence& col_occ = basis.state(j_idx);
      const double norm = normalization(row_occ) * normalization(col_occ);

      for_each_split_pair(
          row_occ, col_occ, statistics,
          [&](const Subsequence& row_split, const Subsequence& col_split) {
            // A~_{J',I'}: rows replicated by J', columns by I'. The
            // many-body oracle fixes this orientation; the transpose pairing
            // loses Hermiticity for I' != J'.
            const ComplexMatrix sub = build_submatrix(
                dressed.a_tilde, col_split.chosen, row_split.chosen);
            const Complex weight = matrix_function(sub, statistics) *
                                   row_split.weight * col_split.weight;
            if (weight == Complex(0.0, 0.0)) return;
            acc += (coeff * weight / norm) *
                   (left_string(row_split.complement) * thermal.raw *
                    right_string(col_split.complement));
          });
    }
  }

  EvolutionReport local;
  local.trace_deviation = std::abs(acc.trace() - Complex(1.0, 0.0));
  local.hermiticity_deviation = hermiticity_deviation(acc);
  local.thermal_truncation_mass = thermal.truncation_mass;
  if (report) *report = local;

  return DensityMatrix(basis, hermitize(acc));
}

Complex coherent_overlap(const DensityMatrix& rho, const ComplexVector& eta) {
  if (rho.basis.statistics() != Statistics::Boson) {
    throw ValidationError("coherent_overlap: bosonic states only");
  }
  const int dim = rho.basis.size();
  ComplexVector bra(dim), ket(dim);
  for (int idx = 0; idx < dim; ++idx) {
    const auto& counts = rho.basis.state(idx).counts;
    Complex b(1.0, 0.0), k(1.0, 0.0);
    for (int n = 0; n < rho.basis.levels(); ++n) {
      for (int rep = 0; rep < counts[n]; ++rep) {
        b *= std::conj(eta(n));
        k *= eta(n);
      }
    }
    const double norm = normalization(rho.basis.state(idx));
    bra(idx) = b / norm;
    ket(idx) = k / norm;
  }
  return bra.transpose() * (rho.mat * ket);
}

Complex coherent_matrix_element(const DensityMatrix& rho0,
                                const DressedMatrices& dressed,
                                const ComplexVector& eta) {
  const FockBasis& basis = rho0.basis;
  if (basis.statistics() != Statistics::Boson) {
    throw ValidationError(
        "coherent_matrix_element: Grassmann-valued evaluation is out of scope");
  }
  const int d = basis.levels();

  // Row vector eta^* u~ and column u~^dag eta.
  ComplexVector left(d), right(d);
  for (int k = 0; k < d; ++k) {
    Complex l(0.0, 0.0), r(0.0, 0.0);
    for (int i = 0; i < d; ++i) {
      l += std::conj(eta(i)) * dressed.u_tilde(i, k);
      r += std::conj(dressed.u_tilde(i, k)) * eta(i);
    }
    left(k) = l;
    right(k) = r;
  }

  const Complex gauss_exp =
      (eta.adjoint() * dressed.thermal_weight * eta)(0, 0);
  const double sign = statistics_sign(Statistics::Boson);
  const ComplexMatrix one_pm_v =
      ComplexMatrix::Identity(d, d) + sign * dressed.v;
  const Complex core = std::exp(gauss_exp) /
                       Eigen::PartialPivLU<ComplexMatrix>(one_pm_v).determinant();

  Complex total(0.0, 0.0);
  const int dim = basis.size();
  for (int i_idx = 0; i_idx < dim; ++i_idx) {
    for (int j_idx = 0; j_idx < dim; ++j_idx) {
      const Complex coeff = rho0.mat(i_idx, j_idx);
      if (coeff == Complex(0.0, 0.0)) continue;
      const OccupationSequence& row_occ = basis.state(i_idx);
      const OccupationSequence& col_occ = basis.state(j_idx);
      const double norm = normalization(row_occ) * normalization(col_occ);

      for_each_split_pair(
          row_occ, col_occ, Statistics::Boson,
          [&](const Subsequence& row_split, const Subsequence& col_split) {
            const ComplexMatrix sub = build_submatrix(
                dressed.a_tilde, col_split.chosen, row_split.chosen);
            Complex term = permanent(sub) * row_split.weight * col_split.weight;
            for (int n = 0; n < d; ++n) {
              for (int rep = 0; rep < row_split.complement.counts[n]; ++rep) {
                term *= left(n);
              }
              for (int rep = 0; rep < col_split.complement.counts[n]; ++rep) {
                term *= right(n);
              }
            }
            total += coeff * term / norm;
          });
    }
  }
  return total * core;
}

MasterEqCoefficients extract_me_coefficients(const GreenPair& pair) {
  const int n = pair.grid.n_steps;
  const double h = pair.grid.step();
  const auto& u = pair.u;
  const auto& v = pair.v;
  if (static_cast<int>(u.size()) != n + 1 ||
      static_cast<int>(v.size()) != n + 1) {
    throw ValidationError("extract_me_coefficients: samples off the grid");
  }

  auto derivative = [&](const std::vector<ComplexMatrix>& f,
                        int k) -> ComplexMatrix {
    if (k == 0) return (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    if (k == n) return (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    return (f[k + 1] - f[k - 1]) / (2.0 * h);
  };

  MasterEqCoefficients out;
  out.grid = pair.grid;
  out.eps_tilde.resize(n + 1);
  out.gamma.resize(n + 1);
  out.gamma_tilde.resize(n + 1);
  for (int k = 0; k <= n; ++k) {
    Eigen::JacobiSVD<ComplexMatrix> svd(u[k]);
    if (svd.singularValues().minCoeff() < 1e-8) {
      throw SingularMatrixError(
          "extract_me_coefficients: u(t) is near-singular at t = " +
          std::to_string(pair.grid.time(k)));
    }
    const ComplexMatrix u_inv = u[k].partialPivLu().inverse();
    const ComplexMatrix kappa = derivative(u, k) * u_inv;
    out.eps_tilde[k] = hermitize(0.5 * kImag * (kappa - kappa.adjoint()));
    out.gamma[k] = hermitize(-0.5 * (kappa + kappa.adjoint()));
    out.gamma_tilde[k] =
        hermitize(derivative(v, k) - kappa * v[k] - v[k] * kappa.adjoint());
  }
  return out;
}

std::vector<DensityMatrix> integrate_master_equation(
    const DensityMatrix& rho0, const MasterEqCoefficients& coeffs,
    const std::vector<int>& indices) {
  const FockBasis& basis = rho0.basis;
  const int d = basis.levels();
  const int dim = basis.size();
  const int n = coeffs.grid.n_steps;
  const double h = coeffs.grid.step();
  const double sign = statistics_sign(basis.statistics());

  std::vector<int> wanted = indices;
  if (wanted.empty()) {
    wanted.resize(n + 1);
    for (int k = 0; k <= n; ++k) wanted[k] = k;
  }

  // a^dag_i a_j and a_j a^dag_i over the basis, reused in every evaluation.
  std::vector<std::vector<ComplexMatrix>> ca(d, std::vector<ComplexMatrix>(d));
  std::vector<std::vector<ComplexMatrix>> ac(d, std::vector<ComplexMatrix>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      ca[i][j] = basis.creation_op(i) * basis.annihilation_op(j);
      ac[j][i] = basis.annihilation_op(j) * basis.creation_op(i);
    }
  }

  auto rhs = [&](const ComplexMatrix& rho, const ComplexMatrix& eps,
                 const ComplexMatrix& gam,
                 const ComplexMatrix& gam_t) -> ComplexMatrix {
    ComplexMatrix h_mat = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix g1 = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix g2 = ComplexMatrix::Zero(dim, dim);
    ComplexMatrix m2 = ComplexMatrix::Zero(dim, dim);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        h_mat += eps(i, j) * ca[i][j];
        g1 += gam(i, j) * ca[i][j];
        g2 += gam_t(i, j) * ca[i][j];
        m2 += gam_t(i, j) * ac[j][i];
      }
    }
    ComplexMatrix out = -kImag * (h_mat * rho - rho * h_mat);
    for (int i = 0; i < d; ++i) {
      ComplexMatrix w_gamma = ComplexMatrix::Zero(dim, dim);
      ComplexMatrix w_tilde = ComplexMatrix::Zero(dim, dim);
      for (int j = 0; j < d; ++j) {
        w_gamma += gam(i, j) * basis.annihilation_op(j);
        w_tilde += gam_t(i, j) * basis.annihilation_op(j);
      }
      out += 2.0 * (w_gamma * rho * basis.creation_op(i));
      out += basis.creation_op(i) * rho * w_tilde;
      out += sign * (w_tilde * rho * basis.creation_op(i));
    }
    out -= g1 * rho + rho * g1;
    out -= sign * (g2 * rho);
    out -= rho * m2;
    return out;
  };

  std::vector<DensityMatrix> snapshots;
  snapshots.reserve(wanted.size());
  ComplexMatrix rho = rho0.mat;
  size_t cursor = 0;
  auto capture = [&](int k) {
    while (cursor < wanted.size() && wanted[cursor] == k) {
      snapshots.emplace_back(basis, rho);
      ++cursor;
    }
  };
  capture(0);
  for (int k = 0; k < n; ++k) {
    const ComplexMatrix& e0 = coeffs.eps_tilde[k];
    const ComplexMatrix& e1 = coeffs.eps_tilde[k + 1];
    const ComplexMatrix em = 0.5 * (e0 + e1);
    const ComplexMatrix& g0 = coeffs.gamma[k];
    const ComplexMatrix& g1 = coeffs.gamma[k + 1];
    const ComplexMatrix gm = 0.5 * (g0 + g1);
    const ComplexMatrix& t0 = coeffs.gamma_tilde[k];
    const ComplexMatrix& t1 = coeffs.gamma_tilde[k + 1];
    const ComplexMatrix tm = 0.5 * (t0 + t1);

    const ComplexMatrix k1 = rhs(rho, e0, g0, t0);
    const ComplexMatrix k2 = rhs(rho + 0.5 * h * k1, em, gm, tm);
    const ComplexMatrix k3 = rhs(rho + 0.5 * h * k2, em, gm, tm);
    const ComplexMatrix k4 = rhs(rho + h * k3, e1, g1, t1);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
    if (drift > 1e-7 * std::max(1.0, coeffs.grid.time(k + 1))) {
      throw InstabilityError(
          "integrate_master_equation: trace drift " + std::to_string(drift) +
          " at t = " + std::to_string(coeffs.grid.time(k + 1)));
    }
    capture(k + 1);
  }
  return snapshots;
}

}  // namespace openqx
