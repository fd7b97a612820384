#pragma once

#include <vector>

#include "openqx/types.hpp"

namespace openqx {

// d-level system H_S = sum_ij eps_ij a^dag_i a_j plus its statistics and the
// per-level occupation cap used when the bosonic Fock space is truncated.
struct SystemModel {
  ComplexMatrix eps_s;
  Statistics statistics = Statistics::Fermion;
  int n_max = 1;

  int dimension() const { return static_cast<int>(eps_s.rows()); }
};

SystemModel make_system(const ComplexMatrix& eps_s, Statistics statistics,
                        int n_max = 1);

// Reservoir temperature/chemical potential plus the 0+ regulator used when
// resolvents are evaluated next to the real axis.
struct BathConfig {
  double beta = 1.0;
  double mu = 0.0;
  double regularization_eta = 1e-6;
};

BathConfig make_bath(double beta, double mu, double regularization_eta);

enum class SpectralKind { LorentzianSum, OhmicExpCutoff, DiscreteModes, WideBand };

struct LorentzianTerm {
  ComplexMatrix amplitude;  // d x d PSD
  double center = 0.0;
  double width = 1.0;
};

// Matrix-valued bath spectral density J(e) restricted to [support_min,
// support_max]. Discrete-mode baths carry {e_k, V} explicitly and are never
// sampled as numerical delta spikes.
struct SpectralDensity {
  SpectralKind kind = SpectralKind::WideBand;
  double support_min = 0.0;
  double support_max = 0.0;

  std::vector<LorentzianTerm> lorentzians;

  ComplexMatrix ohmic_amplitude;  // J(e) = A * e * exp(-e / ohmic_cutoff)
  double ohmic_cutoff = 1.0;

  ComplexMatrix wideband_amplitude;  // flat J(e) = G on the support

  RealVector mode_energies;     // e_k
  ComplexMatrix mode_couplings;  // V, d x N; column k couples mode k

  int dimension() const;
  double bandwidth() const;
  bool has_modes() const { return kind == SpectralKind::DiscreteModes; }
};

SpectralDensity lorentzian_density(std::vector<LorentzianTerm> terms,
                                   double support_min, double support_max);
SpectralDensity ohmic_density(const ComplexMatrix& amplitude, double cutoff,
                              double support_max);
SpectralDensity wideband_density(const ComplexMatrix& amplitude,
                                 double support_min, double support_max);
SpectralDensity discrete_density(const RealVector& energies,
                                 const ComplexMatrix& couplings);

// f(e) = 1/(exp(beta (e - mu)) -/+ 1). Bosons require e > mu; beta = inf uses
// the zero-temperature step/zero limit.
double occupation(const BathConfig& bath, Statistics statistics, double eps);

// f applied to a Hermitian matrix through its eigendecomposition.
ComplexMatrix occupation_matrix(const BathConfig& bath, Statistics statistics,
                                const ComplexMatrix& herm);

// J(e) for the continuous families; zero outside the support. Discrete-mode
// densities must be consumed analytically and are rejected here.
ComplexMatrix evaluate_spectral_density(const SpectralDensity& jd, double eps);

// Same density with J scaled by `factor` (couplings scale by sqrt(factor)).
SpectralDensity scale_density(const SpectralDensity& jd, double factor);

}  // namespace openqx
