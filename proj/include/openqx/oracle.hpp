#pragma once

#include <cstdint>
#include <vector>

#include "openqx/density.hpp"
#include "openqx/model.hpp"
#include "openqx/types.hpp"

namespace openqx {

// Star-discretized bath: N cells on the support, each carrying the matrix
// square root of J(e_c) de / 2pi as coupling columns. eps_tot is the total
// single-particle matrix [[eps_S, V], [V^dag, diag(e_k)]].
struct DiscretizedBath {
  int system_dim = 0;
  RealVector energies;       // bath mode energies
  ComplexMatrix couplings;   // d x M
  ComplexMatrix eps_tot;

  int modes() const { return static_cast<int>(energies.size()); }
  // Comparisons against the continuum stop before 0.8 x 2pi / de.
  double recurrence_time() const;
};

DiscretizedBath discretize(const SystemModel& model, const SpectralDensity& jd,
                           int cells);

// Bath built directly from an explicit discrete-mode density.
DiscretizedBath bath_from_modes(const SystemModel& model,
                                const SpectralDensity& jd);

SpectralDensity to_spectral_density(const DiscretizedBath& db);

// e^{-i eps_tot t} through one cached eigendecomposition; the S/E blocks give
// the oracle Green functions u = u_SS and v = u_SE f(e_E) u_SE^dag.
class TotalPropagator {
 public:
  explicit TotalPropagator(const DiscretizedBath& db);

  ComplexMatrix system_block(double t) const;
  ComplexMatrix exchange_block(double t) const;
  ComplexMatrix environment_system_block(double t) const;
  ComplexMatrix oracle_v(const BathConfig& bath, Statistics statistics,
                         double t) const;

 private:
  ComplexMatrix full(double t) const;

  int d_;
  RealVector bath_energies_;
  RealVector evals_;
  ComplexMatrix evecs_;
};

// Exact many-body evolution of rho0 x thermal bath for small fermionic
// instances, block-diagonal in total particle number. The reduced state
// comes back on the same system basis as rho0.
class ManyBodyOracle {
 public:
  ManyBodyOracle(const DiscretizedBath& db, const BathConfig& bath,
                 const FockBasis& system_basis);

  DensityMatrix evolve(const DensityMatrix& rho0, double t) const;

 private:
  struct Sector {
    std::vector<std::uint32_t> masks;
    std::vector<int> local_index;  // 2^m entries, -1 outside sector
    RealVector evals;
    ComplexMatrix evecs;
  };

  int d_ = 0;
  int total_modes_ = 0;
  FockBasis system_basis_;
  std::vector<double> bath_occupation_;
  std::vector<Sector> sectors_;
};

}  // namespace openqx
