#pragma once

#include <vector>

#include "openqx/fock.hpp"
#include "openqx/types.hpp"

namespace openqx {

// Density matrix over a truncated Fock basis.
struct DensityMatrix {
  FockBasis basis;
  ComplexMatrix mat;

  DensityMatrix() = default;
  DensityMatrix(FockBasis b, ComplexMatrix m)
      : basis(std::move(b)), mat(std::move(m)) {}
};

struct StateAudit {
  double trace_deviation = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = 0.0;

  bool pass(double trace_tol = 1e-6, double eig_tol = -1e-8,
            double herm_tol = 1e-10) const {
    return trace_deviation <= trace_tol && min_eigenvalue >= eig_tol &&
           hermiticity <= herm_tol;
  }
};

StateAudit audit_state(const DensityMatrix& rho);

DensityMatrix vacuum_state(const FockBasis& basis);
DensityMatrix fock_state(const FockBasis& basis, const OccupationSequence& occ);

double purity(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);
double trace_norm(const ComplexMatrix& m);

// One-body matrix n_ij = Tr[rho a^dag_j a_i].
ComplexMatrix one_body_matrix(const DensityMatrix& rho);

}  // namespace openqx
