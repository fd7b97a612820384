#include "openqx/density.hpp"

namespace openqx {

StateAudit audit_state(const DensityMatrix& rho) {
  StateAudit audit;
  audit.trace_deviation = std::abs(rho.mat.trace() - Complex(1.0, 0.0));
  audit.hermiticity = hermiticity_deviation(rho.mat);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(rho.mat));
  audit.min_eigenvalue = es.eigenvalues().minCoeff();
  return audit;
}

DensityMatrix vacuum_state(const FockBasis& basis) {
  return fock_state(basis,
                    OccupationSequence(std::vector<int>(basis.levels(), 0)));
}

DensityMatrix fock_state(const FockBasis& basis,
                         const OccupationSequence& occ) {
  const int idx = basis.index_of(occ);
  if (idx < 0) throw ValidationError("fock_state: occupation outside basis");
  ComplexMatrix m = ComplexMatrix::Zero(basis.size(), basis.size());
  m(idx, idx) = 1.0;
  return DensityMatrix(basis, std::move(m));
}

double purity(const DensityMatrix& rho) {
  return (rho.mat * rho.mat).trace().real();
}

double trace_norm(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return 0.5 * trace_norm(a.mat - b.mat);
}

ComplexMatrix one_body_matrix(const DensityMatrix& rho) {
  const int d = rho.basis.levels();
  ComplexMatrix n(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      n(i, j) = (rho.mat * rho.basis.transition_op(j, i)).trace();
    }
  }
  return n;
}

}  // namespace openqx
