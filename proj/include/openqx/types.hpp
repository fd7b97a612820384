#pragma once

#include <Eigen/Dense>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace openqx {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kImag{0.0, 1.0};

// Marker for zero temperature; occupation functions switch to step/zero forms.
inline constexpr double kBetaInfinity = std::numeric_limits<double>::infinity();

enum class Statistics { Boson, Fermion };

// +1 for bosons, -1 for fermions: the sign in 1 +/- v, f(e) = 1/(e^{b(e-mu)} -/+ 1).
inline double statistics_sign(Statistics s) {
  return s == Statistics::Boson ? 1.0 : -1.0;
}

inline std::string to_string(Statistics s) {
  return s == Statistics::Boson ? "boson" : "fermion";
}

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RootSearchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NyquistError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Largest |entry| of a matrix; the norm used for most tolerance statements.
inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_deviation(const ComplexMatrix& m) {
  return max_abs(m - m.adjoint());
}

inline ComplexMatrix hermitize(const ComplexMatrix& m) {
  return 0.5 * (m + m.adjoint());
}

// exp(-i H t) for Hermitian H.
inline ComplexMatrix unitary_phase(const ComplexMatrix& herm, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm);
  ComplexVector phases(es.eigenvalues().size());
  for (int i = 0; i < phases.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -es.eigenvalues()(i) * t));
  }
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

inline double operator_norm(const ComplexMatrix& m) {
  return m.jacobiSvd().singularValues()(0);
}

}  // namespace openqx
