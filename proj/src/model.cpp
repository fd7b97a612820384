#include "openqx/model.hpp"

#include <cmath>

namespace openqx {

namespace {

void require_hermitian(const ComplexMatrix& m, double tol, const char* what) {
  if (m.rows() != m.cols()) {
    throw ValidationError(std::string(what) + ": matrix must be square");
  }
  if (hermiticity_deviation(m) > tol) {
    throw ValidationError(std::string(what) + ": matrix is not Hermitian");
  }
}

void require_psd(const ComplexMatrix& m, double tol, const char* what) {
  require_hermitian(m, tol, what);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  if (es.eigenvalues().minCoeff() < -tol) {
    throw ValidationError(std::string(what) + ": matrix is not PSD");
  }
}

}  // namespace

SystemModel make_system(const ComplexMatrix& eps_s, Statistics statistics,
                        int n_max) {
  require_hermitian(eps_s, 1e-12, "SystemModel");
  if (eps_s.rows() < 1) throw ValidationError("SystemModel: d >= 1 required");
  if (statistics == Statistics::Fermion) {
    n_max = 1;
  } else if (n_max < 1) {
    throw ValidationError("SystemModel: n_max >= 1 required");
  }
  return SystemModel{hermitize(eps_s), statistics, n_max};
}

BathConfig make_bath(double beta, double mu, double regularization_eta) {
  if (!(beta > 0.0)) throw ValidationError("BathConfig: beta must be positive");
  if (!(regularization_eta > 0.0)) {
    throw ValidationError("BathConfig: regularization_eta must be positive");
  }
  return BathConfig{beta, mu, regularization_eta};
}

int SpectralDensity::dimension() const {
  switch (kind) {
    case SpectralKind::LorentzianSum:
      return static_cast<int>(lorentzians.front().amplitude.rows());
    case SpectralKind::OhmicExpCutoff:
      return static_cast<int>(ohmic_amplitude.rows());
    case SpectralKind::WideBand:
      return static_cast<int>(wideband_amplitude.rows());
    case SpectralKind::DiscreteModes:
      return static_cast<int>(mode_couplings.rows());
  }
  return 0;
}

double SpectralDensity::bandwidth() const {
  return support_max - support_min;
}

SpectralDensity lorentzian_density(std::vector<LorentzianTerm> terms,
                                   double support_min, double support_max) {
  if (terms.empty()) throw ValidationError("lorentzian_density: no terms");
  if (!(support_max > support_min)) {
    throw ValidationError("lorentzian_density: empty support");
  }
  for (const auto& t : terms) {
    require_psd(t.amplitude, 1e-12, "LorentzianTerm.amplitude");
    if (!(t.width > 0.0)) throw ValidationError("LorentzianTerm: width > 0");
  }
  SpectralDensity jd;
  jd.kind = SpectralKind::LorentzianSum;
  jd.lorentzians = std::move(terms);
  jd.support_min = support_min;
  jd.support_max = support_max;
  return jd;
}

SpectralDensity ohmic_density(const ComplexMatrix& amplitude, double cutoff,
                              double support_max) {
  require_psd(amplitude, 1e-12, "ohmic amplitude");
  if (!(cutoff > 0.0)) throw ValidationError("ohmic_density: cutoff > 0");
  if (!(support_max > 0.0)) throw ValidationError("ohmic_density: support_max > 0");
  SpectralDensity jd;
  jd.kind = SpectralKind::OhmicExpCutoff;
  jd.ohmic_amplitude = amplitude;
  jd.ohmic_cutoff = cutoff;
  jd.support_min = 0.0;
  jd.support_max = support_max;
  return jd;
}

SpectralDensity wideband_density(const ComplexMatrix& amplitude,
                                 double support_min, double support_max) {
  require_psd(amplitude, 1e-12, "wideband amplitude");
  if (!(support_max > support_min)) {
    throw ValidationError("wideband_density: empty support");
  }
  SpectralDensity jd;
  jd.kind = SpectralKind::WideBand;
  jd.wideband_amplitude = amplitude;
  jd.support_min = support_min;
  jd.support_max = support_max;
  return jd;
}

SpectralDensity discrete_density(const RealVector& energies,
                                 const ComplexMatrix& couplings) {
  if (energies.size() != couplings.cols()) {
    throw ValidationError("discrete_density: one coupling column per mode");
  }
  SpectralDensity jd;
  jd.kind = SpectralKind::DiscreteModes;
  jd.mode_energies = energies;
  jd.mode_couplings = couplings;
  if (energies.size() > 0) {
    jd.support_min = energies.minCoeff();
    jd.support_max = energies.maxCoeff();
  }
  return jd;
}

double occupation(const BathConfig& bath, Statistics statistics, double eps) {
  const double x = eps - bath.mu;
  if (statistics == Statistics::Boson) {
    if (x <= 0.0) {
      throw std::domain_error(
          "occupation: bosonic distribution requires eps > mu");
    }
    if (std::isinf(bath.beta)) return 0.0;
    return 1.0 / std::expm1(bath.beta * x);
  }
  if (std::isinf(bath.beta)) {
    if (x > 0.0) return 0.0;
    if (x < 0.0) return 1.0;
    return 0.5;
  }
  // exp overflow saturates to +inf, giving the correct 0 limit.
  return 1.0 / (std::exp(bath.beta * x) + 1.0);
}

ComplexMatrix occupation_matrix(const BathConfig& bath, Statistics statistics,
                                const ComplexMatrix& herm) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(herm));
  RealVector vals = es.eigenvalues();
  ComplexVector f(vals.size());
  for (int i = 0; i < vals.size(); ++i) {
    f(i) = occupation(bath, statistics, vals(i));
  }
  return es.eigenvectors() * f.asDiagonal() * es.eigenvectors().adjoint();
}

SpectralDensity scale_density(const SpectralDensity& jd, double factor) {
  if (!(factor >= 0.0)) throw ValidationError("scale_density: factor >= 0");
  SpectralDensity out = jd;
  for (auto& term : out.lorentzians) term.amplitude *= factor;
  if (out.ohmic_amplitude.size()) out.ohmic_amplitude *= factor;
  if (out.wideband_amplitude.size()) out.wideband_amplitude *= factor;
  if (out.mode_couplings.size()) out.mode_couplings *= std::sqrt(factor);
  return out;
}

ComplexMatrix evaluate_spectral_density(const SpectralDensity& jd, double eps) {
  if (jd.kind == SpectralKind::DiscreteModes) {
    throw ValidationError(
        "evaluate_spectral_density: discrete-mode density has no pointwise "
        "value; use the mode list");
  }
  const int d = jd.dimension();
  if (eps < jd.support_min || eps > jd.support_max) {
    return ComplexMatrix::Zero(d, d);
  }
  switch (jd.kind) {
    case SpectralKind::LorentzianSum: {
      ComplexMatrix out = ComplexMatrix::Zero(d, d);
      for (const auto& t : jd.lorentzians) {
        const double de = eps - t.center;
        out += t.amplitude * (t.width * t.width / (de * de + t.width * t.width));
      }
      return out;
    }
    case SpectralKind::OhmicExpCutoff:
      return jd.ohmic_amplitude * (eps * std::exp(-eps / jd.ohmic_cutoff));
    case SpectralKind::WideBand:
      return jd.wideband_amplitude;
    case SpectralKind::DiscreteModes:
      break;
  }
  return ComplexMatrix::Zero(d, d);
}

}  // namespace openqx
