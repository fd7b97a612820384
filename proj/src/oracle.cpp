#include "openqx/oracle.hpp"

#include <bit>
#include <cmath>
#include <numbers>

namespace openqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitize(m));
  RealVector vals = es.eigenvalues();
  for (int i = 0; i < vals.size(); ++i) {
    if (vals(i) < -1e-12) {
      throw ValidationError("discretize: spectral density cell is not PSD");
    }
    vals(i) = std::sqrt(std::max(vals(i), 0.0));
  }
  return es.eigenvectors() * vals.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

ComplexMatrix assemble_eps_tot(const ComplexMatrix& eps_s,
                               const RealVector& energies,
                               const ComplexMatrix& couplings) {
  const int d = static_cast<int>(eps_s.rows());
  const int m = static_cast<int>(energies.size());
  ComplexMatrix tot = ComplexMatrix::Zero(d + m, d + m);
  tot.topLeftCorner(d, d) = eps_s;
  tot.topRightCorner(d, m) = couplings;
  tot.bottomLeftCorner(m, d) = couplings.adjoint();
  for (int k = 0; k < m; ++k) tot(d + k, d + k) = energies(k);
  return tot;
}

}  // namespace

double DiscretizedBath::recurrence_time() const {
  if (modes() < 2) return std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  RealVector sorted = energies;
  std::sort(sorted.data(), sorted.data() + sorted.size());
  for (int k = 1; k < sorted.size(); ++k) {
    const double gap = sorted(k) - sorted(k - 1);
    if (gap > 1e-12) min_gap = std::min(min_gap, gap);
  }
  return 0.8 * kTwoPi / min_gap;
}

DiscretizedBath discretize(const SystemModel& model, const SpectralDensity& jd,
                           int cells) {
  if (cells < 2) throw ValidationError("discretize: N >= 2 cells required");
  if (jd.kind == SpectralKind::DiscreteModes) {
    throw ValidationError("discretize: density is already discrete");
  }
  const int d = model.dimension();
  const double de = jd.bandwidth() / cells;

  DiscretizedBath db;
  db.system_dim = d;
  db.energies = RealVector(cells * d);
  db.couplings = ComplexMatrix::Zero(d, cells * d);
  for (int c = 0; c < cells; ++c) {
    const double e = jd.support_min + (c + 0.5) * de;
    const ComplexMatrix w =
        psd_sqrt(evaluate_spectral_density(jd, e) * (de / kTwoPi));
    for (int ch = 0; ch < d; ++ch) {
      db.energies(c * d + ch) = e;
      db.couplings.col(c * d + ch) = w.col(ch);
    }
  }
  db.eps_tot = assemble_eps_tot(model.eps_s, db.energies, db.couplings);
  return db;
}

DiscretizedBath bath_from_modes(const SystemModel& model,
                                const SpectralDensity& jd) {
  if (jd.kind != SpectralKind::DiscreteModes) {
    throw ValidationError("bath_from_modes: discrete-mode density required");
  }
  DiscretizedBath db;
  db.system_dim = model.dimension();
  db.energies = jd.mode_energies;
  db.couplings = jd.mode_couplings;
  db.eps_tot = assemble_eps_tot(model.eps_s, db.energies, db.couplings);
  return db;
}

SpectralDensity to_spectral_density(const DiscretizedBath& db) {
  return discrete_density(db.energies, db.couplings);
}

TotalPropagator::TotalPropagator(const DiscretizedBath& db)
    : d_(db.system_dim), bath_energies_(db.energies) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(db.eps_tot);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

ComplexMatrix TotalPropagator::full(double t) const {
  ComplexVector phases(evals_.size());
  for (int i = 0; i < evals_.size(); ++i) {
    phases(i) = std::exp(Complex(0.0, -evals_(i) * t));
  }
  return evecs_ * phases.asDiagonal() * evecs_.adjoint();
}

ComplexMatrix TotalPropagator::system_block(double t) const {
  return full(t).topLeftCorner(d_, d_);
}

ComplexMatrix TotalPropagator::exchange_block(double t) const {
  return full(t).topRightCorner(d_, bath_energies_.size());
}

ComplexMatrix TotalPropagator::environment_system_block(double t) const {
  return full(t).bottomLeftCorner(bath_energies_.size(), d_);
}

ComplexMatrix TotalPropagator::oracle_v(const BathConfig& bath,
                                        Statistics statistics,
                                        double t) const {
  const ComplexMatrix u_se = exchange_block(t);
  ComplexVector f(bath_energies_.size());
  for (int k = 0; k < bath_energies_.size(); ++k) {
    f(k) = occupation(bath, statistics, bath_energies_(k));
  }
  return hermitize(u_se * f.asDiagonal() * u_se.adjoint());
}

namespace {

inline double jw_phase(std::uint32_t mask, int mode) {
  const std::uint32_t below = mask & ((1u << mode) - 1u);
  return (std::popcount(below) % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

ManyBodyOracle::ManyBodyOracle(const DiscretizedBath& db,
                               const BathConfig& bath,
                               const FockBasis& system_basis)
    : d_(db.system_dim),
      total_modes_(db.system_dim + db.modes()),
      system_basis_(system_basis) {
  if (system_basis.statistics() != Statistics::Fermion) {
    throw ValidationError("ManyBodyOracle: fermionic instances only");
  }
  if (total_modes_ > 14) {
    throw DimensionError("ManyBodyOracle: d + N = " +
                         std::to_string(total_modes_) + " exceeds 14");
  }
  bath_occupation_.resize(db.modes());
  for (int k = 0; k < db.modes(); ++k) {
    bath_occupation_[k] = occupation(bath, Statistics::Fermion, db.energies(k));
  }

  const std::uint32_t dim = 1u << total_modes_;
  sectors_.resize(total_modes_ + 1);
  for (auto& s : sectors_) s.local_index.assign(dim, -1);
  for (std::uint32_t mask = 0; mask < dim; ++mask) {
    Sector& s = sectors_[std::popcount(mask)];
    s.local_index[mask] = static_cast<int>(s.masks.size());
    s.masks.push_back(mask);
  }

  // H = sum_pq (eps_tot)_pq c^dag_p c_q restricted to each number sector.
  for (auto& sector : sectors_) {
    const int dim_s = static_cast<int>(sector.masks.size());
    ComplexMatrix h = ComplexMatrix::Zero(dim_s, dim_s);
    for (int col = 0; col < dim_s; ++col) {
      const std::uint32_t mask = sector.masks[col];
      for (int q = 0; q < total_modes_; ++q) {
        if (!(mask & (1u << q))) continue;
        const std::uint32_t removed = mask ^ (1u << q);
        const double phase_q = jw_phase(mask, q);
        for (int p = 0; p < total_modes_; ++p) {
          if (removed & (1u << p)) continue;
          const std::uint32_t target = removed | (1u << p);
          const double phase_p = jw_phase(removed, p);
          h(sector.local_index[target], col) +=
              db.eps_tot(p, q) * phase_q * phase_p;
        }
      }
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
    sector.evals = es.eigenvalues();
    sector.evecs = es.eigenvectors();
  }
}

DensityMatrix ManyBodyOracle::evolve(const DensityMatrix& rho0,
                                     double t) const {
  const int sys_dim = system_basis_.size();
  const int n_bath = total_modes_ - d_;

  // Map system basis indices to occupation bitmasks.
  std::vector<std::uint32_t> sys_mask(sys_dim);
  for (int i = 0; i < sys_dim; ++i) {
    std::uint32_t mask = 0;
    const auto& counts = system_basis_.state(i).counts;
    for (int n = 0; n < d_; ++n) {
      if (counts[n]) mask |= 1u << n;
    }
    sys_mask[i] = mask;
  }

  ComplexMatrix reduced = ComplexMatrix::Zero(sys_dim, sys_dim);

  for (const Sector& sector : sectors_) {
    const int dim_s = static_cast<int>(sector.masks.size());
    // rho_tot(0) block: system coherences tensored with the diagonal thermal
    // bath weights. Both sides share the bath mask, so no fermionic sign
    // enters as long as particle numbers match (enforced by the sector).
    ComplexMatrix block = ComplexMatrix::Zero(dim_s, dim_s);
    bool nonzero = false;
    for (int a = 0; a < dim_s; ++a) {
      const std::uint32_t mask_a = sector.masks[a];
      const std::uint32_t bath_mask = mask_a >> d_;
      const std::uint32_t sys_a = mask_a & ((1u << d_) - 1u);
      double weight = 1.0;
      for (int k = 0; k < n_bath; ++k) {
        weight *= (bath_mask & (1u << k)) ? bath_occupation_[k]
                                          : 1.0 - bath_occupation_[k];
      }
      if (weight == 0.0) continue;
      for (int b = 0; b < dim_s; ++b) {
        const std::uint32_t mask_b = sector.masks[b];
        if ((mask_b >> d_) != bath_mask) continue;
        const std::uint32_t sys_b = mask_b & ((1u << d_) - 1u);
        int ia = -1, ib = -1;
        for (int i = 0; i < sys_dim; ++i) {
          if (sys_mask[i] == sys_a) ia = i;
          if (sys_mask[i] == sys_b) ib = i;
        }
        if (ia < 0 || ib < 0) continue;
        const Complex val = rho0.mat(ia, ib) * weight;
        if (val != Complex(0.0, 0.0)) {
          block(a, b) = val;
          nonzero = true;
        }
      }
    }
    if (!nonzero) continue;

    // Evolve in the sector eigenbasis, then trace out the bath.
    ComplexMatrix p = sector.evecs.adjoint() * block * sector.evecs;
    for (int a = 0; a < dim_s; ++a) {
      for (int b = 0; b < dim_s; ++b) {
        p(a, b) *= std::exp(Complex(0.0, -(sector.evals(a) - sector.evals(b)) * t));
      }
    }
    ComplexMatrix evolved = sector.evecs * p * sector.evecs.adjoint();

    for (int a = 0; a < dim_s; ++a) {
      const std::uint32_t mask_a = sector.masks[a];
      const std::uint32_t bath_mask = mask_a >> d_;
      const std::uint32_t sys_a = mask_a & ((1u << d_) - 1u);
      int ia = -1;
      for (int i = 0; i < sys_dim; ++i) {
        if (sys_mask[i] == sys_a) ia = i;
      }
      if (ia < 0) continue;
      for (int b = 0; b < dim_s; ++b) {
        const std::uint32_t mask_b = sector.masks[b];
        if ((mask_b >> d_) != bath_mask) continue;
        const std::uint32_t sys_b = mask_b & ((1u << d_) - 1u);
        int ib = -1;
        for (int i = 0; i < sys_dim; ++i) {
          if (sys_mask[i] == sys_b) ib = i;
        }
        if (ib < 0) continue;
        reduced(ia, ib) += evolved(a, b);
      }
    }
  }
  return DensityMatrix(system_basis_, std::move(reduced));
}

}  // namespace openqx
