#include "openqx/fock.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

namespace openqx {

int OccupationSequence::total() const {
  return std::accumulate(counts.begin(), counts.end(), 0);
}

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int j = 1; j <= k; ++j) b = b * (n - k + j) / j;
  return std::round(b);
}

double normalization(const OccupationSequence& seq) {
  double prod = 1.0;
  for (int c : seq.counts) prod *= factorial(c);
  return std::sqrt(prod);
}

Complex permanent(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw ValidationError("permanent: matrix must be square");
  if (n > 24) {
    throw ValidationError("permanent: size " + std::to_string(n) +
                          " exceeds the n <= 24 cost guard");
  }
  if (n == 0) return Complex(1.0, 0.0);

  // Ryser over column subsets; Gray code changes one column per step so the
  // row sums are updated in O(n).
  std::vector<Complex> rowsum(n, Complex(0.0, 0.0));
  Complex total(0.0, 0.0);
  std::uint32_t gray_prev = 0;
  const std::uint64_t count = 1ULL << n;
  for (std::uint64_t k = 1; k < count; ++k) {
    const std::uint32_t gray = static_cast<std::uint32_t>(k ^ (k >> 1));
    const std::uint32_t diff = gray ^ gray_prev;
    const int col = std::countr_zero(diff);
    const double dir = (gray & diff) ? 1.0 : -1.0;
    for (int i = 0; i < n; ++i) rowsum[i] += dir * m(i, col);
    gray_prev = gray;

    Complex prod(1.0, 0.0);
    for (int i = 0; i < n; ++i) prod *= rowsum[i];
    const int bits = std::popcount(gray);
    total += (bits % 2 == 0 ? 1.0 : -1.0) * prod;
  }
  return (n % 2 == 0 ? 1.0 : -1.0) * total;
}

Complex determinant(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (m.cols() != n) throw ValidationError("determinant: matrix must be square");
  if (n == 0) return Complex(1.0, 0.0);
  return Eigen::PartialPivLU<ComplexMatrix>(m).determinant();
}

ComplexMatrix build_submatrix(const ComplexMatrix& a,
                              const OccupationSequence& rows,
                              const OccupationSequence& cols) {
  if (rows.total() != cols.total()) {
    throw ValidationError("build_submatrix: row and column totals differ");
  }
  std::vector<int> row_levels, col_levels;
  for (int n = 0; n < rows.levels(); ++n) {
    row_levels.insert(row_levels.end(), rows.counts[n], n);
  }
  for (int n = 0; n < cols.levels(); ++n) {
    col_levels.insert(col_levels.end(), cols.counts[n], n);
  }
  const int size = static_cast<int>(row_levels.size());
  ComplexMatrix out(size, size);
  for (int r = 0; r < size; ++r) {
    for (int c = 0; c < size; ++c) {
      out(r, c) = a(row_levels[r], col_levels[c]);
    }
  }
  return out;
}

Complex matrix_function(const ComplexMatrix& m, Statistics statistics) {
  return statistics == Statistics::Boson ? permanent(m) : determinant(m);
}

namespace {

// Sign of reordering the concatenation (chosen, complement) into the sorted
// canonical sequence: each complement element of level n crossed by a chosen
// element of a higher level contributes one inversion.
double merge_sign(const std::vector<int>& chosen,
                  const std::vector<int>& complement) {
  long inversions = 0;
  long lower_complement = 0;
  for (size_t n = 0; n < chosen.size(); ++n) {
    inversions += chosen[n] * lower_complement;
    lower_complement += complement[n];
  }
  return (inversions % 2 == 0) ? 1.0 : -1.0;
}

}  // namespace

void for_each_subsequence(const OccupationSequence& seq, Statistics statistics,
                          const std::function<void(const Subsequence&)>& fn) {
  const int d = seq.levels();
  std::vector<int> chosen(d, 0);
  // Odometer over chosen counts 0..i_n per level.
  for (;;) {
    Subsequence split;
    split.chosen = OccupationSequence(chosen);
    std::vector<int> complement(d);
    double weight = 1.0;
    for (int n = 0; n < d; ++n) {
      complement[n] = seq.counts[n] - chosen[n];
      if (statistics == Statistics::Boson) {
        weight *= binomial(seq.counts[n], chosen[n]);
      }
    }
    if (statistics == Statistics::Fermion) {
      weight = merge_sign(chosen, complement);
    }
    split.complement = OccupationSequence(std::move(complement));
    split.weight = weight;
    fn(split);

    int level = d - 1;
    while (level >= 0 && chosen[level] == seq.counts[level]) {
      chosen[level] = 0;
      --level;
    }
    if (level < 0) break;
    ++chosen[level];
  }
}

void for_each_split_pair(
    const OccupationSequence& row_seq, const OccupationSequence& col_seq,
    Statistics statistics,
    const std::function<void(const Subsequence&, const Subsequence&)>& fn) {
  // Stratify one side by total so only equal-total pairs are visited.
  std::map<int, std::vector<Subsequence>> by_total;
  for_each_subsequence(col_seq, statistics, [&](const Subsequence& s) {
    by_total[s.chosen.total()].push_back(s);
  });
  for_each_subsequence(row_seq, statistics, [&](const Subsequence& row_split) {
    auto it = by_total.find(row_split.chosen.total());
    if (it == by_total.end()) return;
    for (const Subsequence& col_split : it->second) {
      fn(row_split, col_split);
    }
  });
}

FockBasis FockBasis::build(int levels, Statistics statistics, int n_cap,
                           int n_max) {
  if (levels < 1) throw ValidationError("FockBasis: levels >= 1");
  if (n_cap < 0 || n_max < 1) throw ValidationError("FockBasis: bad caps");
  if (statistics == Statistics::Fermion) n_max = 1;

  FockBasis basis;
  basis.levels_ = levels;
  basis.statistics_ = statistics;
  basis.n_cap_ = n_cap;
  basis.n_max_ = n_max;

  std::vector<int> counts(levels, 0);
  std::function<void(int, int)> fill = [&](int level, int used) {
    if (level == levels) {
      basis.states_.emplace_back(counts);
      return;
    }
    const int room = std::min(n_max, n_cap - used);
    for (int c = 0; c <= room; ++c) {
      counts[level] = c;
      fill(level + 1, used + c);
    }
    counts[level] = 0;
  };
  fill(0, 0);
  std::sort(basis.states_.begin(), basis.states_.end(),
            [](const OccupationSequence& a, const OccupationSequence& b) {
              return a.counts < b.counts;
            });
  for (int i = 0; i < basis.size(); ++i) {
    basis.index_[basis.states_[i].counts] = i;
  }

  const int dim = basis.size();
  basis.create_.assign(levels, ComplexMatrix::Zero(dim, dim));
  basis.annihilate_.assign(levels, ComplexMatrix::Zero(dim, dim));
  for (int idx = 0; idx < dim; ++idx) {
    const auto& state = basis.states_[idx];
    for (int level = 0; level < levels; ++level) {
      const int occ = state.counts[level];
      double phase = 1.0;
      if (statistics == Statistics::Fermion) {
        int below = 0;
        for (int n = 0; n < level; ++n) below += state.counts[n];
        phase = (below % 2 == 0) ? 1.0 : -1.0;
      }
      if (occ < n_max && state.total() < n_cap) {
        OccupationSequence up = state;
        up.counts[level] += 1;
        auto it = basis.index_.find(up.counts);
        if (it != basis.index_.end()) {
          basis.create_[level](it->second, idx) =
              phase * std::sqrt(static_cast<double>(occ + 1));
        }
      }
      if (occ > 0) {
        OccupationSequence down = state;
        down.counts[level] -= 1;
        auto it = basis.index_.find(down.counts);
        if (it != basis.index_.end()) {
          basis.annihilate_[level](it->second, idx) =
              phase * std::sqrt(static_cast<double>(occ));
        }
      }
    }
  }
  return basis;
}

int FockBasis::index_of(const OccupationSequence& seq) const {
  auto it = index_.find(seq.counts);
  return it == index_.end() ? -1 : it->second;
}

const ComplexMatrix& FockBasis::creation_op(int level) const {
  return create_.at(level);
}

const ComplexMatrix& FockBasis::annihilation_op(int level) const {
  return annihilate_.at(level);
}

ComplexMatrix FockBasis::transition_op(int i, int j) const {
  return create_.at(i) * annihilate_.at(j);
}

std::string FockBasis::label(int index) const {
  std::ostringstream os;
  os << "|";
  const auto& counts = states_.at(index).counts;
  for (size_t n = 0; n < counts.size(); ++n) {
    if (n) os << ",";
    os << counts[n];
  }
  os << ">";
  return os.str();
}

}  // namespace openqx
