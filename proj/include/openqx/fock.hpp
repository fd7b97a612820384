#pragma once

#include <functional>
#include <map>
#include <vector>

#include "openqx/types.hpp"

namespace openqx {

// Multiset of level occupations (i_1, ..., i_d) labelling the Fock state |I>.
// The canonical sequence (1^{i_1}, ..., d^{i_d}) is implied; all fermionic
// sign conventions are defined against that nondecreasing order.
struct OccupationSequence {
  std::vector<int> counts;

  OccupationSequence() = default;
  explicit OccupationSequence(std::vector<int> c) : counts(std::move(c)) {}

  int levels() const { return static_cast<int>(counts.size()); }
  int total() const;
  bool operator==(const OccupationSequence& other) const {
    return counts == other.counts;
  }
};

double factorial(int n);
double binomial(int n, int k);

// sqrt(i_1! ... i_d!), the Fock normalization of |I>.
double normalization(const OccupationSequence& seq);

// Ryser's formula with Gray-code updates, O(2^n n). Hard size guard at
// n <= 24 so runaway replicated dimensions fail loudly. perm of 0x0 is 1.
Complex permanent(const ComplexMatrix& m);

// LU determinant; det of the empty matrix is 1 (needed when I' is empty).
Complex determinant(const ComplexMatrix& m);

// A~_{J',I'}: take cols[n] copies of the nth column of a, then rows[n] copies
// of the nth row. Requires total(rows) == total(cols).
ComplexMatrix build_submatrix(const ComplexMatrix& a,
                              const OccupationSequence& rows,
                              const OccupationSequence& cols);

// permanent for bosons, determinant for fermions.
Complex matrix_function(const ComplexMatrix& m, Statistics statistics);

// One way of choosing a subsequence I' out of I together with its complement.
// For bosons `weight` counts the number of element choices producing these
// counts (prod_n C(i_n, i'_n)); for fermions it is the merge sign
// delta^I_{I' Ibar'} = +/-1.
struct Subsequence {
  OccupationSequence chosen;
  OccupationSequence complement;
  double weight = 1.0;
};

void for_each_subsequence(const OccupationSequence& seq, Statistics statistics,
                          const std::function<void(const Subsequence&)>& fn);

// Streams every pair (I' from I, J' from J) with total(I') == total(J'),
// each exactly once, carrying the combined boson multiplicity / fermion sign.
void for_each_split_pair(
    const OccupationSequence& row_seq, const OccupationSequence& col_seq,
    Statistics statistics,
    const std::function<void(const Subsequence&, const Subsequence&)>& fn);

// Truncated Fock basis: every occupation with total <= n_cap and per-level
// count <= n_max, in deterministic lexicographic order.
class FockBasis {
 public:
  static FockBasis build(int levels, Statistics statistics, int n_cap,
                         int n_max);

  int size() const { return static_cast<int>(states_.size()); }
  int levels() const { return levels_; }
  int n_cap() const { return n_cap_; }
  int n_max() const { return n_max_; }
  Statistics statistics() const { return statistics_; }

  const OccupationSequence& state(int index) const { return states_[index]; }
  // -1 when the occupation lies outside the basis.
  int index_of(const OccupationSequence& seq) const;

  const ComplexMatrix& creation_op(int level) const;
  const ComplexMatrix& annihilation_op(int level) const;
  // a^dag_i a_j over the basis.
  ComplexMatrix transition_op(int i, int j) const;

  std::string label(int index) const;

 private:
  int levels_ = 0;
  int n_cap_ = 0;
  int n_max_ = 0;
  Statistics statistics_ = Statistics::Fermion;
  std::vector<OccupationSequence> states_;
  std::map<std::vector<int>, int> index_;
  std::vector<ComplexMatrix> create_;
  std::vector<ComplexMatrix> annihilate_;
};

}  // namespace openqx
