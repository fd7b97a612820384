#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "openqx/fock.hpp"
#include "test_support.hpp"

using namespace openqx;
using namespace openqx::testing;

TEST_CASE("permanent matches the Leibniz expansion on random matrices") {
  for (int n = 0; n <= 6; ++n) {
    for (int rep = 0; rep < 20; ++rep) {
      const ComplexMatrix m = random_matrix(n, n);
      const Complex fast = permanent(m);
      const Complex slow = naive_permanent(m);
      CHECK(std::abs(fast - slow) <=
            1e-10 * std::max(1.0, std::abs(slow)));
    }
  }
}

TEST_CASE("permanent special values") {
  CHECK(permanent(ComplexMatrix::Identity(3, 3)) == Complex(1.0, 0.0));
  CHECK(std::abs(permanent(ComplexMatrix::Ones(2, 2)) - 2.0) < 1e-14);
  for (int n = 1; n <= 6; ++n) {
    CHECK(std::abs(permanent(ComplexMatrix::Ones(n, n)) - factorial(n)) <
          1e-9 * factorial(n));
  }
  CHECK(permanent(ComplexMatrix(0, 0)) == Complex(1.0, 0.0));
}

TEST_CASE("permanent is multilinear in rows") {
  ComplexMatrix m = random_matrix(4, 4);
  const Complex base = permanent(m);
  ComplexMatrix scaled = m;
  scaled.row(2) *= Complex(2.5, -0.5);
  CHECK(std::abs(permanent(scaled) - Complex(2.5, -0.5) * base) < 1e-10);
  scaled.row(2).setZero();
  CHECK(std::abs(permanent(scaled)) < 1e-14);
}

TEST_CASE("permanent size guard") {
  CHECK_THROWS_AS(permanent(ComplexMatrix::Zero(25, 25)), ValidationError);
}

TEST_CASE("determinant matches cofactor expansion") {
  CHECK(determinant(ComplexMatrix(0, 0)) == Complex(1.0, 0.0));
  CHECK(std::abs(determinant(ComplexMatrix::Identity(4, 4)) - 1.0) < 1e-14);
  for (int rep = 0; rep < 10; ++rep) {
    const ComplexMatrix m = random_matrix(4, 4);
    CHECK(std::abs(determinant(m) - naive_determinant(m)) < 1e-10);
  }
}

TEST_CASE("build_submatrix replicates rows and columns") {
  ComplexMatrix a = random_matrix(2, 2);
  SUBCASE("single entry") {
    OccupationSequence one({1, 0});
    const ComplexMatrix sub = build_submatrix(a, one, one);
    REQUIRE(sub.rows() == 1);
    CHECK(sub(0, 0) == a(0, 0));
  }
  SUBCASE("boson replication (2,0) x (1,1)") {
    const ComplexMatrix sub =
        build_submatrix(a, OccupationSequence({2, 0}), OccupationSequence({1, 1}));
    REQUIRE(sub.rows() == 2);
    CHECK(sub(0, 0) == a(0, 0));
    CHECK(sub(0, 1) == a(0, 1));
    CHECK(sub(1, 0) == a(0, 0));
    CHECK(sub(1, 1) == a(0, 1));
    // Symbolic expansion of the (alpha* A alpha)^2 coefficient: the permanent
    // of the replicated block is 2 a11 a12.
    CHECK(std::abs(permanent(sub) - 2.0 * a(0, 0) * a(0, 1)) < 1e-12);
  }
  SUBCASE("total mismatch throws") {
    CHECK_THROWS_AS(build_submatrix(a, OccupationSequence({2, 0}),
                                    OccupationSequence({1, 0})),
                    ValidationError);
  }
}

TEST_CASE("identity collapse to factorials (blocks of ones)") {
  // For A = I and I = J the replicated matrix is block-diagonal with blocks
  // of ones, so the permanent is i_1! ... i_d! and the determinant is 1 for
  // 0/1 counts.
  for (int d = 1; d <= 3; ++d) {
    std::vector<int> counts(d, 0);
    std::function<void(int)> walk = [&](int level) {
      if (level == d) {
        OccupationSequence occ(counts);
        const ComplexMatrix sub =
            build_submatrix(ComplexMatrix::Identity(d, d), occ, occ);
        double expect = 1.0;
        for (int c : counts) expect *= factorial(c);
        CHECK(std::abs(permanent(sub) - expect) < 1e-9 * expect);
        return;
      }
      for (int c = 0; c <= 3; ++c) {
        counts[level] = c;
        walk(level + 1);
      }
    };
    walk(0);
  }
  for (int d = 1; d <= 4; ++d) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<int> counts(d);
      for (int n = 0; n < d; ++n) counts[n] = (mask >> n) & 1;
      OccupationSequence occ(counts);
      const ComplexMatrix sub =
          build_submatrix(ComplexMatrix::Identity(d, d), occ, occ);
      CHECK(std::abs(determinant(sub) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("fermion merge sign equals brute-force permutation parity") {
  for (int d = 1; d <= 4; ++d) {
    for (int mask = 0; mask < (1 << d); ++mask) {
      std::vector<int> counts(d);
      for (int n = 0; n < d; ++n) counts[n] = (mask >> n) & 1;
      for_each_subsequence(
          OccupationSequence(counts), Statistics::Fermion,
          [&](const Subsequence& split) {
            std::vector<int> labels;
            for (int n = 0; n < d; ++n) {
              if (split.chosen.counts[n]) labels.push_back(n);
            }
            for (int n = 0; n < d; ++n) {
              if (split.complement.counts[n]) labels.push_back(n);
            }
            CHECK(split.weight == permutation_parity(labels));
          });
    }
  }
}

TEST_CASE("split enumeration counts and weights") {
  SUBCASE("empty sequence yields the single empty pair") {
    int count = 0;
    for_each_split_pair(OccupationSequence({0, 0}), OccupationSequence({0, 0}),
                        Statistics::Boson,
                        [&](const Subsequence& a, const Subsequence& b) {
                          ++count;
                          CHECK(a.weight == 1.0);
                          CHECK(b.weight == 1.0);
                          CHECK(a.chosen.total() == 0);
                        });
    CHECK(count == 1);
  }
  SUBCASE("fermion d=2, I=J=(1,1): four equal-total pairs") {
    // Totals 0,1,1,2 per side; 2^2 = 4 subsets each side filtered to equal
    // totals gives 1 + 2*2 + 1 = 6 pairs.
    int count = 0;
    for_each_split_pair(OccupationSequence({1, 1}), OccupationSequence({1, 1}),
                        Statistics::Fermion,
                        [&](const Subsequence&, const Subsequence&) { ++count; });
    CHECK(count == 6);
  }
  SUBCASE("boson d=1, I=J=(2): binomial multiplicities") {
    double weights[3] = {0.0, 0.0, 0.0};
    for_each_split_pair(OccupationSequence({2}), OccupationSequence({2}),
                        Statistics::Boson,
                        [&](const Subsequence& a, const Subsequence& b) {
                          REQUIRE(a.chosen.total() == b.chosen.total());
                          weights[a.chosen.total()] += a.weight * b.weight;
                        });
    CHECK(weights[0] == 1.0);   // C(2,0)^2
    CHECK(weights[1] == 4.0);   // C(2,1)^2
    CHECK(weights[2] == 1.0);   // C(2,2)^2
  }
  SUBCASE("pair count is the product of per-total counts") {
    const OccupationSequence row({2, 1});
    const OccupationSequence col({1, 2});
    std::map<int, int> row_count, col_count;
    for_each_subsequence(row, Statistics::Boson, [&](const Subsequence& s) {
      ++row_count[s.chosen.total()];
    });
    for_each_subsequence(col, Statistics::Boson, [&](const Subsequence& s) {
      ++col_count[s.chosen.total()];
    });
    long expected = 0;
    for (const auto& [total, count] : row_count) {
      if (col_count.count(total)) expected += long(count) * col_count[total];
    }
    long seen = 0;
    for_each_split_pair(row, col, Statistics::Boson,
                        [&](const Subsequence&, const Subsequence&) { ++seen; });
    CHECK(seen == expected);
  }
}

TEST_CASE("Fock basis ordering, size, and ladder operators") {
  SUBCASE("fermion basis size is sum of binomials") {
    for (int d = 1; d <= 4; ++d) {
      const FockBasis basis = FockBasis::build(d, Statistics::Fermion, d, 1);
      CHECK(basis.size() == (1 << d));
    }
  }
  SUBCASE("lexicographic order is deterministic") {
    const FockBasis basis = FockBasis::build(2, Statistics::Boson, 2, 2);
    REQUIRE(basis.size() == 6);
    CHECK(basis.state(0).counts == std::vector<int>({0, 0}));
    CHECK(basis.state(1).counts == std::vector<int>({0, 1}));
    CHECK(basis.state(2).counts == std::vector<int>({0, 2}));
    CHECK(basis.state(3).counts == std::vector<int>({1, 0}));
  }
  SUBCASE("bosonic commutator on interior states") {
    const FockBasis basis = FockBasis::build(1, Statistics::Boson, 6, 6);
    const ComplexMatrix c = basis.creation_op(0);
    const ComplexMatrix a = basis.annihilation_op(0);
    const ComplexMatrix comm = a * c - c * a;
    // Away from the truncation edge the commutator is the identity.
    for (int k = 0; k < basis.size() - 1; ++k) {
      CHECK(std::abs(comm(k, k) - 1.0) < 1e-12);
    }
  }
  SUBCASE("fermionic anticommutators with JW signs") {
    const FockBasis basis = FockBasis::build(3, Statistics::Fermion, 3, 1);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const ComplexMatrix anti = basis.annihilation_op(i) * basis.creation_op(j) +
                                   basis.creation_op(j) * basis.annihilation_op(i);
        const double expect = i == j ? 1.0 : 0.0;
        CHECK(max_abs(anti - expect * ComplexMatrix::Identity(8, 8)) < 1e-12);
        const ComplexMatrix cc = basis.creation_op(i) * basis.creation_op(j) +
                                 basis.creation_op(j) * basis.creation_op(i);
        CHECK(max_abs(cc) < 1e-12);
      }
    }
  }
}
