#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "openqx/types.hpp"

namespace openqx::testing {

inline std::mt19937& rng() {
  static std::mt19937 gen(0x5eed);
  return gen;
}

inline Complex random_unit_complex() {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  return Complex(dist(rng()), dist(rng()));
}

inline ComplexMatrix random_matrix(int rows, int cols) {
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = random_unit_complex();
  }
  return m;
}

inline ComplexMatrix random_hermitian(int n) {
  return hermitize(random_matrix(n, n));
}

// Random density matrix supported on the given sectors of a basis size,
// block structure supplied by the caller through `sector_of`.
inline ComplexMatrix random_density(int dim,
                                    const std::vector<int>& sector_of) {
  ComplexMatrix m = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (sector_of[i] == sector_of[j]) m(i, j) = random_unit_complex();
    }
  }
  m = (m * m.adjoint()).eval();  // PSD
  m /= m.trace().real();
  return m;
}

// Leibniz-sum permanent, the independent oracle for Ryser.
inline Complex naive_permanent(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return Complex(1.0, 0.0);
  std::vector<int> cols(n);
  std::iota(cols.begin(), cols.end(), 0);
  Complex sum(0.0, 0.0);
  do {
    Complex prod(1.0, 0.0);
    for (int i = 0; i < n; ++i) prod *= m(i, cols[i]);
    sum += prod;
  } while (std::next_permutation(cols.begin(), cols.end()));
  return sum;
}

// Cofactor-expansion determinant.
inline Complex naive_determinant(const ComplexMatrix& m) {
  const int n = static_cast<int>(m.rows());
  if (n == 0) return Complex(1.0, 0.0);
  if (n == 1) return m(0, 0);
  Complex sum(0.0, 0.0);
  for (int c = 0; c < n; ++c) {
    ComplexMatrix minor(n - 1, n - 1);
    for (int r = 1; r < n; ++r) {
      int cc = 0;
      for (int k = 0; k < n; ++k) {
        if (k == c) continue;
        minor(r - 1, cc++) = m(r, k);
      }
    }
    const double sign = (c % 2 == 0) ? 1.0 : -1.0;
    sum += sign * m(0, c) * naive_determinant(minor);
  }
  return sum;
}

// Parity of a sequence of distinct labels by inversion counting.
inline double permutation_parity(const std::vector<int>& labels) {
  int inversions = 0;
  for (size_t a = 0; a < labels.size(); ++a) {
    for (size_t b = a + 1; b < labels.size(); ++b) {
      if (labels[a] > labels[b]) ++inversions;
    }
  }
  return inversions % 2 == 0 ? 1.0 : -1.0;
}

}  // namespace openqx::testing
