// SPDX-License-Identifier: Apache-2.0

#ifndef QUADSIM_SYMBOLIZER_LINALG_HPP
#define QUADSIM_SYMBOLIZER_LINALG_HPP

#include <cstddef>
#include <vector>

#include "core/rng.hpp"

namespace quadsim {

// Dense row-major square matrix, just enough for the mapping bank.
struct SquareMatrix {
  int n = 0;
  std::vector<double> a;  // n * n, row-major

  SquareMatrix() = default;
  explicit SquareMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }
};

// Orthogonal factor of the Householder QR of a seeded Gaussian matrix.
// Deterministic for a given stream state.
SquareMatrix random_orthogonal(int n, SeededStream rng);

// max_ij |Q Q^T - I|.
double orthogonality_error(const SquareMatrix& q);

// y = rows [0, k) of M times x (x has length M.n).
std::vector<double> multiply_top_rows(const SquareMatrix& m, int k,
                                      const std::vector<double>& x);

// y = (rows [0, k) of M)^T times r (r has length k); output length M.n.
std::vector<double> multiply_top_rows_transposed(const SquareMatrix& m, int k,
                                                 const std::vector<double>& r);

}  // namespace quadsim

#endif
