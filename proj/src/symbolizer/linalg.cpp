// SPDX-License-Identifier: Apache-2.0

#include "symbolizer/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace quadsim {

namespace {

// M(k:n, c0:n) -= (2/vnorm2) * v * (v^T M(k:n, c0:n)), row-major friendly:
// one row-sweep for the projections, one for the rank-1 update.
void apply_reflector(SquareMatrix& m, const std::vector<double>& v, int k, int c0,
                     double vnorm2, std::vector<double>& w) {
  const int n = m.n;
  std::fill(w.begin() + c0, w.end(), 0.0);
  for (int i = k; i < n; ++i) {
    const double vi = v[static_cast<std::size_t>(i - k)];
    const double* row = &m.a[static_cast<std::size_t>(i) * n];
    for (int c = c0; c < n; ++c) w[static_cast<std::size_t>(c)] += vi * row[c];
  }
  const double scale = 2.0 / vnorm2;
  for (int i = k; i < n; ++i) {
    const double s = scale * v[static_cast<std::size_t>(i - k)];
    double* row = &m.a[static_cast<std::size_t>(i) * n];
    for (int c = c0; c < n; ++c) row[c] -= s * w[static_cast<std::size_t>(c)];
  }
}

}  // namespace

SquareMatrix random_orthogonal(int n, SeededStream rng) {
  if (n < 1) throw Error("random_orthogonal: n must be >= 1");
  SquareMatrix a(n);
  for (double& v : a.a) v = rng.normal();

  // Householder QR; reflectors kept separately for the Q assembly.
  std::vector<std::vector<double>> reflectors;
  std::vector<double> vnorms(static_cast<std::size_t>(n), 0.0);
  std::vector<double> w(static_cast<std::size_t>(n));
  reflectors.reserve(n);
  for (int k = 0; k < n; ++k) {
    std::vector<double> v(n - k);
    double norm2 = 0.0;
    for (int i = k; i < n; ++i) {
      v[i - k] = a.at(i, k);
      norm2 += v[i - k] * v[i - k];
    }
    double norm = std::sqrt(norm2);
    if (norm == 0.0) {
      // Degenerate column (probability ~0 for Gaussian input); identity step.
      reflectors.push_back(std::vector<double>(n - k, 0.0));
      continue;
    }
    double alpha = v[0] >= 0.0 ? -norm : norm;
    v[0] -= alpha;
    double vnorm2 = 0.0;
    for (double t : v) vnorm2 += t * t;
    if (vnorm2 == 0.0) {
      reflectors.push_back(std::vector<double>(n - k, 0.0));
      continue;
    }
    apply_reflector(a, v, k, k, vnorm2, w);
    vnorms[static_cast<std::size_t>(k)] = vnorm2;
    reflectors.push_back(std::move(v));
  }

  // Q = H_0 H_1 ... H_{n-1}: apply reflectors to the identity in reverse.
  SquareMatrix q(n);
  for (int i = 0; i < n; ++i) q.at(i, i) = 1.0;
  for (int k = n - 1; k >= 0; --k) {
    if (vnorms[static_cast<std::size_t>(k)] == 0.0) continue;
    apply_reflector(q, reflectors[static_cast<std::size_t>(k)], k, 0,
                    vnorms[static_cast<std::size_t>(k)], w);
  }
  return q;
}

double orthogonality_error(const SquareMatrix& q) {
  double worst = 0.0;
  for (int r = 0; r < q.n; ++r) {
    for (int c = 0; c < q.n; ++c) {
      double dot = 0.0;
      for (int k = 0; k < q.n; ++k) dot += q.at(r, k) * q.at(c, k);
      double err = std::fabs(dot - (r == c ? 1.0 : 0.0));
      if (err > worst) worst = err;
    }
  }
  return worst;
}

std::vector<double> multiply_top_rows(const SquareMatrix& m, int k,
                                      const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != m.n) throw Error("multiply_top_rows: size mismatch");
  if (k < 0 || k > m.n) throw Error("multiply_top_rows: bad row count");
  std::vector<double> y(static_cast<std::size_t>(k), 0.0);
  for (int r = 0; r < k; ++r) {
    double acc = 0.0;
    const double* row = &m.a[static_cast<std::size_t>(r) * m.n];
    for (int c = 0; c < m.n; ++c) acc += row[c] * x[static_cast<std::size_t>(c)];
    y[static_cast<std::size_t>(r)] = acc;
  }
  return y;
}

std::vector<double> multiply_top_rows_transposed(const SquareMatrix& m, int k,
                                                 const std::vector<double>& r) {
  if (static_cast<int>(r.size()) != k) throw Error("multiply_top_rows_transposed: size mismatch");
  if (k < 0 || k > m.n) throw Error("multiply_top_rows_transposed: bad row count");
  std::vector<double> y(static_cast<std::size_t>(m.n), 0.0);
  for (int row = 0; row < k; ++row) {
    double rv = r[static_cast<std::size_t>(row)];
    const double* mrow = &m.a[static_cast<std::size_t>(row) * m.n];
    for (int c = 0; c < m.n; ++c) y[static_cast<std::size_t>(c)] += mrow[c] * rv;
  }
  return y;
}

}  // namespace quadsim
