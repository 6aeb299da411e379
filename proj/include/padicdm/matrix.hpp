#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "padicdm/series.hpp"

namespace padicdm {

// Row-major matrix of series sharing one center and variable.
using SeriesMatrix = std::vector<std::vector<TruncatedSeries>>;
using SeriesVector = std::vector<TruncatedSeries>;

inline bool is_exact_zero(const TruncatedSeries& f) {
  return std::all_of(f.coeffs().begin(), f.coeffs().end(),
                     [](const PadicScalar& x) { return x.is_exact_zero(); });
}

inline int rows(const SeriesMatrix& m) { return static_cast<int>(m.size()); }
inline int cols(const SeriesMatrix& m) { return m.empty() ? 0 : static_cast<int>(m.front().size()); }

inline int matrix_order(const SeriesMatrix& m) {
  int n = 1 << 30;
  for (const auto& row : m)
    for (const auto& x : row) n = std::min(n, x.order());
  return n;
}

inline SeriesMatrix identity_matrix(int n, const PadicScalar& center, int N, const std::string& var) {
  SeriesMatrix m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[i].push_back(TruncatedSeries::constant(scalar(center.field(), i == j ? 1 : 0), center, N, var));
  return m;
}

inline SeriesMatrix zero_matrix(int r, int c, const PadicScalar& center, int N, const std::string& var) {
  return SeriesMatrix(static_cast<std::size_t>(r),
                      SeriesVector(static_cast<std::size_t>(c), TruncatedSeries::zero(center, N, var)));
}

inline SeriesMatrix transpose(const SeriesMatrix& m) {
  SeriesMatrix t(static_cast<std::size_t>(cols(m)));
  for (int j = 0; j < cols(m); ++j)
    for (int i = 0; i < rows(m); ++i) t[j].push_back(m[i][j]);
  return t;
}

inline SeriesMatrix negate(const SeriesMatrix& m) {
  SeriesMatrix r = m;
  for (auto& row : r)
    for (auto& x : row) x = -x;
  return r;
}

inline SeriesMatrix add(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (rows(a) != rows(b) || cols(a) != cols(b))
    throw Error(Errc::DimensionMismatch, "matrix sum shapes differ");
  SeriesMatrix r = a;
  for (int i = 0; i < rows(a); ++i)
    for (int j = 0; j < cols(a); ++j) r[i][j] = a[i][j] + b[i][j];
  return r;
}

inline SeriesMatrix multiply(const SeriesMatrix& a, const SeriesMatrix& b) {
  if (cols(a) != rows(b)) throw Error(Errc::DimensionMismatch, "matrix product shapes differ");
  const TruncatedSeries& ref = a[0][0];
  int n = std::min(matrix_order(a), matrix_order(b));
  SeriesMatrix r = zero_matrix(rows(a), cols(b), ref.center(), n, ref.var());
  for (int i = 0; i < rows(a); ++i)
    for (int k = 0; k < cols(a); ++k) {
      if (is_exact_zero(a[i][k])) continue;
      for (int j = 0; j < cols(b); ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

inline SeriesVector mat_vec(const SeriesMatrix& a, const SeriesVector& v) {
  SeriesMatrix col(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) col[i].push_back(v[i]);
  SeriesMatrix r = multiply(a, col);
  SeriesVector out;
  for (auto& row : r) out.push_back(row[0]);
  return out;
}

inline SeriesMatrix derivative(const SeriesMatrix& m) {
  SeriesMatrix r = m;
  for (auto& row : r)
    for (auto& x : row) x = derivative(x);
  return r;
}

inline SeriesMatrix truncated(const SeriesMatrix& m, int n) {
  SeriesMatrix r = m;
  for (auto& row : r)
    for (auto& x : row) x = x.truncated(n);
  return r;
}

// Gauss-Jordan over the series ring; pivots on the smallest constant-term
// valuation. Returns nullopt when some pivot column has no invertible entry.
inline std::optional<SeriesMatrix> try_inverse(const SeriesMatrix& m) {
  const int n = rows(m);
  if (n != cols(m)) throw Error(Errc::DimensionMismatch, "inverse of a non-square matrix");
  const TruncatedSeries& ref = m[0][0];
  const int N = matrix_order(m);
  SeriesMatrix a = truncated(m, N);
  SeriesMatrix inv = identity_matrix(n, ref.center(), N, ref.var());
  for (int c = 0; c < n; ++c) {
    int piv = -1;
    for (int r = c; r < n; ++r) {
      const PadicScalar& x = a[r][c][0];
      if (x.is_zero()) continue;
      if (piv < 0 || x.valuation_ticks() < a[piv][c][0].valuation_ticks()) piv = r;
    }
    if (piv < 0) return std::nullopt;
    std::swap(a[piv], a[c]);
    std::swap(inv[piv], inv[c]);
    TruncatedSeries s = mult_inverse(a[c][c]);
    for (int j = 0; j < n; ++j) {
      a[c][j] = a[c][j] * s;
      inv[c][j] = inv[c][j] * s;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c || a[r][c].is_zero()) continue;
      TruncatedSeries factor = a[r][c];
      for (int j = 0; j < n; ++j) {
        a[r][j] -= factor * a[c][j];
        inv[r][j] -= factor * inv[c][j];
      }
    }
  }
  return inv;
}

}  // namespace padicdm
