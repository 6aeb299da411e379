#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "padicdm/matrix.hpp"
#include "padicdm/morphism.hpp"
#include "padicdm/polygon.hpp"

namespace padicdm {

// Free module with D(e_i) = sum_j A[i][j] e_j; horizontal coordinate vectors
// solve dY/dx = -A^T Y.
struct DiffModule {
  int rank = 0;
  SeriesMatrix A;
  std::string var;
  PadicScalar center;

  static DiffModule from_matrix(SeriesMatrix A) {
    if (A.empty() || rows(A) != cols(A))
      throw Error(Errc::DimensionMismatch, "derivation matrix must be square and nonempty");
    const TruncatedSeries& ref = A[0][0];
    for (const auto& row : A)
      for (const auto& x : row) TruncatedSeries::check_compatible(ref, x);
    DiffModule m;
    m.rank = rows(A);
    m.var = ref.var();
    m.center = ref.center();
    m.A = std::move(A);
    return m;
  }

  SeriesMatrix system_matrix() const { return negate(transpose(A)); }
  int order() const { return matrix_order(A); }
  const FieldPtr& field() const { return center.field(); }
};

inline DiffModule trivial_module(int rank, const PadicScalar& center, int N, const std::string& var) {
  return DiffModule::from_matrix(zero_matrix(rank, rank, center, N, var));
}

// Rank one, D(e) = lambda e.
inline DiffModule exp_module(const PadicScalar& lambda, const PadicScalar& center, int N,
                             const std::string& var) {
  SeriesMatrix A{{TruncatedSeries::constant(lambda, center, N, var)}};
  return DiffModule::from_matrix(std::move(A));
}

// New derivation matrix d(B')B + B'AB with B' = B^{-1}.
inline DiffModule change_basis(const DiffModule& M, const SeriesMatrix& B) {
  if (rows(B) != M.rank || cols(B) != M.rank)
    throw Error(Errc::DimensionMismatch, "transition matrix has the wrong shape");
  auto inv = try_inverse(B);
  if (!inv) throw Error(Errc::NonInvertibleTransition, "transition matrix is not invertible");
  SeriesMatrix Ap = add(multiply(derivative(*inv), B), multiply(multiply(*inv, M.A), B));
  return DiffModule::from_matrix(std::move(Ap));
}

inline SeriesMatrix recenter(const SeriesMatrix& m, const PadicScalar& a) {
  SeriesMatrix r = m;
  for (auto& row : r)
    for (auto& x : row) x = recenter(x, a);
  return r;
}

// Componentwise tail estimate; the element's exponent is the largest one
// (smallest radius). Components without tail coefficients do not constrain it.
inline RadiusEstimate element_radius(const SeriesVector& Y, int window_begin, int window_end) {
  RadiusEstimate best;
  best.window_begin = window_begin;
  best.window_end = window_end;
  bool any = false, all_stable = true;
  for (const auto& y : Y) {
    RadiusEstimate r = radius_estimate(y, window_begin, window_end);
    if (r.nonzero_in_window == 0) continue;
    all_stable = all_stable && r.stable;
    if (!any || r.q_unclamped > best.q_unclamped) {
      best = r;
    }
    any = true;
  }
  best.stable = any && all_stable;
  return best;
}

inline RadiusEstimate element_radius(const SeriesVector& Y) {
  int N = 1 << 30;
  for (const auto& y : Y) N = std::min(N, y.order());
  return element_radius(Y, N / 2, N);
}

struct HorizontalMatrix {
  PadicScalar base;
  SeriesMatrix Y;  // columns are horizontal elements
  std::vector<RadiusEstimate> radii;
  int certified_order = 0;

  SeriesVector column(int l) const {
    SeriesVector c;
    for (const auto& row : Y) c.push_back(row[l]);
    return c;
  }
};

// Fundamental matrix at a with Y(a) = I:
// (k+1) Y_{k+1} = -sum_{i<=k} (A^T)_i Y_{k-i}.
inline HorizontalMatrix local_solution_matrix(const DiffModule& M, const PadicScalar& a, int N) {
  const int r = M.rank;
  const FieldPtr& F = M.field();
  SeriesMatrix T = transpose(recenter(M.A, a));
  const int K = std::min(N, M.order() + 1);
  using ScalarMatrix = std::vector<std::vector<PadicScalar>>;
  std::vector<ScalarMatrix> Yk;
  ScalarMatrix I(static_cast<std::size_t>(r), std::vector<PadicScalar>(static_cast<std::size_t>(r), PadicScalar::zero(F)));
  for (int i = 0; i < r; ++i) I[i][i] = scalar(F, 1);
  Yk.push_back(I);
  for (int k = 0; k + 1 < K; ++k) {
    ScalarMatrix S(static_cast<std::size_t>(r), std::vector<PadicScalar>(static_cast<std::size_t>(r), PadicScalar::zero(F)));
    for (int i = 0; i <= k; ++i)
      for (int x = 0; x < r; ++x)
        for (int z = 0; z < r; ++z) {
          const PadicScalar& t = T[x][z][i];
          if (t.is_exact_zero()) continue;
          for (int y = 0; y < r; ++y) S[x][y] += t * Yk[k - i][z][y];
        }
    PadicScalar inv = scalar(F, mpq_class(-1, k + 1));
    for (auto& row : S)
      for (auto& x : row) x = x * inv;
    Yk.push_back(std::move(S));
  }
  HorizontalMatrix H;
  H.base = a;
  H.certified_order = K;
  H.Y.assign(static_cast<std::size_t>(r), SeriesVector{});
  for (int x = 0; x < r; ++x)
    for (int y = 0; y < r; ++y) {
      std::vector<PadicScalar> c;
      for (int k = 0; k < K; ++k) c.push_back(Yk[k][x][y]);
      H.Y[x].push_back(TruncatedSeries(a, std::move(c), M.var));
    }
  for (int l = 0; l < r; ++l) H.radii.push_back(element_radius(H.column(l)));
  return H;
}

struct HorizontalReport {
  bool pass = true;
  // Worst certified agreement, in valuation units, of dY/dx + A^T Y = 0
  // relative to the largest term entering each coefficient; nullopt when no
  // coefficient had a nonzero term.
  std::optional<Rational> worst;
  int worst_row = -1;
  int worst_order = -1;
  int checked_order = 0;
  Rational floor{0};
};

inline HorizontalReport horizontal_check(const SeriesVector& Y, const DiffModule& M,
                                         std::optional<Rational> floor = std::nullopt) {
  if (static_cast<int>(Y.size()) != M.rank)
    throw Error(Errc::DimensionMismatch, "column length differs from the module rank");
  const FieldPtr& F = M.field();
  const long e = F->e();
  HorizontalReport rep;
  rep.floor = floor ? *floor : Rational(F->digits(), 2);
  const PadicScalar& a = Y.front().center();
  for (const auto& y : Y) {
    if (y.var() != M.var) throw Error(Errc::VariableMismatch, "column and module variables differ");
  }
  SeriesMatrix A = recenter(M.A, a);
  int NY = 1 << 30;
  for (const auto& y : Y) NY = std::min(NY, y.order());
  const int K = std::min(NY - 1, M.order());
  rep.checked_order = K;
  for (int i = 0; i < M.rank; ++i) {
    for (int k = 0; k < K; ++k) {
      PadicScalar res = Y[i][k + 1] * scalar(F, k + 1);
      long scale = res.is_zero() ? PadicScalar::kInf : res.valuation_ticks();
      for (int j = 0; j < M.rank; ++j)
        for (int l = 0; l <= k; ++l) {
          const PadicScalar& c = A[j][i][l];
          if (c.is_exact_zero()) continue;
          PadicScalar term = c * Y[j][k - l];
          if (!term.is_zero()) scale = std::min(scale, term.valuation_ticks());
          res += term;
        }
      if (scale >= PadicScalar::kInf) continue;
      Rational digits(res.magnitude_ticks() - scale, e);
      if (!rep.worst || digits < *rep.worst) {
        rep.worst = digits;
        rep.worst_row = i;
        rep.worst_order = k;
      }
    }
  }
  rep.pass = !rep.worst || *rep.worst >= rep.floor;
  return rep;
}

// ---- Direct image along a finite etale morphism ----------------------------

// Elements of O_s[t]/P(s,t) in the basis 1, t, ..., t^{d-1}.
using QuotientElement = SeriesVector;

inline QuotientElement quotient_mul_t(const QuotientElement& x, const MonicRelation& P) {
  const int d = P.degree();
  QuotientElement r(static_cast<std::size_t>(d));
  const TruncatedSeries& top = x[d - 1];
  for (int j = 0; j < d; ++j) {
    TruncatedSeries v = -(P.coeffs[j] * top);
    if (j > 0) v += x[j - 1];
    r[j] = std::move(v);
  }
  return r;
}

inline QuotientElement quotient_zero(const MonicRelation& P) {
  return QuotientElement(static_cast<std::size_t>(P.degree()),
                         TruncatedSeries::zero(P.center(), P.order(), P.var()));
}

inline QuotientElement quotient_mul(const QuotientElement& x, const QuotientElement& y,
                                    const MonicRelation& P) {
  QuotientElement acc = quotient_zero(P), xt = x;
  for (int m = 0; m < P.degree(); ++m) {
    if (!is_exact_zero(y[m]))
      for (int j = 0; j < P.degree(); ++j) acc[j] += y[m] * xt[j];
    if (m + 1 < P.degree()) xt = quotient_mul_t(xt, P);
  }
  return acc;
}

// Coordinates (g_0(s), ..., g_{d-1}(s)) of the truncation of g(t), by Horner
// in (t - center) with t^d replaced through the relation.
inline QuotientElement reduce_to_basis(const TruncatedSeries& g, const MonicRelation& P) {
  const int N = P.order();
  QuotientElement acc = quotient_zero(P);
  const PadicScalar& c = g.center();
  for (int n = g.order(); n-- > 0;) {
    QuotientElement shifted = quotient_mul_t(acc, P);
    if (!c.is_exact_zero())
      for (int j = 0; j < P.degree(); ++j) shifted[j] -= c * acc[j];
    shifted[0] += TruncatedSeries::constant(g[n], P.center(), N, P.var());
    acc = std::move(shifted);
  }
  return acc;
}

inline QuotientElement quotient_inverse(const QuotientElement& x, const MonicRelation& P) {
  const int d = P.degree();
  SeriesMatrix Mx = zero_matrix(d, d, P.center(), P.order(), P.var());
  QuotientElement col = x;
  for (int m = 0; m < d; ++m) {
    for (int j = 0; j < d; ++j) Mx[j][m] = col[j];
    if (m + 1 < d) col = quotient_mul_t(col, P);
  }
  auto inv = try_inverse(Mx);
  if (!inv) throw Error(Errc::NotEtale, "element is not invertible in the quotient algebra");
  QuotientElement h;
  for (int j = 0; j < d; ++j) h.push_back((*inv)[j][0]);
  return h;
}

// Rank r*d module over s in the basis e_1, t e_1, ..., t^{d-1} e_1, e_2, ...
// with D_s = (1/f'(t)) D_t. Entries of A are read as polynomials.
inline DiffModule direct_image(const DiffModule& M, const DiscMorphism& phi, const MonicRelation& P) {
  if (!phi.is_etale()) throw Error(Errc::NotEtale, "f' vanishes in the open unit disc");
  const int d = P.degree(), r = M.rank;
  if (d != phi.degree()) throw Error(Errc::DimensionMismatch, "relation degree differs from the morphism");
  const FieldPtr& F = M.field();
  QuotientElement H = quotient_inverse(reduce_to_basis(polynomial_derivative(phi.f()), P), P);
  std::vector<std::vector<QuotientElement>> Ared(static_cast<std::size_t>(r));
  for (int j = 0; j < r; ++j)
    for (int k = 0; k < r; ++k) Ared[j].push_back(reduce_to_basis(M.A[j][k], P));
  SeriesMatrix B = zero_matrix(r * d, r * d, P.center(), P.order(), P.var());
  for (int j = 0; j < r; ++j) {
    std::vector<QuotientElement> tmA = Ared[j];  // t^m * A_jk
    for (int m = 0; m < d; ++m) {
      for (int k = 0; k < r; ++k) {
        QuotientElement c = tmA[k];
        if (k == j && m > 0)
          c[m - 1] += TruncatedSeries::constant(scalar(F, m), P.center(), P.order(), P.var());
        QuotientElement img = quotient_mul(c, H, P);
        for (int n = 0; n < d; ++n) B[j * d + m][k * d + n] = img[n];
      }
      if (m + 1 < d)
        for (int k = 0; k < r; ++k) tmA[k] = quotient_mul_t(tmA[k], P);
    }
  }
  return DiffModule::from_matrix(std::move(B));
}

}  // namespace padicdm
