#pragma once

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "padicdm/padicdm.hpp"

namespace padicdm::testing {

#define EXPECT_ERRC(stmt, errc)                                                      \
  do {                                                                               \
    try {                                                                            \
      stmt;                                                                          \
      ADD_FAILURE() << "expected " << ::padicdm::errc_name(errc) << ", nothing thrown"; \
    } catch (const ::padicdm::Error& e_) {                                           \
      EXPECT_EQ(e_.code(), errc) << e_.what();                                       \
    }                                                                                \
  } while (0)

inline FieldPtr q2(int digits = 64) { return Field::base(2, digits); }
inline FieldPtr q3(int digits = 64) { return Field::base(3, digits); }

// Q_3(theta), theta^2 = -3.
inline FieldPtr q3_sqrt_m3(int digits = 64) {
  return Field::extension(3, {mpz_class(3), mpz_class(0), mpz_class(1)}, 2, 1, digits);
}

// Unramified quadratic extension of Q_3: theta^2 = -1.
inline FieldPtr q3_unramified(int digits = 40) {
  return Field::extension(3, {mpz_class(1), mpz_class(0), mpz_class(1)}, 1, 2, digits);
}

inline PadicScalar zero(const FieldPtr& F) { return PadicScalar::zero(F); }

inline TruncatedSeries series_of(const FieldPtr& F, const std::vector<mpq_class>& c, int N,
                                 const std::string& var = "t") {
  std::vector<PadicScalar> xs;
  for (const auto& q : c) xs.push_back(scalar(F, q));
  return TruncatedSeries::from_coeffs(zero(F), std::move(xs), N, var);
}

// binom(alpha, j) for j < N, in exact rationals.
inline std::vector<mpq_class> binomial_coeffs(const mpq_class& alpha, int N) {
  std::vector<mpq_class> out;
  mpq_class c(1);
  for (int j = 0; j < N; ++j) {
    out.push_back(c);
    c = c * (alpha - j) / (j + 1);
    c.canonicalize();
  }
  return out;
}

// (1 + s)^{1/p} as exact rationals.
inline TruncatedSeries root_oracle(const FieldPtr& F, long p, int N, const std::string& var = "s") {
  mpq_class a(1, p);
  a.canonicalize();
  return series_of(F, binomial_coeffs(a, N), N, var);
}

inline std::vector<mpq_class> exp_coeffs(int N, long sign = 1) {
  std::vector<mpq_class> out;
  mpq_class c(1);
  for (int j = 0; j < N; ++j) {
    out.push_back(c);
    c = c * sign / (j + 1);
    c.canonicalize();
  }
  return out;
}

// v_p(n!) by Legendre: (n - s_p(n)) / (p - 1).
inline long legendre(long n, long p) {
  long digits = 0;
  for (long m = n; m > 0; m /= p) digits += m % p;
  return (n - digits) / (p - 1);
}

inline bool series_equal(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int n = std::min(a.order(), b.order());
  for (int k = 0; k < n; ++k)
    if (!(a[k] - b[k]).is_zero()) return false;
  return true;
}

inline ::testing::AssertionResult SeriesEq(const TruncatedSeries& a, const TruncatedSeries& b) {
  const int n = std::min(a.order(), b.order());
  for (int k = 0; k < n; ++k)
    if (!(a[k] - b[k]).is_zero())
      return ::testing::AssertionFailure() << "coefficient " << k << ": " << a[k].str() << " vs " << b[k].str();
  return ::testing::AssertionSuccess();
}

// Random rational p^k * u / w with small unit numerator and denominator.
inline mpq_class random_rational(std::mt19937_64& rng, long p, int kmin, int kmax) {
  std::uniform_int_distribution<long> unit(1, 200), sign(0, 1);
  std::uniform_int_distribution<int> k(kmin, kmax);
  long u = unit(rng), w = unit(rng);
  while (u % p == 0) ++u;
  while (w % p == 0) ++w;
  mpq_class q(sign(rng) ? -u : u, w);
  int e = k(rng);
  mpz_class pe;
  mpz_ui_pow_ui(pe.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(std::abs(e)));
  if (e >= 0) q *= pe; else q /= pe;
  q.canonicalize();
  return q;
}

inline PadicScalar random_scalar(std::mt19937_64& rng, const FieldPtr& F, int kmin = -3, int kmax = 6) {
  std::vector<mpq_class> c;
  for (int i = 0; i < F->degree(); ++i) c.push_back(random_rational(rng, F->p(), kmin, kmax));
  return PadicScalar::from_coords(F, c);
}

// Distinct multiples of p in a small window; distances give a random tree.
inline std::vector<long> random_fiber_integers(std::mt19937_64& rng, long p, int d) {
  std::uniform_int_distribution<long> pick(-40, 40);
  std::vector<long> out;
  while (static_cast<int>(out.size()) < d) {
    long a = p * pick(rng);
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

// f(t) = prod (t - a_i): zeros of f exactly the a_i, all inside the open disc.
inline TruncatedSeries product_polynomial(const FieldPtr& F, const std::vector<long>& roots, int N) {
  std::vector<mpq_class> c{mpq_class(1)};
  for (long a : roots) {
    std::vector<mpq_class> next(c.size() + 1, mpq_class(0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j + 1] += c[j];
      next[j] -= c[j] * a;
    }
    c = std::move(next);
  }
  return series_of(F, c, N);
}

struct FrobeniusSetup {
  FieldPtr F;
  DiscMorphism phi;
  Fiber fib;
  TreeOverPoint tree;
  std::vector<TruncatedSeries> u;
  VandermondeData V;
  MonicRelation P;
};

// Off-centered Frobenius (1+t)^p - 1 at b = 0, fiber a_i = -1 + zeta^i.
inline FrobeniusSetup frobenius(long p, int N = 32, int R = 64) {
  FrobeniusSetup S;
  std::vector<mpq_class> c;
  std::vector<PadicScalar> hints;
  if (p == 2) {
    S.F = q2(R);
    c = {0, 2, 1};
    hints = {scalar(S.F, -2), zero(S.F)};
  } else {
    S.F = q3_sqrt_m3(R);
    c = {0, 3, 3, 1};
    hints = {PadicScalar::from_coords(S.F, {mpq_class(-3, 2), mpq_class(1, 2)}),
             PadicScalar::from_coords(S.F, {mpq_class(-3, 2), mpq_class(-1, 2)}), zero(S.F)};
  }
  S.phi = DiscMorphism(series_of(S.F, c, N), static_cast<int>(p));
  S.fib = fiber(S.phi, zero(S.F), hints);
  S.tree = tree_over_point(S.phi, S.fib);
  S.u = local_solutions(S.phi, S.fib);
  S.V = vandermonde(S.fib, S.u);
  S.P = monic_relation_from(S.u);
  return S;
}

}  // namespace padicdm::testing
