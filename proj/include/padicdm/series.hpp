#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "padicdm/hensel.hpp"
#include "padicdm/scalar.hpp"

namespace padicdm {

// sum_{i<N} c_i (x - center)^i, where x is the variable named by `var`.
class TruncatedSeries {
 public:
  TruncatedSeries() = default;

  TruncatedSeries(PadicScalar center, std::vector<PadicScalar> coeffs, std::string var)
      : center_(std::move(center)), c_(std::move(coeffs)), var_(std::move(var)) {
    if (c_.empty()) throw Error(Errc::DimensionMismatch, "series order must be >= 1");
  }

  static TruncatedSeries zero(const PadicScalar& center, int N, const std::string& var) {
    return {center, std::vector<PadicScalar>(static_cast<std::size_t>(N),
                                             PadicScalar::zero(center.field())),
            var};
  }

  static TruncatedSeries constant(const PadicScalar& value, const PadicScalar& center, int N,
                                  const std::string& var) {
    TruncatedSeries s = zero(center, N, var);
    s.c_[0] = value;
    return s;
  }

  // x - center
  static TruncatedSeries variable(const PadicScalar& center, int N, const std::string& var) {
    TruncatedSeries s = zero(center, N, var);
    if (N > 1) s.c_[1] = scalar(center.field(), 1);
    return s;
  }

  // Coefficient list padded with exact zeros (or cut) to order N.
  static TruncatedSeries from_coeffs(const PadicScalar& center, std::vector<PadicScalar> coeffs,
                                     int N, const std::string& var) {
    coeffs.resize(static_cast<std::size_t>(N), PadicScalar::zero(center.field()));
    return {center, std::move(coeffs), var};
  }

  const PadicScalar& center() const { return center_; }
  const std::string& var() const { return var_; }
  int order() const { return static_cast<int>(c_.size()); }
  const FieldPtr& field() const { return center_.field(); }
  const PadicScalar& operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
  const std::vector<PadicScalar>& coeffs() const { return c_; }

  TruncatedSeries truncated(int n) const {
    std::vector<PadicScalar> c(c_.begin(), c_.begin() + std::min(n, order()));
    return {center_, std::move(c), var_};
  }

  TruncatedSeries with_var(const std::string& var) const { return {center_, c_, var}; }

  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const PadicScalar& x) { return x.is_zero(); });
  }

  // Index of the first coefficient nonzero at precision, or -1.
  int first_nonzero() const {
    for (int i = 0; i < order(); ++i)
      if (!c_[i].is_zero()) return i;
    return -1;
  }

  // Value of the truncation at x.
  PadicScalar evaluate(const PadicScalar& x) const {
    PadicScalar h = x - center_;
    PadicScalar acc = PadicScalar::zero(field());
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * h + c_[i];
    return acc;
  }

  TruncatedSeries operator-() const {
    std::vector<PadicScalar> c;
    c.reserve(c_.size());
    for (const auto& x : c_) c.push_back(-x);
    return {center_, std::move(c), var_};
  }

  friend TruncatedSeries operator+(const TruncatedSeries& f, const TruncatedSeries& g) {
    check_compatible(f, g);
    int n = std::min(f.order(), g.order());
    std::vector<PadicScalar> c;
    c.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) c.push_back(f.c_[i] + g.c_[i]);
    return {f.center_, std::move(c), f.var_};
  }

  friend TruncatedSeries operator-(const TruncatedSeries& f, const TruncatedSeries& g) {
    return f + (-g);
  }

  friend TruncatedSeries operator*(const TruncatedSeries& f, const TruncatedSeries& g) {
    check_compatible(f, g);
    int n = std::min(f.order(), g.order());
    std::vector<PadicScalar> c(static_cast<std::size_t>(n), PadicScalar::zero(f.field()));
    for (int i = 0; i < n; ++i) {
      if (f.c_[i].is_exact_zero()) continue;
      for (int j = 0; i + j < n; ++j) {
        if (g.c_[j].is_exact_zero()) continue;
        c[i + j] += f.c_[i] * g.c_[j];
      }
    }
    return {f.center_, std::move(c), f.var_};
  }

  friend TruncatedSeries operator*(const PadicScalar& a, const TruncatedSeries& f) {
    std::vector<PadicScalar> c;
    c.reserve(f.c_.size());
    for (const auto& x : f.c_) c.push_back(a * x);
    return {f.center_, std::move(c), f.var_};
  }

  TruncatedSeries& operator+=(const TruncatedSeries& g) { return *this = *this + g; }
  TruncatedSeries& operator-=(const TruncatedSeries& g) { return *this = *this - g; }
  TruncatedSeries& operator*=(const TruncatedSeries& g) { return *this = *this * g; }

  static void check_compatible(const TruncatedSeries& f, const TruncatedSeries& g) {
    if (f.var_ != g.var_)
      throw Error(Errc::VariableMismatch, "series in '" + f.var_ + "' and '" + g.var_ + "'");
    require_same_field(f.field(), g.field());
    if (!f.center_.equals(g.center_))
      throw Error(Errc::CenterMismatch,
                  "centers " + f.center_.str() + " and " + g.center_.str() + " differ");
  }

 private:
  PadicScalar center_;
  std::vector<PadicScalar> c_;
  std::string var_;
};

inline TruncatedSeries mult_inverse(const TruncatedSeries& f) {
  if (f[0].is_zero())
    throw Error(Errc::NonUnitConstantTerm, "constant term vanishes at precision");
  const int n = f.order();
  PadicScalar inv0 = f[0].inverse();
  std::vector<PadicScalar> g;
  g.reserve(static_cast<std::size_t>(n));
  g.push_back(inv0);
  for (int k = 1; k < n; ++k) {
    PadicScalar acc = PadicScalar::zero(f.field());
    for (int i = 1; i <= k; ++i)
      if (!f[i].is_exact_zero()) acc += f[i] * g[k - i];
    g.push_back(-(acc * inv0));
  }
  return {f.center(), std::move(g), f.var()};
}

// Order drops by one (an order-1 input yields the order-1 zero series).
inline TruncatedSeries derivative(const TruncatedSeries& f) {
  const int n = f.order();
  if (n == 1) return TruncatedSeries::zero(f.center(), 1, f.var());
  std::vector<PadicScalar> c;
  c.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 1; i < n; ++i) c.push_back(f[i] * scalar(f.field(), i));
  return {f.center(), std::move(c), f.var()};
}

// Derivative of the truncation as a polynomial, keeping the order.
inline TruncatedSeries polynomial_derivative(const TruncatedSeries& f) {
  TruncatedSeries d = derivative(f);
  std::vector<PadicScalar> c = d.coeffs();
  c.resize(static_cast<std::size_t>(f.order()), PadicScalar::zero(f.field()));
  return {f.center(), std::move(c), f.var()};
}

// f(g): f is read as the polynomial of its truncation. The result carries g's
// center and variable.
inline TruncatedSeries compose(const TruncatedSeries& f, const TruncatedSeries& g) {
  require_same_field(f.field(), g.field());
  PadicScalar disp = g[0] - f.center();
  if (!disp.is_zero() && disp.valuation_ticks() <= 0)
    throw Error(Errc::SubstitutionOutsideDisc,
                "substituted series starts at " + g[0].str() + ", outside the disc around " +
                    f.center().str());
  const int n = std::min(f.order(), g.order());
  TruncatedSeries h = g.truncated(n) - TruncatedSeries::constant(f.center(), g.center(), n, g.var());
  TruncatedSeries acc = TruncatedSeries::constant(f[f.order() - 1], g.center(), n, g.var());
  for (int i = f.order() - 1; i-- > 0;)
    acc = acc * h + TruncatedSeries::constant(f[i], g.center(), n, g.var());
  return acc;
}

// Compositional inverse of f with f_0 = 0 and f_1 invertible.
inline TruncatedSeries reversion(const TruncatedSeries& f) {
  if (!f[0].is_zero())
    throw Error(Errc::NotInvertibleAtOrderOne, "constant term must vanish");
  if (f.order() < 2 || f[1].is_zero())
    throw Error(Errc::NotInvertibleAtOrderOne, "linear coefficient vanishes at precision");
  const int n = f.order();
  const PadicScalar zero_center = PadicScalar::zero(f.field());
  TruncatedSeries x = TruncatedSeries::variable(zero_center, n, f.var());
  // f re-read with center 0 so that g (a series vanishing at 0) substitutes.
  TruncatedSeries f0(zero_center, f.coeffs(), f.var());
  TruncatedSeries df0 = polynomial_derivative(f0);
  TruncatedSeries g = f[1].inverse() * x;
  for (int span = 1; span < 2 * n; span *= 2) {
    TruncatedSeries r = compose(f0, g) - x;
    if (r.is_zero()) break;
    TruncatedSeries d = compose(df0, g);
    g = g - r * mult_inverse(d);
  }
  TruncatedSeries r = compose(f0, g) - x;
  TruncatedSeries d = compose(df0, g);
  g = g - r * mult_inverse(d);
  return g;
}

// f(a + x) expanded at a, constant term kept; requires v(a - center) >= 0.
inline TruncatedSeries recenter(const TruncatedSeries& f, const PadicScalar& a) {
  PadicScalar delta = a - f.center();
  if (!delta.is_zero() && delta.valuation_ticks() < 0)
    throw Error(Errc::ShiftOutsideDisc, "shift " + a.str() + " leaves the disc of definition");
  std::vector<PadicScalar> h = f.coeffs();
  const int n = f.order();
  if (!delta.is_exact_zero()) {
    for (int i = 0; i < n; ++i)
      for (int j = n - 2; j >= i; --j) h[j] += delta * h[j + 1];
  }
  return {a, std::move(h), f.var()};
}

// f(a + x) - f(a), centered at a.
inline TruncatedSeries taylor_shift(const TruncatedSeries& f, const PadicScalar& a) {
  TruncatedSeries r = recenter(f, a);
  std::vector<PadicScalar> c = r.coeffs();
  c[0] = PadicScalar::zero(f.field());
  return {a, std::move(c), f.var()};
}

// Series u with P(s, u(s)) = O(s^N) and u(center) = x0; P holds series
// coefficients in X, low to high, sharing one center.
inline TruncatedSeries newton_solve(const std::vector<TruncatedSeries>& P, const PadicScalar& x0) {
  if (P.empty()) throw Error(Errc::DimensionMismatch, "empty polynomial");
  const TruncatedSeries& lead = P.front();
  int n = lead.order();
  for (const auto& c : P) {
    TruncatedSeries::check_compatible(lead, c);
    n = std::min(n, c.order());
  }
  ScalarPoly at_center;
  for (const auto& c : P) at_center.push_back(c[0]);
  if (!poly_eval(at_center, x0).is_zero())
    throw Error(Errc::NotAFiberPoint, "x0 is not a root of P at the center");
  PadicScalar dpx = poly_eval(poly_derivative(at_center), x0);
  if (dpx.is_zero())
    throw Error(Errc::SingularFiberPoint, "dP/dX vanishes at x0: branching or non-etale point");
  auto eval_at = [&](const TruncatedSeries& u, bool deriv) {
    TruncatedSeries acc = TruncatedSeries::zero(lead.center(), n, lead.var());
    for (std::size_t i = P.size(); i-- > (deriv ? 1 : 0);) {
      TruncatedSeries coef = P[i].truncated(n);
      if (deriv) coef = scalar(lead.field(), static_cast<long>(i)) * coef;
      acc = acc * u + coef;
    }
    return acc;
  };
  TruncatedSeries u = TruncatedSeries::constant(x0, lead.center(), n, lead.var());
  for (int span = 1; span < 2 * n; span *= 2) {
    TruncatedSeries r = eval_at(u, false);
    if (r.is_zero()) break;
    u = u - r * mult_inverse(eval_at(u, true));
  }
  TruncatedSeries r = eval_at(u, false);
  u = u - r * mult_inverse(eval_at(u, true));
  return u;
}

}  // namespace padicdm
