#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "padicdm/errors.hpp"
#include "padicdm/field.hpp"
#include "padicdm/rational.hpp"

namespace padicdm {

namespace detail {

inline long vp(const mpz_class& n, long p) {
  if (n == 0) return 0;
  if (p == 2) return static_cast<long>(mpz_scan1(n.get_mpz_t(), 0));
  mpz_class tmp;
  mpz_class pz(p);
  return static_cast<long>(mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), pz.get_mpz_t()));
}

inline long sat_add(long a, long b, long inf) {
  if (a >= inf || b >= inf) return inf;
  long s = a + b;
  return s >= inf ? inf : s;
}

}  // namespace detail

// x = p^k * sum_i m_i * theta^i, known modulo pi^prec, where theta is the
// generator of the field and pi its uniformizer. Valuations and precisions
// are stored in ticks (1/e of a unit of v(p)). Every nonzero value carries at
// most `digits` significant p-adic digits: prec <= val + e * digits.
class PadicScalar {
 public:
  static constexpr long kInf = 1L << 60;

  PadicScalar() = default;

  static PadicScalar zero(const FieldPtr& F) {
    PadicScalar x;
    x.F_ = F;
    x.m_.assign(static_cast<std::size_t>(F->degree()), mpz_class(0));
    return x;
  }

  static PadicScalar zero_at(const FieldPtr& F, long prec_ticks) {
    PadicScalar x = zero(F);
    x.prec_ = std::min(prec_ticks, kInf);
    return x;
  }

  static PadicScalar from_integer(const FieldPtr& F, const mpz_class& n) {
    return from_rational_coords(F, {mpq_class(n)}, 0, kInf);
  }

  static PadicScalar from_int(const FieldPtr& F, long n) { return from_integer(F, mpz_class(n)); }

  static PadicScalar from_rational(const FieldPtr& F, const mpq_class& q) {
    return from_rational_coords(F, {q}, 0, kInf);
  }

  // sum_i q_i * theta^i
  static PadicScalar from_coords(const FieldPtr& F, const std::vector<mpq_class>& q) {
    return from_rational_coords(F, q, 0, kInf);
  }

  static PadicScalar generator(const FieldPtr& F) {
    if (F->degree() == 1) return from_int(F, F->p());
    std::vector<mpq_class> q(2);
    q[1] = 1;
    return from_coords(F, q);
  }

  static PadicScalar uniformizer(const FieldPtr& F) {
    return F->kind() == ExtensionKind::Eisenstein ? generator(F) : from_int(F, F->p());
  }

  // p^shift * sum_i q_i theta^i with absolute precision at most prec_ticks.
  static PadicScalar from_rational_coords(const FieldPtr& F, const std::vector<mpq_class>& q,
                                          long shift, long prec_ticks) {
    const long e = F->e(), p = F->p();
    const int n = F->degree();
    if (static_cast<int>(q.size()) > n)
      throw Error(Errc::DimensionMismatch, "too many coordinates for the field degree");
    std::vector<long> a(q.size(), 0);
    long min_a = kInf, V = kInf;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      a[i] = detail::vp(q[i].get_num(), p) - detail::vp(q[i].get_den(), p);
      min_a = std::min(min_a, a[i]);
      V = std::min(V, e * (shift + a[i]) + F->offset(static_cast<int>(i)));
    }
    if (V >= kInf) return zero_at(F, prec_ticks);
    long P = std::min(prec_ticks, V + e * F->digits());
    long k = shift + min_a;
    std::vector<mpz_class> m(static_cast<std::size_t>(n), mpz_class(0));
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] == 0) continue;
      long rel = a[i] - min_a;
      long c = ceil_div(P - F->offset(static_cast<int>(i)), e) - k;
      if (c <= rel) continue;
      long unit_digits = c - rel;
      mpz_class num = q[i].get_num(), den = q[i].get_den();
      long vn = detail::vp(num, p), vd = detail::vp(den, p);
      if (vn > 0) num /= F->pow_p(vn);
      if (vd > 0) den /= F->pow_p(vd);
      mpz_class mod = F->pow_p(unit_digits), inv;
      mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
      mpz_class u = num * inv;
      mpz_fdiv_r(u.get_mpz_t(), u.get_mpz_t(), mod.get_mpz_t());
      m[i] = u * F->pow_p(rel);
    }
    return from_parts(F, std::move(m), k, P);
  }

  static PadicScalar from_parts(const FieldPtr& F, std::vector<mpz_class> m, long k,
                                long prec_ticks) {
    PadicScalar x;
    x.F_ = F;
    x.m_ = std::move(m);
    x.m_.resize(static_cast<std::size_t>(F->degree()), mpz_class(0));
    x.k_ = k;
    x.prec_ = std::min(prec_ticks, kInf);
    x.normalize();
    return x;
  }

  // Teichmuller-free lift of a residue class: integer coordinates in [0, p).
  static PadicScalar lift_residue(const FieldPtr& F, const Field::Residue& r) {
    std::vector<mpq_class> q(static_cast<std::size_t>(F->degree()));
    if (F->kind() == ExtensionKind::Unramified) {
      for (std::size_t i = 0; i < r.size(); ++i) q[i] = r[i];
    } else {
      q[0] = r[0];
    }
    return from_coords(F, q);
  }

  const FieldPtr& field() const { return F_; }
  bool valid() const { return static_cast<bool>(F_); }

  bool is_zero() const { return val_ >= kInf; }
  bool is_exact_zero() const { return val_ >= kInf && prec_ >= kInf; }

  long valuation_ticks() const { return val_; }
  long precision_ticks() const { return prec_; }
  // Digits certified beyond the valuation, in ticks; 0 for a zero.
  long relative_ticks() const { return is_zero() ? 0 : prec_ - val_; }

  std::optional<Rational> valuation() const {
    if (is_zero()) return std::nullopt;
    return Rational(val_, F_->e());
  }
  std::optional<Rational> precision() const {
    if (prec_ >= kInf) return std::nullopt;
    return Rational(prec_, F_->e());
  }
  // Valuation if nonzero, otherwise the precision bound (how small it is known to be).
  long magnitude_ticks() const { return is_zero() ? prec_ : val_; }

  PadicScalar operator-() const {
    PadicScalar x = *this;
    for (auto& c : x.m_) c = -c;
    x.normalize();
    return x;
  }

  friend PadicScalar operator+(const PadicScalar& x, const PadicScalar& y) {
    require_same_field(x.F_, y.F_);
    if (x.is_exact_zero()) return y;
    if (y.is_exact_zero()) return x;
    const FieldPtr& F = x.F_;
    long kx = x.is_zero() ? kInf : x.k_, ky = y.is_zero() ? kInf : y.k_;
    long kmin = std::min(kx, ky);
    long P = std::min(x.prec_, y.prec_);
    if (kmin >= kInf) return zero_at(F, P);
    std::vector<mpz_class> m(x.m_.size(), mpz_class(0));
    if (kx < kInf) {
      mpz_class s = F->pow_p(kx - kmin);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += x.m_[i] * s;
    }
    if (ky < kInf) {
      mpz_class s = F->pow_p(ky - kmin);
      for (std::size_t i = 0; i < m.size(); ++i) m[i] += y.m_[i] * s;
    }
    return from_parts(F, std::move(m), kmin, P);
  }

  friend PadicScalar operator-(const PadicScalar& x, const PadicScalar& y) { return x + (-y); }

  friend PadicScalar operator*(const PadicScalar& x, const PadicScalar& y) {
    require_same_field(x.F_, y.F_);
    const FieldPtr& F = x.F_;
    long vx = x.magnitude_ticks(), vy = y.magnitude_ticks();
    long P = std::min(detail::sat_add(x.prec_, vy, kInf), detail::sat_add(y.prec_, vx, kInf));
    if (x.is_zero() || y.is_zero()) return zero_at(F, P);
    return from_parts(F, x.field_mul(x.m_, y.m_), x.k_ + y.k_, P);
  }

  PadicScalar inverse() const {
    if (!F_) throw Error(Errc::DivisionByZeroAtPrecision, "uninitialized scalar");
    if (is_zero())
      throw Error(Errc::DivisionByZeroAtPrecision, "divisor has no certified digit");
    const long P = prec_ - 2 * val_;
    const int n = F_->degree();
    if (n == 1) return from_rational_coords(F_, {mpq_class(1) / mpq_class(m_[0])}, -k_, P);
    // Solve M z = e_0 exactly, where column j of M holds the coordinates of y * theta^j.
    std::vector<std::vector<mpq_class>> M(static_cast<std::size_t>(n),
                                          std::vector<mpq_class>(static_cast<std::size_t>(n) + 1));
    std::vector<mpz_class> col = m_;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) M[i][j] = col[i];
      std::vector<mpz_class> shifted(static_cast<std::size_t>(n), mpz_class(0));
      shifted[1 % n] = 1;
      if (n > 1) col = field_mul(col, shifted);
    }
    M[0][n] = 1;
    for (int c = 0; c < n; ++c) {
      int piv = c;
      while (piv < n && M[piv][c] == 0) ++piv;
      if (piv == n) throw Error(Errc::DivisionByZeroAtPrecision, "singular multiplication matrix");
      std::swap(M[piv], M[c]);
      for (int r = 0; r < n; ++r) {
        if (r == c || M[r][c] == 0) continue;
        mpq_class factor = M[r][c] / M[c][c];
        for (int j = c; j <= n; ++j) M[r][j] -= factor * M[c][j];
      }
    }
    std::vector<mpq_class> z(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) z[i] = M[i][n] / M[i][i];
    return from_rational_coords(F_, z, -k_, P);
  }

  friend PadicScalar operator/(const PadicScalar& x, const PadicScalar& y) {
    return x * y.inverse();
  }

  PadicScalar& operator+=(const PadicScalar& y) { return *this = *this + y; }
  PadicScalar& operator-=(const PadicScalar& y) { return *this = *this - y; }
  PadicScalar& operator*=(const PadicScalar& y) { return *this = *this * y; }

  PadicScalar pow(long n) const {
    if (n < 0) return inverse().pow(-n);
    PadicScalar r = from_int(F_, 1), b = *this;
    while (n > 0) {
      if (n & 1L) r = r * b;
      b = b * b;
      n >>= 1;
    }
    return r;
  }

  // Same digits, absolute precision lowered to at most `ticks`.
  PadicScalar with_precision_ticks(long ticks) const {
    PadicScalar x = *this;
    x.prec_ = std::min(prec_, ticks);
    x.normalize();
    return x;
  }

  // The stored digits taken as an exact value (full relative precision).
  PadicScalar representative() const {
    if (is_zero()) return zero(F_);
    return from_parts(F_, m_, k_, kInf);
  }

  // Representative modulo p^abs, promoted to full precision.
  PadicScalar truncated(const Rational& abs) const {
    long ticks = floor(abs * Rational(F_->e()));
    return with_precision_ticks(ticks).representative();
  }

  bool equals(const PadicScalar& o) const { return (*this - o).is_zero(); }

  // Per-coordinate (unit mantissa, exponent); the mantissa is balanced modulo
  // the known digits of that coordinate. Zero coordinates read (0, 0).
  std::vector<std::pair<mpz_class, long>> coordinates() const {
    std::vector<std::pair<mpz_class, long>> out;
    const long e = F_->e();
    for (std::size_t i = 0; i < m_.size(); ++i) {
      if (m_[i] == 0) {
        out.emplace_back(mpz_class(0), 0L);
        continue;
      }
      long v = detail::vp(m_[i], F_->p());
      mpz_class u = m_[i] / F_->pow_p(v);
      long c = ceil_div(prec_ - F_->offset(static_cast<int>(i)), e) - k_ - v;
      if (c > 0) {
        mpz_class mod = F_->pow_p(c);
        if (2 * u > mod) u -= mod;
      }
      out.emplace_back(u, k_ + v);
    }
    return out;
  }

  // Residue class modulo the uniformizer; requires valuation >= 0.
  Field::Residue residue() const {
    Field::Residue r = F_->residue_zero();
    if (is_zero()) return r;
    if (val_ < 0) throw Error(Errc::ShiftOutsideDisc, "residue of a non-integral element");
    std::size_t count = F_->kind() == ExtensionKind::Unramified ? m_.size() : 1;
    mpz_class pz(F_->p());
    for (std::size_t i = 0; i < count; ++i) {
      if (m_[i] == 0) continue;
      mpz_class c = m_[i];
      if (k_ >= 1) continue;
      if (k_ < 0) c /= F_->pow_p(-k_);
      mpz_class rr;
      mpz_fdiv_r(rr.get_mpz_t(), c.get_mpz_t(), pz.get_mpz_t());
      r[i] = rr.get_si();
    }
    return r;
  }

  // Total order: valuation first, then per-coordinate (exponent, mantissa).
  int compare_canonical(const PadicScalar& o) const {
    if (val_ != o.val_) return val_ < o.val_ ? -1 : 1;
    auto a = coordinates(), b = o.coordinates();
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      bool za = a[i].first == 0, zb = b[i].first == 0;
      if (za != zb) return za ? 1 : -1;
      if (za) continue;
      if (a[i].second != b[i].second) return a[i].second < b[i].second ? -1 : 1;
      int c = cmp(a[i].first, b[i].first);
      if (c != 0) return c < 0 ? -1 : 1;
    }
    return 0;
  }

  std::string str() const {
    if (!F_) return "<unset>";
    std::ostringstream os;
    const long p = F_->p();
    if (is_zero()) {
      os << "0";
    } else {
      auto co = coordinates();
      bool first = true;
      for (std::size_t i = 0; i < co.size(); ++i) {
        if (co[i].first == 0) continue;
        if (!first) os << " + ";
        first = false;
        os << co[i].first.get_str();
        if (co[i].second != 0) os << "*" << p << "^" << co[i].second;
        if (i > 0) os << "*x" << (i > 1 ? "^" + std::to_string(i) : "");
      }
    }
    if (prec_ < kInf) os << " + O(" << p << "^" << to_string(Rational(prec_, F_->e())) << ")";
    return os.str();
  }

 private:
  std::vector<mpz_class> field_mul(const std::vector<mpz_class>& a,
                                   const std::vector<mpz_class>& b) const {
    const int n = F_->degree();
    if (n == 1) return {a[0] * b[0]};
    std::vector<mpz_class> r(static_cast<std::size_t>(2 * n - 1), mpz_class(0));
    for (int i = 0; i < n; ++i) {
      if (a[i] == 0) continue;
      for (int j = 0; j < n; ++j)
        if (b[j] != 0) r[i + j] += a[i] * b[j];
    }
    const auto& poly = F_->poly();
    for (int d = 2 * n - 2; d >= n; --d) {
      if (r[d] == 0) continue;
      mpz_class c = r[d];
      r[d] = 0;
      for (int j = 0; j < n; ++j)
        if (poly[j] != 0) r[d - n + j] -= c * poly[j];
    }
    r.resize(static_cast<std::size_t>(n));
    return r;
  }

  void normalize() {
    const Field& F = *F_;
    const long e = F.e();
    if (prec_ >= kInf) prec_ = kInf;
    for (int pass = 0; pass < 8; ++pass) {
      long g = kInf;
      for (const auto& c : m_)
        if (c != 0) g = std::min(g, detail::vp(c, F.p()));
      if (g >= kInf) {
        val_ = kInf;
        k_ = 0;
        return;
      }
      if (g > 0) {
        mpz_class pg = F.pow_p(g);
        for (auto& c : m_)
          if (c != 0) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pg.get_mpz_t());
        k_ += g;
      }
      long V = kInf;
      for (std::size_t i = 0; i < m_.size(); ++i)
        if (m_[i] != 0)
          V = std::min(V, e * (k_ + detail::vp(m_[i], F.p())) + F.offset(static_cast<int>(i)));
      val_ = V;
      prec_ = std::min(prec_, V + e * F.digits());
      bool changed = false;
      for (std::size_t i = 0; i < m_.size(); ++i) {
        if (m_[i] == 0) continue;
        long c = ceil_div(prec_ - F.offset(static_cast<int>(i)), e) - k_;
        if (c <= 0) {
          m_[i] = 0;
          changed = true;
          continue;
        }
        mpz_class mod = F.pow_p(c);
        if (m_[i] < 0 || m_[i] >= mod) {
          mpz_fdiv_r(m_[i].get_mpz_t(), m_[i].get_mpz_t(), mod.get_mpz_t());
          changed = true;
        }
      }
      if (!changed) return;
    }
  }

  FieldPtr F_;
  std::vector<mpz_class> m_;
  long k_ = 0;
  long prec_ = kInf;
  long val_ = kInf;
};

inline PadicScalar scalar(const FieldPtr& F, long n) { return PadicScalar::from_int(F, n); }
inline PadicScalar scalar(const FieldPtr& F, const mpq_class& q) {
  return PadicScalar::from_rational(F, q);
}

}  // namespace padicdm
