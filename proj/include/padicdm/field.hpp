#pragma once

#include <gmpxx.h>

#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "padicdm/errors.hpp"

namespace padicdm {

enum class ExtensionKind { Base, Eisenstein, Unramified };

class Field;
using FieldPtr = std::shared_ptr<const Field>;

namespace detail {

// Dense polynomials over F_p, low to high, no trailing zeros.
using FpPoly = std::vector<long>;

inline long mod_p(long a, long p) {
  a %= p;
  return a < 0 ? a + p : a;
}

inline void fp_trim(FpPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline long fp_inv(long a, long p) {
  long t = 0, nt = 1, r = p, nr = mod_p(a, p);
  while (nr != 0) {
    long q = r / nr;
    long tmp = t - q * nt; t = nt; nt = tmp;
    tmp = r - q * nr; r = nr; nr = tmp;
  }
  return mod_p(t, p);
}

inline FpPoly fp_sub(FpPoly a, const FpPoly& b, long p) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] = mod_p(a[i] - b[i], p);
  fp_trim(a);
  return a;
}

inline FpPoly fp_rem(FpPoly a, const FpPoly& m, long p) {
  fp_trim(a);
  long lead_inv = fp_inv(m.back(), p);
  while (a.size() >= m.size()) {
    long c = a.back() * lead_inv % p;
    std::size_t shift = a.size() - m.size();
    for (std::size_t i = 0; i < m.size(); ++i) a[shift + i] = mod_p(a[shift + i] - c * m[i], p);
    fp_trim(a);
  }
  return a;
}

inline FpPoly fp_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, long p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
  return fp_rem(std::move(r), m, p);
}

inline FpPoly fp_powmod(FpPoly base, unsigned long long n, const FpPoly& m, long p) {
  FpPoly r{1};
  base = fp_rem(std::move(base), m, p);
  while (n > 0) {
    if (n & 1ULL) r = fp_mulmod(r, base, m, p);
    base = fp_mulmod(base, base, m, p);
    n >>= 1ULL;
  }
  return r;
}

inline FpPoly fp_gcd(FpPoly a, FpPoly b, long p) {
  fp_trim(a);
  fp_trim(b);
  while (!b.empty()) {
    FpPoly r = fp_rem(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// Rabin's test.
inline bool fp_irreducible(const FpPoly& m, long p) {
  int n = static_cast<int>(m.size()) - 1;
  if (n <= 0) return false;
  if (n == 1) return true;
  auto frob_iter = [&](int k) {
    FpPoly x{0, 1};
    FpPoly r = x;
    for (int i = 0; i < k; ++i) r = fp_powmod(r, static_cast<unsigned long long>(p), m, p);
    return fp_sub(r, x, p);
  };
  if (!frob_iter(n).empty()) return false;
  for (int q = 2; q <= n; ++q) {
    if (n % q != 0) continue;
    bool prime = true;
    for (int r = 2; r * r <= q; ++r)
      if (q % r == 0) prime = false;
    if (!prime) continue;
    FpPoly g = fp_gcd(m, frob_iter(n / q), p);
    if (g.size() > 1) return false;
  }
  return true;
}

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace detail

// Q_p or a single Eisenstein / unramified extension of it, together with the
// relative precision cap (significant p-adic digits).
class Field {
 public:
  using Residue = std::vector<long>;  // coordinates over F_p, length f

  static FieldPtr base(long p, int digits) {
    return std::shared_ptr<const Field>(
        new Field(p, ExtensionKind::Base, {mpz_class(0), mpz_class(1)}, 1, 1, digits));
  }

  // `poly` is monic, low to high.
  static FieldPtr extension(long p, std::vector<mpz_class> poly, int e, int f, int digits) {
    if (poly.size() <= 2) {
      if (e != 1 || f != 1)
        throw Error(Errc::InvalidField, "degree-1 polynomial needs e = f = 1");
      return base(p, digits);
    }
    int degree = static_cast<int>(poly.size()) - 1;
    if (e < 1 || f < 1 || e * f != degree)
      throw Error(Errc::InvalidField, "e*f must equal the degree of the defining polynomial");
    if (poly.back() != 1) throw Error(Errc::InvalidField, "defining polynomial must be monic");
    if (e > 1 && f > 1) throw Error(Errc::InvalidField, "towers are not supported");
    ExtensionKind kind = e > 1 ? ExtensionKind::Eisenstein : ExtensionKind::Unramified;
    return std::shared_ptr<const Field>(new Field(p, kind, std::move(poly), e, f, digits));
  }

  long p() const { return p_; }
  int e() const { return e_; }
  int f() const { return f_; }
  int degree() const { return e_ * f_; }
  int digits() const { return digits_; }
  ExtensionKind kind() const { return kind_; }
  const std::vector<mpz_class>& poly() const { return poly_; }

  // Valuation in ticks (units of 1/e) of the i-th power basis element.
  long offset(int i) const { return kind_ == ExtensionKind::Eisenstein ? i : 0; }

  mpz_class pow_p(long n) const {
    if (n < 0) throw Error(Errc::InvalidField, "negative power of p requested");
    if (static_cast<std::size_t>(n) < pow_cache_.size()) return pow_cache_[n];
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(n));
    return r;
  }

  bool operator==(const Field& o) const {
    return p_ == o.p_ && e_ == o.e_ && f_ == o.f_ && digits_ == o.digits_ && poly_ == o.poly_;
  }
  bool operator!=(const Field& o) const { return !(*this == o); }

  std::string describe() const {
    std::ostringstream os;
    if (kind_ == ExtensionKind::Base) {
      os << "Q_" << p_;
    } else {
      os << "Q_" << p_ << "[x]/(";
      for (std::size_t i = poly_.size(); i-- > 0;) {
        if (poly_[i] == 0) continue;
        if (i + 1 != poly_.size()) os << (poly_[i] < 0 ? " - " : " + ");
        mpz_class c = abs(poly_[i]);
        if (i == 0 || c != 1) os << c.get_str();
        if (i > 0) os << "x" << (i > 1 ? "^" + std::to_string(i) : "");
      }
      os << ")";
    }
    os << " @" << digits_;
    return os.str();
  }

  // Residue field F_{p^f}.
  long residue_size() const {
    long n = 1;
    for (int i = 0; i < f_; ++i) n *= p_;
    return n;
  }

  Residue residue_element(long index) const {
    Residue r(static_cast<std::size_t>(f_), 0);
    for (int i = 0; i < f_; ++i) {
      r[i] = index % p_;
      index /= p_;
    }
    return r;
  }

  Residue residue_zero() const { return Residue(static_cast<std::size_t>(f_), 0); }
  Residue residue_one() const {
    Residue r = residue_zero();
    r[0] = 1;
    return r;
  }

  bool residue_is_zero(const Residue& a) const {
    for (long c : a)
      if (c != 0) return false;
    return true;
  }

  Residue residue_add(const Residue& a, const Residue& b) const {
    Residue r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = detail::mod_p(a[i] + b[i], p_);
    return r;
  }

  Residue residue_mul(const Residue& a, const Residue& b) const {
    if (f_ == 1) return {detail::mod_p(a[0] * b[0], p_)};
    detail::FpPoly pa(a.begin(), a.end()), pb(b.begin(), b.end());
    detail::fp_trim(pa);
    detail::fp_trim(pb);
    detail::FpPoly r = detail::fp_mulmod(pa, pb, residue_modulus_, p_);
    Residue out = residue_zero();
    for (std::size_t i = 0; i < r.size(); ++i) out[i] = r[i];
    return out;
  }

  Residue residue_pow(Residue a, unsigned long long n) const {
    Residue r = residue_one();
    while (n > 0) {
      if (n & 1ULL) r = residue_mul(r, a);
      a = residue_mul(a, a);
      n >>= 1ULL;
    }
    return r;
  }

 private:
  Field(long p, ExtensionKind kind, std::vector<mpz_class> poly, int e, int f, int digits)
      : p_(p), e_(e), f_(f), digits_(digits), kind_(kind), poly_(std::move(poly)) {
    if (!detail::is_prime(p)) throw Error(Errc::InvalidField, "p must be prime");
    if (digits < 1) throw Error(Errc::InvalidField, "digits must be >= 1");
    mpz_class pz(p);
    if (kind == ExtensionKind::Eisenstein) {
      for (std::size_t i = 0; i + 1 < poly_.size(); ++i)
        if (poly_[i] % pz != 0)
          throw Error(Errc::InvalidField, "Eisenstein polynomial: p must divide lower coefficients");
      if (poly_[0] % (pz * pz) == 0)
        throw Error(Errc::InvalidField, "Eisenstein polynomial: p^2 divides the constant term");
    }
    if (kind == ExtensionKind::Unramified) {
      detail::FpPoly red;
      for (const auto& c : poly_) {
        mpz_class r;
        mpz_fdiv_r(r.get_mpz_t(), c.get_mpz_t(), pz.get_mpz_t());
        red.push_back(r.get_si());
      }
      detail::fp_trim(red);
      if (!detail::fp_irreducible(red, p))
        throw Error(Errc::InvalidField, "defining polynomial is reducible modulo p");
      residue_modulus_ = red;
    }
    long limit = 8L * digits + 128;
    pow_cache_.reserve(static_cast<std::size_t>(limit));
    mpz_class acc(1);
    for (long i = 0; i < limit; ++i) {
      pow_cache_.push_back(acc);
      acc *= p;
    }
  }

  long p_;
  int e_, f_, digits_;
  ExtensionKind kind_;
  std::vector<mpz_class> poly_;
  detail::FpPoly residue_modulus_;
  std::vector<mpz_class> pow_cache_;
};

inline void require_same_field(const FieldPtr& a, const FieldPtr& b) {
  if (a != b && (!a || !b || *a != *b))
    throw Error(Errc::FieldMismatch, "operands live in different fields");
}

}  // namespace padicdm
