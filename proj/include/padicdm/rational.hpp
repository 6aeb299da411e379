#pragma once

#include <boost/rational.hpp>

#include <cmath>
#include <cstdlib>
#include <string>

#include "padicdm/errors.hpp"

namespace padicdm {

// Valuations, radius exponents and polygon data: small exact rationals.
using Rational = boost::rational<long long>;

inline std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

inline Rational parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      long long n = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return Rational(n);
    }
    std::string a = text.substr(0, slash), b = text.substr(slash + 1);
    long long n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(text);
    long long d = std::stoll(b, &used);
    if (used != b.size() || d == 0) throw std::invalid_argument(text);
    return Rational(n, d);
  } catch (const std::logic_error&) {
    throw Error(Errc::SchemaError, "not a rational: '" + text + "'");
  }
}

inline long long floor_div(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline long long ceil_div(long long a, long long b) { return -floor_div(-a, b); }

inline long long floor(const Rational& r) { return floor_div(r.numerator(), r.denominator()); }
inline long long ceil(const Rational& r) { return ceil_div(r.numerator(), r.denominator()); }

// Rational with the smallest denominator in [lo, hi]; ties go to the value
// closest to zero.
inline Rational simplest_between(Rational lo, Rational hi) {
  if (hi < lo) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return -simplest_between(-hi, -lo);
  long long c = ceil(lo);
  if (Rational(c) <= hi) return Rational(c);
  long long f = floor(lo);
  Rational inner = simplest_between(Rational(1) / (hi - f), Rational(1) / (lo - f));
  return Rational(f) + Rational(1) / inner;
}

// Closest rational with denominator `den` not exceeding x.
inline Rational rational_floor(double x, long long den) {
  return Rational(static_cast<long long>(std::floor(x * static_cast<double>(den))), den);
}

}  // namespace padicdm
