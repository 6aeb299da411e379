#pragma once

#include <algorithm>
#include <vector>

#include "padicdm/scalar.hpp"

namespace padicdm {

// Polynomial with scalar coefficients, low to high.
using ScalarPoly = std::vector<PadicScalar>;

inline PadicScalar poly_eval(const ScalarPoly& g, const PadicScalar& x) {
  PadicScalar acc = PadicScalar::zero(x.field());
  for (std::size_t i = g.size(); i-- > 0;) acc = acc * x + g[i];
  return acc;
}

inline ScalarPoly poly_derivative(const ScalarPoly& g) {
  ScalarPoly d;
  for (std::size_t i = 1; i < g.size(); ++i)
    d.push_back(g[i] * scalar(g[i].field(), static_cast<long>(i)));
  return d;
}

// g(c + h*y) as a polynomial in y.
inline ScalarPoly poly_affine_substitute(const ScalarPoly& g, const PadicScalar& c,
                                         const PadicScalar& h) {
  const FieldPtr& F = c.field();
  ScalarPoly acc{PadicScalar::zero(F)};
  for (std::size_t i = g.size(); i-- > 0;) {
    ScalarPoly next(acc.size() + 1, PadicScalar::zero(F));
    for (std::size_t j = 0; j < acc.size(); ++j) {
      next[j] += acc[j] * c;
      next[j + 1] += acc[j] * h;
    }
    next[0] += g[i];
    acc = std::move(next);
  }
  return acc;
}

// Newton iteration from x0 under v(g(x0)) > 2 v(g'(x0)).
inline PadicScalar hensel_lift(const ScalarPoly& g, const PadicScalar& x0) {
  const FieldPtr& F = x0.field();
  ScalarPoly dg = poly_derivative(g);
  PadicScalar gx = poly_eval(g, x0);
  PadicScalar dx = poly_eval(dg, x0);
  if (gx.is_zero()) return x0;
  if (dx.is_zero() || !(gx.valuation_ticks() > 2 * dx.valuation_ticks()))
    throw Error(Errc::HenselHypothesisFailed,
                "need v(g(x0)) > 2 v(g'(x0)) at x0 = " + x0.str());
  // Iterates are taken as exact; the certified precision of the root is
  // prec(g(x)) - v(g'(x)).
  auto certified = [&](const PadicScalar& x) {
    PadicScalar r = poly_eval(g, x);
    PadicScalar d = poly_eval(dg, x);
    return x.with_precision_ticks(r.magnitude_ticks() - d.valuation_ticks());
  };
  PadicScalar x = x0.representative();
  int limit = 8;
  for (long span = F->e() * (F->digits() + 1); span > 1; span = (span + 1) / 2) ++limit;
  for (int it = 0; it < limit; ++it) {
    gx = poly_eval(g, x);
    if (gx.is_zero()) return certified(x);
    dx = poly_eval(dg, x);
    x = (x - gx / dx).representative();
  }
  if (poly_eval(g, x).is_zero()) return certified(x);
  throw Error(Errc::NoConvergence, "residual did not vanish at the precision cap");
}

namespace detail {

inline Field::Residue residue_poly_eval(const Field& F, const std::vector<Field::Residue>& g,
                                        const Field::Residue& x) {
  Field::Residue acc = F.residue_zero();
  for (std::size_t i = g.size(); i-- > 0;) acc = F.residue_add(F.residue_mul(acc, x), g[i]);
  return acc;
}

inline void integral_roots_rec(const ScalarPoly& g, const PadicScalar& base,
                               const PadicScalar& scale, int depth, std::vector<PadicScalar>& out) {
  const FieldPtr& F = base.field();
  long vmin = PadicScalar::kInf;
  for (const auto& c : g)
    if (!c.is_zero()) vmin = std::min(vmin, c.valuation_ticks());
  if (vmin >= PadicScalar::kInf)
    throw Error(Errc::FiberNotReduced, "polynomial vanishes identically at precision");
  PadicScalar norm = PadicScalar::uniformizer(F).pow(vmin).inverse();
  ScalarPoly h;
  for (const auto& c : g) h.push_back(c * norm);
  std::vector<Field::Residue> hr;
  for (const auto& c : h) hr.push_back(c.valuation_ticks() >= 0 ? c.residue() : F->residue_zero());
  std::vector<Field::Residue> dhr;
  for (std::size_t i = 1; i < hr.size(); ++i) {
    Field::Residue k = F->residue_zero();
    k[0] = static_cast<long>(i % F->p());
    dhr.push_back(F->residue_mul(hr[i], k));
  }
  for (long idx = 0; idx < F->residue_size(); ++idx) {
    Field::Residue r = F->residue_element(idx);
    if (!F->residue_is_zero(residue_poly_eval(*F, hr, r))) continue;
    PadicScalar lift = PadicScalar::lift_residue(F, r);
    if (!F->residue_is_zero(residue_poly_eval(*F, dhr, r))) {
      PadicScalar y = hensel_lift(h, lift);
      out.push_back((base + scale * y).representative());
      continue;
    }
    if (depth <= 0)
      throw Error(Errc::FiberNotReduced, "repeated root persists to the precision cap");
    PadicScalar pi = PadicScalar::uniformizer(F);
    integral_roots_rec(poly_affine_substitute(h, lift, pi), base + scale * lift, scale * pi,
                       depth - 1, out);
  }
}

}  // namespace detail

// All roots of g in the valuation ring of the field, by residue enumeration
// with Hensel lifting of simple residue roots and refinement of multiple ones.
inline std::vector<PadicScalar> integral_roots(const ScalarPoly& g) {
  if (g.empty()) return {};
  const FieldPtr& F = g.front().field();
  std::vector<PadicScalar> out;
  int depth = static_cast<int>(F->e() * F->digits());
  detail::integral_roots_rec(g, PadicScalar::zero(F), scalar(F, 1), depth, out);
  return out;
}

namespace detail {

inline bool is_one(const PadicScalar& x) { return (x - scalar(x.field(), 1)).is_zero(); }

inline bool primitive(const PadicScalar& z, long n) {
  if (!is_one(z.pow(n))) return false;
  for (long m = 1; m < n; ++m)
    if (is_one(z.pow(m))) return false;
  return true;
}

}  // namespace detail

// Primitive n-th root of unity: n = 2, n | p^f - 1 (Teichmuller lift of a
// residue generator), or n = p in a field of degree p - 1 over Q_p that
// contains the p-th cyclotomic field.
inline PadicScalar root_of_unity(long n, const FieldPtr& F) {
  if (n < 1) throw Error(Errc::UnsupportedRoot, "order must be positive");
  const long p = F->p();
  if (n == 1) return scalar(F, 1);
  if (n == 2) return scalar(F, -1);
  ScalarPoly xn(static_cast<std::size_t>(n) + 1, PadicScalar::zero(F));
  xn[0] = scalar(F, -1);
  xn[n] = scalar(F, 1);
  long q = F->residue_size() - 1;
  if (q % n == 0) {
    for (long idx = 1; idx < F->residue_size(); ++idx) {
      Field::Residue r = F->residue_element(idx);
      if (!F->residue_is_zero(F->residue_add(F->residue_pow(r, static_cast<unsigned long long>(n)),
                                             F->residue_element(p - 1))))
        continue;
      bool prim = true;
      for (long m = 1; m < n && prim; ++m)
        if (n % m == 0 &&
            F->residue_is_zero(F->residue_add(F->residue_pow(r, static_cast<unsigned long long>(m)),
                                              F->residue_element(p - 1))))
          prim = false;
      if (!prim) continue;
      return hensel_lift(xn, PadicScalar::lift_residue(F, r));
    }
  }
  if (n == p && F->kind() == ExtensionKind::Eisenstein && F->degree() == p - 1) {
    ScalarPoly cyclo(static_cast<std::size_t>(p), scalar(F, 1));
    PadicScalar guess = scalar(F, 1) - PadicScalar::generator(F);
    PadicScalar z;
    try {
      z = hensel_lift(cyclo, guess);
    } catch (const Error&) {
      std::vector<PadicScalar> roots = integral_roots(cyclo);
      if (roots.empty()) throw Error(Errc::UnsupportedRoot, "field lacks p-th roots of unity");
      z = *std::min_element(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
        return (a - guess).magnitude_ticks() > (b - guess).magnitude_ticks();
      });
    }
    if (detail::primitive(z, n)) return z;
  }
  throw Error(Errc::UnsupportedRoot,
              "no supported primitive " + std::to_string(n) + "-th root of unity in " +
                  F->describe());
}

}  // namespace padicdm
