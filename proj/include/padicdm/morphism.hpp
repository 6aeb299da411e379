#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "padicdm/polygon.hpp"
#include "padicdm/series.hpp"

namespace padicdm {

// s = f(t) on the open unit disc; d is the number of zeros of f - f(0) there.
class DiscMorphism {
 public:
  DiscMorphism() = default;

  explicit DiscMorphism(TruncatedSeries f, std::optional<int> declared_degree = std::nullopt)
      : f_(std::move(f)) {
    TruncatedSeries g = f_;
    std::vector<PadicScalar> c = g.coeffs();
    c[0] = PadicScalar::zero(f_.field());
    g = TruncatedSeries(f_.center(), std::move(c), f_.var());
    if (g.is_zero()) throw Error(Errc::ZeroSeries, "constant morphism");
    d_ = valuation_polygon(g).right_slope(Rational(0));
    if (declared_degree && *declared_degree != d_)
      throw Error(Errc::DegreeMismatch, "declared degree " + std::to_string(*declared_degree) +
                                            " but the polygon gives " + std::to_string(d_));
  }

  const TruncatedSeries& f() const { return f_; }
  int degree() const { return d_; }
  const FieldPtr& field() const { return f_.field(); }

  // f' has no zero in the open unit disc.
  bool is_etale() const {
    TruncatedSeries df = polynomial_derivative(f_);
    if (df[0].is_zero()) return false;
    return valuation_polygon(df).right_slope(Rational(0)) == 0;
  }

  // f as a polynomial, or nullopt when nonzero coefficients reach the truncation.
  std::optional<ScalarPoly> polynomial() const {
    int last = -1;
    for (int i = 0; i < f_.order(); ++i)
      if (!f_[i].is_zero()) last = i;
    if (last < 0 || last >= f_.order() - 1 || !f_.center().is_zero()) return std::nullopt;
    return ScalarPoly(f_.coeffs().begin(), f_.coeffs().begin() + last + 1);
  }

 private:
  TruncatedSeries f_;
  int d_ = 0;
};

inline void require_in_unit_disc(const PadicScalar& a) {
  if (!a.is_zero() && a.valuation_ticks() < 0)
    throw Error(Errc::ShiftOutsideDisc, a.str() + " is not in the unit disc");
}

// Exponent of the radius of the image of the disc of exponent l around a.
inline Rational image_radius(const DiscMorphism& phi, const PadicScalar& a, const Rational& l) {
  require_in_unit_disc(a);
  return valuation_polygon(taylor_shift(phi.f(), a)).vq(l);
}

inline int local_degree(const DiscMorphism& phi, const PadicScalar& a, const Rational& l) {
  require_in_unit_disc(a);
  return valuation_polygon(taylor_shift(phi.f(), a)).right_slope(l);
}

inline int local_degree_closed(const DiscMorphism& phi, const PadicScalar& a, const Rational& l) {
  require_in_unit_disc(a);
  return valuation_polygon(taylor_shift(phi.f(), a)).left_slope(l);
}

struct Fiber {
  PadicScalar target;
  std::vector<PadicScalar> points;

  int size() const { return static_cast<int>(points.size()); }
};

inline Rational distance_exponent(const PadicScalar& a, const PadicScalar& b) {
  PadicScalar d = a - b;
  if (d.is_zero()) throw Error(Errc::FiberNotReduced, "points coincide at precision");
  return *d.valuation();
}

inline void check_reduced(const std::vector<PadicScalar>& pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if ((pts[i] - pts[j]).is_zero())
        throw Error(Errc::FiberNotReduced, "preimages " + std::to_string(i) + " and " +
                                               std::to_string(j) + " coincide at precision");
}

inline void sort_canonical(std::vector<PadicScalar>& pts) {
  std::stable_sort(pts.begin(), pts.end(), [](const PadicScalar& a, const PadicScalar& b) {
    return a.compare_canonical(b) < 0;
  });
}

// Preimages of b in the open unit disc. Hints fix both the points and their
// order; otherwise f must be a polynomial whose roots lie in the field.
inline Fiber fiber(const DiscMorphism& phi, const PadicScalar& b,
                   const std::optional<std::vector<PadicScalar>>& hints = std::nullopt) {
  const int d = phi.degree();
  Fiber out{b, {}};
  if (hints) {
    if (static_cast<int>(hints->size()) != d)
      throw Error(Errc::DimensionMismatch, "expected " + std::to_string(d) + " preimages");
    for (const auto& a : *hints) {
      require_in_unit_disc(a);
      if (!(phi.f().evaluate(a) - b).is_zero())
        throw Error(Errc::NotAFiberPoint, a.str() + " does not map to " + b.str());
    }
    out.points = *hints;
    check_reduced(out.points);
    return out;
  }
  auto poly = phi.polynomial();
  if (!poly)
    throw Error(Errc::RootsNotInDeclaredField,
                "fiber search needs f to be a polynomial at center 0; pass preimage hints");
  ScalarPoly g = *poly;
  g[0] -= b;
  std::vector<PadicScalar> roots = integral_roots(g);
  for (const auto& r : roots)
    if (r.is_zero() || r.valuation_ticks() > 0) out.points.push_back(r);
  check_reduced(out.points);
  if (out.size() < d)
    throw Error(Errc::RootsNotInDeclaredField,
                "found " + std::to_string(out.size()) + " of " + std::to_string(d) +
                    " preimages in " + phi.field()->describe());
  if (out.size() > d) throw Error(Errc::FiberNotReduced, "more preimages than the degree");
  sort_canonical(out.points);
  return out;
}

struct BranchPoint {
  int representative = 0;        // least fiber index below the point
  Rational t_radius{0};          // the point is eta_{a_rep, |p|^t_radius}
  std::optional<Rational> branch_radius;
  int delta = 0;
  std::vector<std::vector<int>> branches;  // each sorted; ordered by least index
  std::vector<int> members;                // union of the branches
};

struct TreeOverPoint {
  Fiber fib;
  std::vector<std::vector<std::optional<Rational>>> distances;  // v(a_i - a_j); nullopt on diagonal
  std::vector<BranchPoint> branch_points;  // ascending t_radius, then representative

  int size() const { return fib.size(); }

  // Open disc {x : v(x - a_c) > l} contains a_i.
  bool in_disc(int c, const Rational& l, int i) const {
    return i == c || *distances[c][i] > l;
  }
};

// Branching data forced by the fiber: at each distance level l, a class of
// points pairwise at distance >= l splitting into >= 2 classes at > l.
inline TreeOverPoint tree_over_fiber(const Fiber& fib, const DiscMorphism* phi = nullptr) {
  const int n = fib.size();
  TreeOverPoint tree;
  tree.fib = fib;
  tree.distances.assign(static_cast<std::size_t>(n),
                        std::vector<std::optional<Rational>>(static_cast<std::size_t>(n)));
  std::vector<Rational> levels;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        tree.distances[i][j] = distance_exponent(fib.points[i], fib.points[j]);
        levels.push_back(*tree.distances[i][j]);
      }
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  for (const auto& l : levels) {
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int i = 0; i < n; ++i) {
      if (seen[i]) continue;
      std::vector<int> cls;
      for (int j = 0; j < n; ++j)
        if (j == i || *tree.distances[i][j] >= l) {
          cls.push_back(j);
          seen[j] = true;
        }
      if (cls.size() < 2) continue;
      std::vector<std::vector<int>> parts;
      std::vector<bool> used(static_cast<std::size_t>(n), false);
      for (int a : cls) {
        if (used[a]) continue;
        std::vector<int> part;
        for (int b : cls)
          if (b == a || *tree.distances[a][b] > l) {
            part.push_back(b);
            used[b] = true;
          }
        parts.push_back(std::move(part));
      }
      if (parts.size() < 2) continue;
      BranchPoint bp;
      bp.representative = cls.front();
      bp.t_radius = l;
      bp.delta = static_cast<int>(parts.size());
      bp.branches = std::move(parts);
      bp.members = cls;
      if (phi) bp.branch_radius = image_radius(*phi, fib.points[bp.representative], l);
      tree.branch_points.push_back(std::move(bp));
    }
  }
  return tree;
}

inline TreeOverPoint tree_over_point(const DiscMorphism& phi, const Fiber& fib) {
  return tree_over_fiber(fib, &phi);
}

struct EulerCount {
  int lhs = 0;
  int rhs = 0;
};

// Over the open disc {v(x - a_c) > l}: sum of (delta - 1) over branching
// points inside, plus one, against the number of preimages inside.
inline EulerCount euler_count(const TreeOverPoint& tree, int center, const Rational& l) {
  EulerCount out;
  out.lhs = 1;
  for (const auto& bp : tree.branch_points)
    if (bp.t_radius > l && tree.in_disc(center, l, bp.representative)) out.lhs += bp.delta - 1;
  for (int i = 0; i < tree.size(); ++i)
    if (tree.in_disc(center, l, i)) ++out.rhs;
  return out;
}

// u_a(s) = a + reversion of f(a + x) - f(a), as a series in s at b.
inline TruncatedSeries local_solution(const DiscMorphism& phi, const PadicScalar& a,
                                      const PadicScalar& b, const std::string& var = "s") {
  if (!(phi.f().evaluate(a) - b).is_zero())
    throw Error(Errc::NotAFiberPoint, a.str() + " does not map to " + b.str());
  TruncatedSeries shifted = taylor_shift(phi.f(), a);
  if (shifted.order() < 2 || shifted[1].is_zero())
    throw Error(Errc::SingularFiberPoint, "f'(a) vanishes at " + a.str());
  TruncatedSeries g = reversion(shifted);
  std::vector<PadicScalar> c = g.coeffs();
  c[0] = a;
  return {b, std::move(c), var};
}

struct MonicRelation {
  // P(s, X) = X^d + sum_{j<d} coeffs[j](s) X^j
  std::vector<TruncatedSeries> coeffs;

  int degree() const { return static_cast<int>(coeffs.size()); }
  int order() const { return coeffs.front().order(); }
  const PadicScalar& center() const { return coeffs.front().center(); }
  const std::string& var() const { return coeffs.front().var(); }
};

inline MonicRelation monic_relation_from(const std::vector<TruncatedSeries>& u) {
  if (u.empty()) throw Error(Errc::DimensionMismatch, "no local solutions");
  const TruncatedSeries& ref = u.front();
  int n = ref.order();
  for (const auto& x : u) n = std::min(n, x.order());
  TruncatedSeries one = TruncatedSeries::constant(scalar(ref.field(), 1), ref.center(), n, ref.var());
  std::vector<TruncatedSeries> poly{one};
  for (const auto& ui : u) {
    TruncatedSeries neg = -ui.truncated(n);
    std::vector<TruncatedSeries> next(poly.size() + 1, TruncatedSeries::zero(ref.center(), n, ref.var()));
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] += poly[j] * neg;
    }
    poly = std::move(next);
  }
  poly.pop_back();
  return MonicRelation{std::move(poly)};
}

inline std::vector<TruncatedSeries> local_solutions(const DiscMorphism& phi, const Fiber& fib,
                                                    const std::string& var = "s") {
  std::vector<TruncatedSeries> u;
  for (const auto& a : fib.points) u.push_back(local_solution(phi, a, fib.target, var));
  return u;
}

inline MonicRelation monic_relation(const DiscMorphism& phi, const Fiber& fib) {
  return monic_relation_from(local_solutions(phi, fib));
}

// sum_m g_m(s) u_a(s)^m by Horner.
inline TruncatedSeries section_apply(const std::vector<TruncatedSeries>& g_coords,
                                     const TruncatedSeries& u) {
  if (g_coords.empty()) throw Error(Errc::DimensionMismatch, "empty coordinate list");
  TruncatedSeries acc = g_coords.back();
  for (std::size_t m = g_coords.size() - 1; m-- > 0;) acc = acc * u + g_coords[m];
  return acc;
}

}  // namespace padicdm
