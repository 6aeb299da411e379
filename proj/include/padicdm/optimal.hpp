#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "padicdm/diffmod.hpp"
#include "padicdm/matrix.hpp"
#include "padicdm/morphism.hpp"

namespace padicdm {

// ---- Vandermonde transfer ---------------------------------------------------

struct VandermondeData {
  std::vector<TruncatedSeries> u;  // local solutions in fiber order
  SeriesMatrix U;                  // U[i][m] = u_i^m
  SeriesMatrix V;                  // U^{-1}

  int degree() const { return static_cast<int>(u.size()); }
};

inline VandermondeData vandermonde(const Fiber& fib, const std::vector<TruncatedSeries>& u) {
  const int d = static_cast<int>(u.size());
  if (d != fib.size()) throw Error(Errc::DimensionMismatch, "one local solution per preimage");
  for (int i = 0; i < d; ++i)
    if (!(u[i][0] - fib.points[i]).is_zero())
      throw Error(Errc::DimensionMismatch, "local solution " + std::to_string(i) +
                                               " does not start at its preimage");
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if ((u[i][0] - u[j][0]).is_zero())
        throw Error(Errc::DegenerateFiber, "two local solutions share a constant term");
  VandermondeData out;
  out.u = u;
  const TruncatedSeries& ref = u.front();
  int N = ref.order();
  for (const auto& x : u) N = std::min(N, x.order());
  TruncatedSeries one = TruncatedSeries::constant(scalar(ref.field(), 1), ref.center(), N, ref.var());
  out.U.assign(static_cast<std::size_t>(d), SeriesVector{});
  for (int i = 0; i < d; ++i) {
    TruncatedSeries pw = one;
    for (int m = 0; m < d; ++m) {
      out.U[i].push_back(pw);
      pw = pw * u[i].truncated(N);
    }
  }
  auto inv = try_inverse(out.U);
  if (!inv) throw Error(Errc::DegenerateFiber, "Vandermonde matrix is singular at precision");
  out.V = std::move(*inv);
  return out;
}

// Open disc {x : v(x - a_center) > q}.
struct Disc {
  int center = 0;
  Rational q{0};
};

inline std::vector<int> disc_members(const TreeOverPoint& tree, const Disc& D) {
  std::vector<int> out;
  for (int i = 0; i < tree.size(); ++i)
    if (tree.in_disc(D.center, D.q, i)) out.push_back(i);
  return out;
}

inline std::vector<int> indicator_vector(const TreeOverPoint& tree, const Disc& D) {
  std::vector<int> v(static_cast<std::size_t>(tree.size()), 0);
  for (int i : disc_members(tree, D)) v[i] = 1;
  return v;
}

// blocks[i] holds the r coordinates of an upstairs element composed along
// u_i. Position j*d + i of the stacked vector holds blocks[i][j]; the result
// is (V + ... + V) applied to it, one copy of V per coordinate j.
inline SeriesVector transfer_coordinates(const std::vector<SeriesVector>& blocks,
                                         const VandermondeData& V) {
  const int d = V.degree();
  if (static_cast<int>(blocks.size()) != d)
    throw Error(Errc::DimensionMismatch, "one block per preimage expected");
  const int r = static_cast<int>(blocks.front().size());
  SeriesVector out;
  for (int j = 0; j < r; ++j) {
    SeriesVector stacked;
    for (int i = 0; i < d; ++i) {
      if (static_cast<int>(blocks[i].size()) != r)
        throw Error(Errc::DimensionMismatch, "blocks of unequal length");
      stacked.push_back(blocks[i][j]);
    }
    SeriesVector part = mat_vec(V.V, stacked);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

inline SeriesVector compose_along(const SeriesVector& y, const TruncatedSeries& u) {
  SeriesVector out;
  for (const auto& c : y) out.push_back(compose(c, u));
  return out;
}

inline SeriesVector zero_block(int r, const TruncatedSeries& like) {
  return SeriesVector(static_cast<std::size_t>(r),
                      TruncatedSeries::zero(like.center(), like.order(), like.var()));
}

// Columns indexed i*r + l: column l of the upstairs basis at a_i, transferred.
inline SeriesMatrix fundamental_solution_matrix(const std::vector<HorizontalMatrix>& bases,
                                                const VandermondeData& V) {
  const int d = V.degree();
  if (static_cast<int>(bases.size()) != d)
    throw Error(Errc::DimensionMismatch, "one upstairs basis per preimage expected");
  const int r = rows(bases.front().Y);
  SeriesMatrix out(static_cast<std::size_t>(r * d));
  for (int i = 0; i < d; ++i)
    for (int l = 0; l < r; ++l) {
      std::vector<SeriesVector> blocks(static_cast<std::size_t>(d), zero_block(r, V.u[i]));
      blocks[i] = compose_along(bases[i].column(l), V.u[i]);
      SeriesVector col = transfer_coordinates(blocks, V);
      for (int k = 0; k < r * d; ++k) out[k].push_back(col[k]);
    }
  return out;
}

// ---- Upstairs bases and linking ---------------------------------------------

struct UpstairsColumn {
  int id = 0;
  Rational q{0};  // radius exponent of convergence
  RadiusEstimate estimate;
  SeriesVector entries;  // series in t at the anchor preimage
};

struct UpstairsBasis {
  int anchor = 0;
  std::vector<UpstairsColumn> columns;
};

inline std::vector<UpstairsBasis> trivial_upstairs_bases(const Fiber& fib, int rank, int N,
                                                         const std::string& var = "t") {
  std::vector<UpstairsBasis> out;
  const FieldPtr& F = fib.target.field();
  for (int i = 0; i < fib.size(); ++i) {
    UpstairsBasis b{i, {}};
    for (int l = 0; l < rank; ++l) {
      UpstairsColumn c;
      c.id = i * rank + l;
      c.q = Rational(0);
      c.estimate = exact_radius(Rational(0));
      for (int k = 0; k < rank; ++k)
        c.entries.push_back(TruncatedSeries::constant(scalar(F, k == l ? 1 : 0), fib.points[i], N, var));
      b.columns.push_back(std::move(c));
    }
    out.push_back(std::move(b));
  }
  return out;
}

// D(e) = lambda e: the horizontal element exp(-lambda (t - a)) converges on
// v(t - a) > 1/(p-1) - v(lambda).
inline Rational exp_module_radius(const PadicScalar& lambda) {
  const FieldPtr& F = lambda.field();
  if (lambda.is_zero()) return Rational(0);
  return std::max(Rational(0), Rational(1, F->p() - 1) - *lambda.valuation());
}

inline std::vector<UpstairsBasis> exp_upstairs_bases(const Fiber& fib, const DiffModule& M,
                                                     const PadicScalar& lambda, int N) {
  std::vector<UpstairsBasis> out;
  Rational q = exp_module_radius(lambda);
  for (int i = 0; i < fib.size(); ++i) {
    HorizontalMatrix H = local_solution_matrix(M, fib.points[i], N);
    UpstairsColumn c;
    c.id = i;
    c.q = q;
    c.estimate = exact_radius(q);
    c.entries = H.column(0);
    out.push_back(UpstairsBasis{i, {std::move(c)}});
  }
  return out;
}

// Columns of the local fundamental matrices, with radii supplied by the
// caller or else taken from the tail estimates.
inline std::vector<UpstairsBasis> estimated_upstairs_bases(
    const Fiber& fib, const DiffModule& M, int N,
    const std::optional<std::vector<Rational>>& radii = std::nullopt) {
  std::vector<UpstairsBasis> out;
  for (int i = 0; i < fib.size(); ++i) {
    HorizontalMatrix H = local_solution_matrix(M, fib.points[i], N);
    UpstairsBasis b{i, {}};
    for (int l = 0; l < M.rank; ++l) {
      UpstairsColumn c;
      c.id = i * M.rank + l;
      c.estimate = H.radii[l];
      c.q = radii ? radii->at(static_cast<std::size_t>(l)) : H.radii[l].q;
      c.entries = H.column(l);
      b.columns.push_back(std::move(c));
    }
    std::stable_sort(b.columns.begin(), b.columns.end(),
                     [](const UpstairsColumn& x, const UpstairsColumn& y) { return x.q > y.q; });
    out.push_back(std::move(b));
  }
  return out;
}

namespace detail {

// Value of the truncation at x; when the truncation drops nonzero terms the
// precision is capped by the first omitted term extrapolated at slope -q.
inline PadicScalar evaluate_with_tail(const TruncatedSeries& y, const PadicScalar& x, const Rational& q) {
  PadicScalar val = y.evaluate(x);
  PadicScalar delta = x - y.center();
  if (delta.is_zero()) return val;
  const long e = y.field()->e();
  const int N = y.order();
  Rational vd = *delta.valuation();
  std::optional<Rational> bound;
  for (int n = N / 2; n < N; ++n) {
    if (y[n].is_zero()) continue;
    Rational est = *y[n].valuation() + Rational(N) * vd - Rational(N - n) * q;
    if (!bound || est < *bound) bound = est;
  }
  if (!bound) return val;
  return val.with_precision_ticks(floor(*bound * Rational(e)));
}

}  // namespace detail

// The same horizontal element expanded at b = a_j: Y_b(x) * Y(b), where Y_b
// is the fundamental matrix at b.
inline UpstairsColumn move_column(const UpstairsColumn& c, const PadicScalar& b, const DiffModule& M) {
  const int N = c.entries.front().order();
  HorizontalMatrix Hb = local_solution_matrix(M, b, N);
  SeriesVector values;
  for (const auto& y : c.entries) {
    PadicScalar v = detail::evaluate_with_tail(y, b, c.q);
    values.push_back(TruncatedSeries::constant(v, b, Hb.certified_order, M.var));
  }
  UpstairsColumn out = c;
  out.entries = mat_vec(Hb.Y, values);
  out.estimate = element_radius(out.entries);
  return out;
}

inline bool is_linked(const std::vector<UpstairsBasis>& bases, const Fiber& fib) {
  for (std::size_t i = 0; i < bases.size(); ++i)
    for (const auto& c : bases[i].columns)
      for (std::size_t j = 0; j < bases.size(); ++j) {
        if (i == j) continue;
        if (!(distance_exponent(fib.points[i], fib.points[j]) > c.q)) continue;
        bool found = std::any_of(bases[j].columns.begin(), bases[j].columns.end(),
                                 [&](const UpstairsColumn& o) { return o.id == c.id; });
        if (!found) return false;
      }
  return true;
}

// Processes preimages in fiber order; a column at a_i is copied into the same
// slot at every a_j inside its disc of convergence.
inline std::vector<UpstairsBasis> linked_bases(std::vector<UpstairsBasis> bases, const Fiber& fib,
                                               const DiffModule& M) {
  const int d = fib.size();
  if (static_cast<int>(bases.size()) != d)
    throw Error(Errc::DimensionMismatch, "one upstairs basis per preimage expected");
  for (int i = 0; i < d; ++i)
    for (std::size_t l = 0; l < bases[i].columns.size(); ++l) {
      const UpstairsColumn col = bases[i].columns[l];
      for (int j = 0; j < d; ++j) {
        if (j == i || !(distance_exponent(fib.points[i], fib.points[j]) > col.q)) continue;
        if (bases[j].columns.size() != bases[i].columns.size())
          throw Error(Errc::DimensionMismatch, "upstairs bases of unequal rank");
        if (bases[j].columns[l].id == col.id) continue;
        UpstairsColumn moved = move_column(col, fib.points[j], M);
        if (moved.estimate.stable && col.estimate.stable && moved.estimate.q != col.q)
          throw Error(Errc::InconsistentRadii,
                      "column " + std::to_string(col.id) + " estimates exponent " +
                          to_string(moved.estimate.q) + " at preimage " + std::to_string(j) +
                          " but carries " + to_string(col.q));
        bases[j].columns[l] = std::move(moved);
      }
    }
  if (!is_linked(bases, fib))
    throw Error(Errc::InconsistentRadii, "linking did not converge: radii are not nested");
  return bases;
}

// ---- Fundamental pairs, branch selection, optimal bases ------------------

struct FundamentalPair {
  int id = 0;
  int anchor = 0;  // least fiber index holding the column
  int slot = 0;
  Rational q{0};
  UpstairsColumn column;
  std::vector<int> members;  // preimages holding the column
  Disc disc() const { return Disc{anchor, q}; }
};

inline std::vector<FundamentalPair> fundamental_pairs(const std::vector<UpstairsBasis>& linked) {
  std::vector<FundamentalPair> out;
  std::set<int> seen;
  for (std::size_t i = 0; i < linked.size(); ++i)
    for (std::size_t l = 0; l < linked[i].columns.size(); ++l) {
      const auto& c = linked[i].columns[l];
      if (!seen.insert(c.id).second) continue;
      FundamentalPair p;
      p.id = c.id;
      p.anchor = static_cast<int>(i);
      p.slot = static_cast<int>(l);
      p.q = c.q;
      p.column = c;
      for (std::size_t k = 0; k < linked.size(); ++k)
        for (const auto& o : linked[k].columns)
          if (o.id == c.id) p.members.push_back(static_cast<int>(k));
      out.push_back(std::move(p));
    }
  return out;
}

// Which branch to leave out at each branching point.
enum class DropRule { SmallestLeastIndex, LargestLeastIndex };

inline DropRule parse_drop_rule(const std::string& s) {
  if (s == "first" || s == "smallest") return DropRule::SmallestLeastIndex;
  if (s == "last" || s == "largest") return DropRule::LargestLeastIndex;
  throw Error(Errc::SchemaError, "drop rule must be 'first' or 'last', got '" + s + "'");
}

inline const char* drop_rule_name(DropRule r) {
  return r == DropRule::SmallestLeastIndex ? "first" : "last";
}

struct BranchChoice {
  int branch_point = -1;  // -1: the pair's own disc
  int part = -1;
  Disc disc;
  std::vector<int> members;

  std::string label() const {
    if (branch_point < 0) return "disc";
    return "bp" + std::to_string(branch_point) + ".part" + std::to_string(part);
  }
};

struct SelectedBranches {
  int pair_id = 0;
  std::vector<BranchChoice> choices;
  std::vector<BranchChoice> dropped;
};

// The pair's disc U together with all but one branch at each branching point
// inside U.
inline SelectedBranches branch_selection(const TreeOverPoint& tree, const Disc& U, int pair_id,
                                         DropRule rule = DropRule::SmallestLeastIndex) {
  SelectedBranches sel;
  sel.pair_id = pair_id;
  BranchChoice own;
  own.disc = U;
  own.members = disc_members(tree, U);
  sel.choices.push_back(own);
  for (std::size_t k = 0; k < tree.branch_points.size(); ++k) {
    const BranchPoint& bp = tree.branch_points[k];
    if (!(bp.t_radius > U.q) || !tree.in_disc(U.center, U.q, bp.representative)) continue;
    int drop = rule == DropRule::SmallestLeastIndex ? 0 : bp.delta - 1;
    for (int part = 0; part < bp.delta; ++part) {
      BranchChoice c;
      c.branch_point = static_cast<int>(k);
      c.part = part;
      c.members = bp.branches[part];
      c.disc = Disc{c.members.front(), bp.t_radius};
      (part == drop ? sel.dropped : sel.choices).push_back(std::move(c));
    }
  }
  if (sel.choices.size() != own.members.size())
    throw Error(Errc::CountMismatch, "selected " + std::to_string(sel.choices.size()) +
                                         " branches for a disc holding " +
                                         std::to_string(own.members.size()) + " preimages");
  return sel;
}

inline SelectedBranches branch_selection(const TreeOverPoint& tree, const FundamentalPair& P,
                                         DropRule rule = DropRule::SmallestLeastIndex) {
  return branch_selection(tree, P.disc(), P.id, rule);
}

struct OptimalColumn {
  int pair_id = 0;
  int pair_anchor = 0;
  std::string branch;
  Disc disc;
  std::vector<int> members;
  Rational predicted_q{0};
  RadiusEstimate estimate;
  SeriesVector entries;
};

struct OptimalBasis {
  int rank = 1;
  int degree = 1;
  std::vector<OptimalColumn> columns;

  int size() const { return static_cast<int>(columns.size()); }
};

// Rank of the constant-term matrix of the columns (horizontal elements are
// independent iff their values at the center are).
inline int constant_rank(const std::vector<SeriesVector>& cols) {
  if (cols.empty()) return 0;
  const std::size_t n = cols.front().size();
  std::vector<std::vector<PadicScalar>> m;
  for (const auto& c : cols) {
    std::vector<PadicScalar> row;
    for (const auto& x : c) row.push_back(x[0]);
    m.push_back(std::move(row));
  }
  int rank = 0;
  for (std::size_t col = 0; col < n && rank < static_cast<int>(m.size()); ++col) {
    int piv = -1;
    for (int r = rank; r < static_cast<int>(m.size()); ++r) {
      if (m[r][col].is_zero()) continue;
      if (piv < 0 || m[r][col].valuation_ticks() < m[piv][col].valuation_ticks()) piv = r;
    }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    PadicScalar inv = m[rank][col].inverse();
    for (int r = rank + 1; r < static_cast<int>(m.size()); ++r) {
      if (m[r][col].is_zero()) continue;
      PadicScalar factor = m[r][col] * inv;
      for (std::size_t c = col; c < n; ++c) m[r][c] -= factor * m[rank][c];
    }
    ++rank;
  }
  return rank;
}

inline bool columns_independent(const OptimalBasis& b) {
  std::vector<SeriesVector> cols;
  for (const auto& c : b.columns) cols.push_back(c.entries);
  return constant_rank(cols) == b.size();
}

inline RadiusEstimate series_window_radius(const SeriesVector& col) { return element_radius(col); }

// V . (1, ..., 1)^T together with V . v_U for the kept branches.
inline OptimalBasis trivial_optimal_basis(const TreeOverPoint& tree, const VandermondeData& V,
                                          const DiscMorphism* phi = nullptr,
                                          DropRule rule = DropRule::SmallestLeastIndex) {
  const int d = V.degree();
  OptimalBasis out;
  out.rank = 1;
  out.degree = d;
  SelectedBranches sel = branch_selection(tree, Disc{0, Rational(0)}, 0, rule);
  const TruncatedSeries& like = V.u.front();
  for (const auto& ch : sel.choices) {
    std::vector<SeriesVector> blocks;
    std::vector<int> ind = indicator_vector(tree, ch.disc);
    for (int i = 0; i < d; ++i)
      blocks.push_back({TruncatedSeries::constant(scalar(like.field(), ind[i]), like.center(),
                                                  like.order(), like.var())});
    OptimalColumn col;
    col.pair_id = 0;
    col.pair_anchor = 0;
    col.branch = ch.label();
    col.disc = ch.disc;
    col.members = ch.members;
    if (ch.branch_point >= 0 && tree.branch_points[ch.branch_point].branch_radius)
      col.predicted_q = *tree.branch_points[ch.branch_point].branch_radius;
    else if (phi)
      col.predicted_q = image_radius(*phi, tree.fib.points[ch.disc.center], ch.disc.q);
    col.entries = transfer_coordinates(blocks, V);
    col.estimate = element_radius(col.entries);
    out.columns.push_back(std::move(col));
  }
  return out;
}

namespace detail {

inline const UpstairsColumn& column_with_id(const std::vector<UpstairsBasis>& linked, int k, int id) {
  for (const auto& c : linked[k].columns)
    if (c.id == id) return c;
  throw Error(Errc::InconsistentRadii,
              "column " + std::to_string(id) + " is missing at preimage " + std::to_string(k));
}

inline SeriesVector pair_column(const std::vector<UpstairsBasis>& linked, int id,
                                const std::vector<int>& members, const VandermondeData& V) {
  const int d = V.degree();
  const int r = static_cast<int>(linked.front().columns.front().entries.size());
  std::vector<SeriesVector> blocks;
  for (int k = 0; k < d; ++k) {
    if (std::find(members.begin(), members.end(), k) == members.end()) {
      blocks.push_back(zero_block(r, V.u[k]));
    } else {
      blocks.push_back(compose_along(column_with_id(linked, k, id).entries, V.u[k]));
    }
  }
  return transfer_coordinates(blocks, V);
}

}  // namespace detail

// One column per fundamental pair and selected branch: the pair's element on
// the preimages of the branch, zero elsewhere, transferred by V.
inline OptimalBasis optimal_basis(const std::vector<UpstairsBasis>& linked,
                                  const std::vector<FundamentalPair>& pairs,
                                  const TreeOverPoint& tree, const VandermondeData& V,
                                  const DiscMorphism& phi,
                                  DropRule rule = DropRule::SmallestLeastIndex) {
  OptimalBasis out;
  out.degree = V.degree();
  out.rank = static_cast<int>(linked.front().columns.size());
  for (const auto& P : pairs) {
    SelectedBranches sel = branch_selection(tree, P, rule);
    for (const auto& ch : sel.choices) {
      OptimalColumn col;
      col.pair_id = P.id;
      col.pair_anchor = P.anchor;
      col.branch = ch.label();
      col.disc = ch.disc;
      col.members = ch.members;
      col.predicted_q = image_radius(phi, tree.fib.points[ch.disc.center], ch.disc.q);
      col.entries = detail::pair_column(linked, P.id, ch.members, V);
      col.estimate = element_radius(col.entries);
      out.columns.push_back(std::move(col));
    }
  }
  if (out.size() != out.rank * out.degree)
    throw Error(Errc::CountMismatch, "built " + std::to_string(out.size()) + " columns, expected " +
                                         std::to_string(out.rank * out.degree));
  return out;
}

// Replaces the disc column of the first pair that contains a branching point
// by the column of the branch its selection left out. The result spans the
// same space but is not optimal. nullopt when no pair contains a branching point.
inline std::optional<OptimalBasis> corrupt_with_dropped_branch(
    const OptimalBasis& basis, const std::vector<UpstairsBasis>& linked,
    const std::vector<FundamentalPair>& pairs, const TreeOverPoint& tree, const VandermondeData& V,
    const DiscMorphism& phi, DropRule rule = DropRule::SmallestLeastIndex) {
  for (const auto& P : pairs) {
    SelectedBranches sel = branch_selection(tree, P, rule);
    if (sel.dropped.empty()) continue;
    const BranchChoice& ch = sel.dropped.front();
    OptimalBasis out = basis;
    for (auto& col : out.columns) {
      if (col.pair_id != P.id || col.branch != "disc") continue;
      col.branch = ch.label();
      col.disc = ch.disc;
      col.members = ch.members;
      col.predicted_q = image_radius(phi, tree.fib.points[ch.disc.center], ch.disc.q);
      col.entries = detail::pair_column(linked, P.id, ch.members, V);
      col.estimate = element_radius(col.entries);
      return out;
    }
  }
  return std::nullopt;
}

// Declares the first column at a radius exponent it does not have.
inline OptimalBasis corrupt_declared_radius(const OptimalBasis& basis) {
  OptimalBasis out = basis;
  auto& col = out.columns.front();
  col.predicted_q = col.predicted_q == Rational(0) ? Rational(1) : Rational(0);
  return out;
}

struct ClassReport {
  Rational q{0};
  std::vector<int> columns;
  bool exhaustive = false;
  int combinations = 0;
  int failures = 0;
  std::vector<long> first_failure;  // coefficients of the first failing combination
  Rational first_failure_q{0};
};

struct AgreementReport {
  int column = 0;
  Rational predicted{0};
  Rational estimated{0};
  bool stable = false;
  bool pass = false;
};

struct OptimalityReport {
  std::vector<ClassReport> classes;
  std::vector<AgreementReport> agreement;
  bool pass = true;
};

// Within each class of columns sharing an estimated exponent, every nonzero
// combination must keep that exponent. Coefficient vectors in {-1,0,1}^J are
// enumerated when there are at most `trials` of them; otherwise `trials`
// seeded draws from [-3, 3]^J. Each column's predicted exponent must also
// match its estimate.
inline OptimalityReport optimality_check(const OptimalBasis& basis, int trials, std::uint64_t seed) {
  OptimalityReport rep;
  std::map<Rational, std::vector<int>> classes;
  for (int k = 0; k < basis.size(); ++k) classes[basis.columns[k].estimate.q].push_back(k);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<long> coef(-3, 3);
  for (const auto& [q, members] : classes) {
    ClassReport cr;
    cr.q = q;
    cr.columns = members;
    const int m = static_cast<int>(members.size());
    long total = 1;
    for (int i = 0; i < m && total <= trials + 1; ++i) total *= 3;
    cr.exhaustive = total - 1 <= trials;
    std::vector<std::vector<long>> draws;
    if (cr.exhaustive) {
      for (long code = 0; code < total; ++code) {
        std::vector<long> c;
        long x = code;
        for (int i = 0; i < m; ++i) {
          c.push_back(x % 3 - 1);
          x /= 3;
        }
        if (std::all_of(c.begin(), c.end(), [](long v) { return v == 0; })) continue;
        draws.push_back(std::move(c));
      }
    } else {
      while (static_cast<int>(draws.size()) < trials) {
        std::vector<long> c;
        for (int i = 0; i < m; ++i) c.push_back(coef(rng));
        if (std::all_of(c.begin(), c.end(), [](long v) { return v == 0; })) continue;
        draws.push_back(std::move(c));
      }
    }
    for (const auto& c : draws) {
      SeriesVector comb;
      const FieldPtr& F = basis.columns[members[0]].entries.front().field();
      for (int i = 0; i < m; ++i) {
        const auto& entries = basis.columns[members[i]].entries;
        PadicScalar w = scalar(F, c[i]);
        if (comb.empty()) {
          for (const auto& x : entries) comb.push_back(w * x);
        } else {
          for (std::size_t k = 0; k < entries.size(); ++k) comb[k] += w * entries[k];
        }
      }
      RadiusEstimate est = element_radius(comb);
      ++cr.combinations;
      if (est.q != q) {
        if (cr.failures == 0) {
          cr.first_failure = c;
          cr.first_failure_q = est.q;
        }
        ++cr.failures;
      }
    }
    rep.pass = rep.pass && cr.failures == 0;
    rep.classes.push_back(std::move(cr));
  }
  for (int k = 0; k < basis.size(); ++k) {
    const auto& col = basis.columns[k];
    AgreementReport a;
    a.column = k;
    a.predicted = col.predicted_q;
    a.estimated = col.estimate.q;
    a.stable = col.estimate.stable;
    a.pass = a.predicted == a.estimated;
    rep.pass = rep.pass && a.pass;
    rep.agreement.push_back(a);
  }
  return rep;
}

}  // namespace padicdm
