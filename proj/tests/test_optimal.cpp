#include <algorithm>

#include "support.hpp"

using namespace padicdm;
using namespace padicdm::testing;

namespace {

constexpr int kN = 32;

TruncatedSeries f2_series(const FieldPtr& F) { return root_oracle(F, 2, kN); }

bool vector_equal(const SeriesVector& a, const SeriesVector& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!series_equal(a[i], b[i])) return false;
  return true;
}

SeriesVector basis_vector(const FieldPtr& F, int n, int k) {
  SeriesVector v;
  for (int i = 0; i < n; ++i) v.push_back(series_of(F, {i == k ? 1 : 0}, kN, "s"));
  return v;
}

SeriesVector column_of(const SeriesMatrix& m, int l) {
  SeriesVector c;
  for (const auto& row : m) c.push_back(row[l]);
  return c;
}

struct ExpSetup {
  FrobeniusSetup S;
  DiffModule M, Mphi;
  std::vector<UpstairsBasis> linked;
  std::vector<FundamentalPair> pairs;
  OptimalBasis basis;
};

ExpSetup exp_setup() {
  ExpSetup E;
  E.S = frobenius(2);
  auto lambda = scalar(E.S.F, -1);
  E.M = exp_module(lambda, zero(E.S.F), kN, "t");
  E.Mphi = direct_image(E.M, E.S.phi, E.S.P);
  E.linked = linked_bases(exp_upstairs_bases(E.S.fib, E.M, lambda, kN), E.S.fib, E.M);
  E.pairs = fundamental_pairs(E.linked);
  E.basis = optimal_basis(E.linked, E.pairs, E.S.tree, E.S.V, E.S.phi);
  return E;
}

// Frobenius for p = 3 with the fiber listed in a caller-chosen order.
FrobeniusSetup frobenius3_ordered(const std::vector<int>& order) {
  FrobeniusSetup base = frobenius(3);
  FrobeniusSetup S = base;
  std::vector<PadicScalar> hints;
  for (int k : order) hints.push_back(base.fib.points[k]);
  S.fib = fiber(S.phi, zero(S.F), hints);
  S.tree = tree_over_point(S.phi, S.fib);
  S.u = local_solutions(S.phi, S.fib);
  S.V = vandermonde(S.fib, S.u);
  return S;
}

}  // namespace

TEST(Vandermonde, FrobeniusTwoMatchesClosedForm) {
  auto S = frobenius(2);
  auto f2 = f2_series(S.F);
  auto inv = mult_inverse(scalar(S.F, 2) * f2);
  auto one = series_of(S.F, {1}, kN, "s");
  EXPECT_TRUE(SeriesEq(S.V.V[0][0], inv * (f2 - one)));
  EXPECT_TRUE(SeriesEq(S.V.V[0][1], inv * (f2 + one)));
  EXPECT_TRUE(SeriesEq(S.V.V[1][0], -inv));
  EXPECT_TRUE(SeriesEq(S.V.V[1][1], inv));
}

TEST(Vandermonde, FrobeniusThreeCornerEntry) {
  auto S = frobenius(3);
  auto f3 = root_oracle(S.F, 3, kN);
  auto expect = mult_inverse(scalar(S.F, 3) * f3 * f3);
  EXPECT_TRUE(SeriesEq(S.V.V[2][2], expect));
}

TEST(Vandermonde, DegreeOneAndDegenerateInput) {
  auto F = q2();
  DiscMorphism id(series_of(F, {0, 1}, kN));
  auto fib = fiber(id, zero(F));
  auto V = vandermonde(fib, local_solutions(id, fib));
  ASSERT_EQ(V.degree(), 1);
  EXPECT_TRUE(SeriesEq(V.V[0][0], series_of(F, {1}, kN, "s")));
  EXPECT_TRUE(SeriesEq(V.U[0][0], series_of(F, {1}, kN, "s")));

  auto S = frobenius(2);
  EXPECT_ERRC(vandermonde(S.fib, {S.u[0]}), Errc::DimensionMismatch);
  Fiber twice{zero(S.F), {S.fib.points[1], S.fib.points[1]}};
  EXPECT_ERRC(vandermonde(twice, {S.u[1], S.u[1]}), Errc::DegenerateFiber);
}

TEST(Vandermonde, InverseOnBothSidesAndOnesToE1) {
  for (long p : {2L, 3L}) {
    auto S = frobenius(p);
    const int d = S.V.degree();
    auto I = identity_matrix(d, zero(S.F), kN, "s");
    for (const auto& prod : {multiply(S.V.U, S.V.V), multiply(S.V.V, S.V.U)})
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) EXPECT_TRUE(SeriesEq(prod[i][j], I[i][j])) << p;
    SeriesVector ones(static_cast<std::size_t>(d), series_of(S.F, {1}, kN, "s"));
    EXPECT_TRUE(vector_equal(mat_vec(S.V.V, ones), basis_vector(S.F, d, 0))) << p;
  }
}

TEST(IndicatorVector, Examples) {
  auto S2 = frobenius(2);
  EXPECT_EQ(indicator_vector(S2.tree, Disc{1, Rational(1)}), (std::vector<int>{0, 1}));
  EXPECT_EQ(indicator_vector(S2.tree, Disc{0, Rational(0)}), (std::vector<int>{1, 1}));
  auto S3 = frobenius(3);
  EXPECT_EQ(indicator_vector(S3.tree, Disc{1, Rational(1, 2)}), (std::vector<int>{0, 1, 0}));
  EXPECT_EQ(indicator_vector(S3.tree, Disc{2, Rational(0)}), (std::vector<int>{1, 1, 1}));
}

TEST(TransferCoordinates, Examples) {
  auto S = frobenius(2);
  auto one = series_of(S.F, {1}, kN, "s"), zs = series_of(S.F, {0}, kN, "s");
  EXPECT_TRUE(vector_equal(transfer_coordinates({{one}, {one}}, S.V), basis_vector(S.F, 2, 0)));
  auto f2 = f2_series(S.F);
  auto inv = mult_inverse(scalar(S.F, 2) * f2);
  auto got = transfer_coordinates({{zs}, {one}}, S.V);
  EXPECT_TRUE(SeriesEq(got[0], series_of(S.F, {mpq_class(1, 2)}, kN, "s") + inv));
  EXPECT_TRUE(SeriesEq(got[1], inv));

  auto F = q2();
  DiscMorphism id(series_of(F, {0, 1}, kN));
  auto fib = fiber(id, zero(F));
  auto V = vandermonde(fib, local_solutions(id, fib));
  auto x = series_of(F, {3, 1, 4}, kN, "s");
  EXPECT_TRUE(vector_equal(transfer_coordinates({{x}}, V), {x}));
  EXPECT_ERRC(transfer_coordinates({{x}, {x}}, V), Errc::DimensionMismatch);
}

TEST(FundamentalSolutionMatrix, TrivialModuleGivesV) {
  for (long p : {2L, 3L}) {
    auto S = frobenius(p);
    auto M = trivial_module(1, zero(S.F), kN, "t");
    std::vector<HorizontalMatrix> bases;
    for (const auto& a : S.fib.points) bases.push_back(local_solution_matrix(M, a, kN));
    auto Y = fundamental_solution_matrix(bases, S.V);
    for (int i = 0; i < S.V.degree(); ++i)
      for (int j = 0; j < S.V.degree(); ++j) EXPECT_TRUE(SeriesEq(Y[i][j], S.V.V[i][j]));
    auto Mphi = direct_image(M, S.phi, S.P);
    for (int l = 0; l < S.V.degree(); ++l) EXPECT_TRUE(horizontal_check(column_of(Y, l), Mphi).pass) << p << " " << l;
  }
}

TEST(FundamentalSolutionMatrix, ExpModuleColumnsAreHorizontal) {
  auto S = frobenius(2);
  auto M = exp_module(scalar(S.F, -1), zero(S.F), kN, "t");
  auto Mphi = direct_image(M, S.phi, S.P);
  std::vector<HorizontalMatrix> bases;
  for (const auto& a : S.fib.points) bases.push_back(local_solution_matrix(M, a, kN));
  auto Y = fundamental_solution_matrix(bases, S.V);
  std::vector<SeriesVector> cols;
  for (int l = 0; l < 2; ++l) {
    cols.push_back(column_of(Y, l));
    EXPECT_TRUE(horizontal_check(cols.back(), Mphi).pass) << l;
  }
  EXPECT_EQ(constant_rank(cols), 2);
}

TEST(LinkedBases, ExpModuleIsAlreadyLinked) {
  auto S = frobenius(2);
  auto lambda = scalar(S.F, -1);
  EXPECT_EQ(exp_module_radius(lambda), Rational(1));
  auto M = exp_module(lambda, zero(S.F), kN, "t");
  auto bases = exp_upstairs_bases(S.fib, M, lambda, kN);
  auto linked = linked_bases(bases, S.fib, M);
  for (int i = 0; i < 2; ++i) {
    ASSERT_EQ(linked[i].columns.size(), 1u);
    EXPECT_EQ(linked[i].columns[0].id, i);
    EXPECT_TRUE(vector_equal(linked[i].columns[0].entries, bases[i].columns[0].entries));
  }
  EXPECT_TRUE(is_linked(linked, S.fib));
}

TEST(LinkedBases, TrivialColumnsAreShared) {
  auto S = frobenius(3);
  auto M = trivial_module(1, zero(S.F), kN, "t");
  auto linked = linked_bases(trivial_upstairs_bases(S.fib, 1, kN), S.fib, M);
  for (const auto& b : linked) EXPECT_EQ(b.columns[0].id, 0);
  auto pairs = fundamental_pairs(linked);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].anchor, 0);
  EXPECT_EQ(pairs[0].q, Rational(0));
  EXPECT_EQ(pairs[0].members, (std::vector<int>{0, 1, 2}));
}

TEST(LinkedBases, ColumnIsCopiedIntoItsDiscOfConvergence) {
  auto F = q3(48);
  const int N = 48;
  Fiber fib{zero(F), {zero(F), scalar(F, 3)}};
  auto lambda = scalar(F, -1);
  EXPECT_EQ(exp_module_radius(lambda), Rational(1, 2));
  auto M = exp_module(lambda, zero(F), N, "t");
  auto bases = exp_upstairs_bases(fib, M, lambda, N);
  EXPECT_FALSE(is_linked(bases, fib));
  auto linked = linked_bases(bases, fib, M);
  EXPECT_TRUE(is_linked(linked, fib));
  EXPECT_EQ(linked[1].columns[0].id, 0);
  EXPECT_TRUE(linked[1].columns[0].entries[0].center().equals(scalar(F, 3)));
  auto H = local_solution_matrix(M, scalar(F, 3), N);
  auto horiz = horizontal_check(linked[1].columns[0].entries, M);
  EXPECT_TRUE(horiz.pass);
  auto pairs = fundamental_pairs(linked);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].members, (std::vector<int>{0, 1}));
}

TEST(FundamentalPairs, ExpModuleHasTwo) {
  auto E = exp_setup();
  ASSERT_EQ(E.pairs.size(), 2u);
  EXPECT_TRUE(E.S.fib.points[E.pairs[0].anchor].equals(scalar(E.S.F, -2)));
  EXPECT_TRUE(E.S.fib.points[E.pairs[1].anchor].is_zero());
  for (const auto& P : E.pairs) {
    EXPECT_EQ(P.q, Rational(1));
    EXPECT_EQ(P.members, std::vector<int>{P.anchor});
    EXPECT_TRUE(horizontal_check(P.column.entries, E.M).pass);
  }
}

TEST(FundamentalPairs, DegreeOneGivesOnePairPerColumn) {
  auto F = q3(48);
  Fiber fib{zero(F), {zero(F)}};
  auto M = DiffModule::from_matrix({{series_of(F, {0}, 24), series_of(F, {1}, 24)},
                                    {series_of(F, {0}, 24), series_of(F, {0}, 24)}});
  auto bases = estimated_upstairs_bases(fib, M, 24);
  EXPECT_EQ(fundamental_pairs(linked_bases(bases, fib, M)).size(), 2u);
}

TEST(BranchSelection, Examples) {
  auto S2 = frobenius(2);
  auto first = branch_selection(S2.tree, Disc{0, Rational(0)}, 0, DropRule::SmallestLeastIndex);
  ASSERT_EQ(first.choices.size(), 2u);
  EXPECT_EQ(first.choices[0].label(), "disc");
  EXPECT_EQ(first.choices[1].members, std::vector<int>{1});
  auto last = branch_selection(S2.tree, Disc{0, Rational(0)}, 0, DropRule::LargestLeastIndex);
  ASSERT_EQ(last.choices.size(), 2u);
  EXPECT_EQ(last.choices[1].members, std::vector<int>{0});
  EXPECT_EQ(last.dropped.front().members, std::vector<int>{1});

  auto S3 = frobenius(3);
  auto sel = branch_selection(S3.tree, Disc{0, Rational(0)}, 0);
  EXPECT_EQ(sel.choices.size(), 3u);
  EXPECT_EQ(sel.dropped.size(), 1u);
  EXPECT_EQ(sel.choices[1].label(), "bp0.part1");

  auto inner = branch_selection(S3.tree, Disc{2, Rational(1, 2)}, 7);
  ASSERT_EQ(inner.choices.size(), 1u);
  EXPECT_EQ(inner.choices[0].members, std::vector<int>{2});
  EXPECT_EQ(inner.pair_id, 7);
}

TEST(BranchSelection, DropRuleNames) {
  EXPECT_EQ(parse_drop_rule("first"), DropRule::SmallestLeastIndex);
  EXPECT_EQ(parse_drop_rule("last"), DropRule::LargestLeastIndex);
  EXPECT_STREQ(drop_rule_name(DropRule::LargestLeastIndex), "last");
  EXPECT_ERRC(parse_drop_rule("middle"), Errc::SchemaError);
}

TEST(BranchSelection, CountMatchesPreimagesOnRandomTrees) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> size(1, 7);
  for (int trial = 0; trial < 100; ++trial) {
    auto F = q2(40);
    auto pts = random_fiber_integers(rng, 2, size(rng));
    Fiber fib{zero(F), {}};
    for (long a : pts) fib.points.push_back(scalar(F, a));
    auto tree = tree_over_fiber(fib);
    for (int c = 0; c < fib.size(); ++c)
      for (Rational q : {Rational(0), Rational(1), Rational(2), Rational(3)})
        for (auto rule : {DropRule::SmallestLeastIndex, DropRule::LargestLeastIndex}) {
          auto sel = branch_selection(tree, Disc{c, q}, 0, rule);
          EXPECT_EQ(sel.choices.size(), disc_members(tree, Disc{c, q}).size());
        }
  }
}

TEST(TrivialOptimalBasis, FrobeniusTwo) {
  auto S = frobenius(2);
  auto B = trivial_optimal_basis(S.tree, S.V, &S.phi);
  ASSERT_EQ(B.size(), 2);
  EXPECT_TRUE(vector_equal(B.columns[0].entries, basis_vector(S.F, 2, 0)));
  EXPECT_EQ(B.columns[0].predicted_q, Rational(0));
  EXPECT_EQ(B.columns[1].predicted_q, Rational(2));
  EXPECT_EQ(B.columns[1].estimate.q, Rational(2));
  EXPECT_TRUE(B.columns[1].estimate.stable);
  auto inv = mult_inverse(scalar(S.F, 2) * f2_series(S.F));
  EXPECT_TRUE(SeriesEq(B.columns[1].entries[0], series_of(S.F, {mpq_class(1, 2)}, kN, "s") + inv));
  EXPECT_TRUE(SeriesEq(B.columns[1].entries[1], inv));
  EXPECT_TRUE(columns_independent(B));
}

TEST(TrivialOptimalBasis, FrobeniusThree) {
  auto S = frobenius(3);
  auto B = trivial_optimal_basis(S.tree, S.V, &S.phi);
  ASSERT_EQ(B.size(), 3);
  EXPECT_TRUE(vector_equal(B.columns[0].entries, basis_vector(S.F, 3, 0)));
  for (int k : {1, 2}) {
    EXPECT_EQ(B.columns[k].predicted_q, Rational(3, 2));
    EXPECT_EQ(B.columns[k].estimate.q, Rational(3, 2));
    EXPECT_TRUE(vector_equal(B.columns[k].entries, column_of(S.V.V, k)));
  }
  EXPECT_TRUE(columns_independent(B));
}

TEST(TrivialOptimalBasis, DegreeOne) {
  auto F = q2();
  DiscMorphism id(series_of(F, {0, 1}, kN));
  auto fib = fiber(id, zero(F));
  auto V = vandermonde(fib, local_solutions(id, fib));
  auto B = trivial_optimal_basis(tree_over_point(id, fib), V, &id);
  ASSERT_EQ(B.size(), 1);
  EXPECT_TRUE(SeriesEq(B.columns[0].entries[0], series_of(F, {1}, kN, "s")));
}

TEST(OptimalBasis, TrivialModuleAgreesWithTrivialConstruction) {
  for (long p : {2L, 3L}) {
    auto S = frobenius(p);
    auto M = trivial_module(1, zero(S.F), kN, "t");
    auto linked = linked_bases(trivial_upstairs_bases(S.fib, 1, kN), S.fib, M);
    auto B = optimal_basis(linked, fundamental_pairs(linked), S.tree, S.V, S.phi);
    auto T = trivial_optimal_basis(S.tree, S.V, &S.phi);
    ASSERT_EQ(B.size(), T.size());
    for (int k = 0; k < B.size(); ++k) {
      EXPECT_TRUE(vector_equal(B.columns[k].entries, T.columns[k].entries)) << p << " " << k;
      EXPECT_EQ(B.columns[k].predicted_q, T.columns[k].predicted_q);
    }
  }
}

TEST(OptimalBasis, ExpModuleUnderFrobeniusTwo) {
  auto E = exp_setup();
  ASSERT_EQ(E.basis.size(), 2);
  for (int k = 0; k < 2; ++k) {
    const auto& col = E.basis.columns[k];
    EXPECT_EQ(col.predicted_q, Rational(2));
    EXPECT_EQ(col.estimate.q, Rational(2));
    EXPECT_TRUE(col.estimate.stable);
    EXPECT_TRUE(horizontal_check(col.entries, E.Mphi).pass) << k;
    // V applied to exp(u_i - a_i) placed at its own preimage.
    const int i = col.pair_anchor;
    auto e = series_of(E.S.F, exp_coeffs(kN), kN);
    auto shifted = E.S.u[i] - TruncatedSeries::constant(E.S.fib.points[i], zero(E.S.F), kN, "s");
    std::vector<SeriesVector> blocks{{series_of(E.S.F, {0}, kN, "s")}, {series_of(E.S.F, {0}, kN, "s")}};
    blocks[i] = {compose(e, shifted)};
    EXPECT_TRUE(vector_equal(col.entries, mat_vec(E.S.V.V, {blocks[0][0], blocks[1][0]})));
  }
  EXPECT_TRUE(columns_independent(E.basis));
}

TEST(Optimality, HonestBasesPass) {
  for (long p : {2L, 3L}) {
    auto S = frobenius(p);
    auto rep = optimality_check(trivial_optimal_basis(S.tree, S.V, &S.phi), 50, 7);
    EXPECT_TRUE(rep.pass) << p;
  }
  auto S3 = frobenius(3);
  auto rep = optimality_check(trivial_optimal_basis(S3.tree, S3.V, &S3.phi), 50, 7);
  bool saw = false;
  for (const auto& c : rep.classes)
    if (c.q == Rational(3, 2)) {
      saw = true;
      EXPECT_EQ(c.columns.size(), 2u);
      EXPECT_TRUE(c.exhaustive);
      EXPECT_EQ(c.combinations, 8);
    }
  EXPECT_TRUE(saw);
  EXPECT_TRUE(optimality_check(exp_setup().basis, 50, 7).pass);
}

TEST(Optimality, CorruptedBasesFail) {
  for (long p : {2L, 3L}) {
    auto S = frobenius(p);
    auto M = trivial_module(1, zero(S.F), kN, "t");
    auto linked = linked_bases(trivial_upstairs_bases(S.fib, 1, kN), S.fib, M);
    auto pairs = fundamental_pairs(linked);
    auto B = optimal_basis(linked, pairs, S.tree, S.V, S.phi);
    auto bad = corrupt_with_dropped_branch(B, linked, pairs, S.tree, S.V, S.phi);
    ASSERT_TRUE(bad.has_value());
    EXPECT_TRUE(columns_independent(*bad));
    EXPECT_FALSE(optimality_check(*bad, 50, 7).pass) << p;
  }
  auto E = exp_setup();
  EXPECT_FALSE(optimality_check(corrupt_declared_radius(E.basis), 50, 7).pass);
  // No branching point inside either exp pair's disc.
  EXPECT_FALSE(corrupt_with_dropped_branch(E.basis, E.linked, E.pairs, E.S.tree, E.S.V, E.S.phi).has_value());
}

TEST(Optimality, SumReplacementIsDetected) {
  auto S = frobenius(3);
  auto B = trivial_optimal_basis(S.tree, S.V, &S.phi);
  auto broken = B;
  for (std::size_t k = 0; k < broken.columns[0].entries.size(); ++k)
    broken.columns[0].entries[k] = B.columns[1].entries[k] + B.columns[2].entries[k];
  broken.columns[0].estimate = element_radius(broken.columns[0].entries);
  EXPECT_FALSE(columns_independent(broken));
  EXPECT_FALSE(optimality_check(broken, 50, 7).pass);
}

TEST(Optimality, RandomDrawsAreSeeded) {
  auto E = exp_setup();
  auto a = optimality_check(E.basis, 3, 11), b = optimality_check(E.basis, 3, 11);
  ASSERT_EQ(a.classes.size(), b.classes.size());
  for (std::size_t k = 0; k < a.classes.size(); ++k) {
    EXPECT_FALSE(a.classes[k].exhaustive);
    EXPECT_EQ(a.classes[k].combinations, 3);
    EXPECT_EQ(a.classes[k].failures, b.classes[k].failures);
  }
}

TEST(OptimalProperties, FiberPermutationKeepsRadiusMultiset) {
  std::vector<std::vector<int>> orders{{0, 1, 2}, {2, 1, 0}, {1, 2, 0}, {2, 0, 1}};
  std::multiset<Rational> reference;
  for (const auto& order : orders) {
    auto S = frobenius3_ordered(order);
    auto B = trivial_optimal_basis(S.tree, S.V, &S.phi);
    std::multiset<Rational> radii;
    for (const auto& c : B.columns) radii.insert(c.estimate.q);
    if (reference.empty()) reference = radii;
    EXPECT_EQ(radii, reference);
    SeriesVector ones(3, series_of(S.F, {1}, kN, "s"));
    EXPECT_TRUE(vector_equal(mat_vec(S.V.V, ones), basis_vector(S.F, 3, 0)));
  }
  EXPECT_EQ(reference, (std::multiset<Rational>{Rational(0), Rational(3, 2), Rational(3, 2)}));
}

TEST(OptimalProperties, SyntheticConfigurationsHaveFullCount) {
  std::mt19937_64 rng(62);
  std::uniform_int_distribution<int> size(2, 4);
  for (int trial = 0; trial < 8; ++trial) {
    auto F = q2(48);
    const int N = 16;
    auto pts = random_fiber_integers(rng, 2, size(rng));
    Fiber fib{zero(F), {}};
    for (long a : pts) fib.points.push_back(scalar(F, a));
    auto tree = tree_over_fiber(fib);
    auto phi = DiscMorphism(product_polynomial(F, pts, N));
    auto M = trivial_module(1 + trial % 2, zero(F), N, "t");
    auto linked = linked_bases(trivial_upstairs_bases(fib, M.rank, N), fib, M);
    auto pairs = fundamental_pairs(linked);
    EXPECT_EQ(static_cast<int>(pairs.size()), M.rank);
    std::vector<TruncatedSeries> u;
    // Non-etale product maps have no local solutions; use the shifted identity.
    for (const auto& a : fib.points) u.push_back(series_of(F, {0, 1}, N, "s") + TruncatedSeries::constant(a, zero(F), N, "s"));
    auto V = vandermonde(fib, u);
    auto B = optimal_basis(linked, pairs, tree, V, phi);
    EXPECT_EQ(B.size(), M.rank * fib.size());
  }
}
