#include "support.hpp"

using namespace padicdm;
using namespace padicdm::testing;

namespace {

// f_p(s) = (1+s)^{1/p}
TruncatedSeries fp(const FieldPtr& F, long p, int N) { return root_oracle(F, p, N); }

TruncatedSeries random_series(std::mt19937_64& rng, const FieldPtr& F, int N, int kmin = 0, int kmax = 5) {
  std::vector<PadicScalar> c;
  for (int i = 0; i < N; ++i) c.push_back(random_scalar(rng, F, kmin, kmax));
  return TruncatedSeries::from_coeffs(zero(F), c, N, "t");
}

}  // namespace

TEST(SeriesArithmetic, SmallProducts) {
  auto F = q2();
  auto a = series_of(F, {1, 1}, 8), b = series_of(F, {1, -1}, 8);
  EXPECT_TRUE(SeriesEq(a * b, series_of(F, {1, 0, -1}, 8)));
  auto f2 = fp(F, 2, 32);
  EXPECT_TRUE(SeriesEq(f2 * f2, series_of(F, {1, 1}, 32)));
  auto e = series_of(F, exp_coeffs(8), 8), em = series_of(F, exp_coeffs(8, -1), 8);
  EXPECT_TRUE(SeriesEq(e * em, series_of(F, {1}, 8)));
}

TEST(SeriesArithmetic, OrderIsTheMinimum) {
  auto F = q2();
  auto a = series_of(F, {1, 1}, 8), b = series_of(F, {1, 1}, 12);
  EXPECT_EQ((a + b).order(), 8);
  EXPECT_EQ((a * b).order(), 8);
}

TEST(SeriesArithmetic, MismatchedCentersOrVariables) {
  auto F = q2();
  auto a = series_of(F, {1, 1}, 8);
  auto b = TruncatedSeries::from_coeffs(scalar(F, 2), {scalar(F, 1)}, 8, "t");
  EXPECT_ERRC(a + b, Errc::CenterMismatch);
  EXPECT_ERRC(a * a.with_var("s"), Errc::VariableMismatch);
}

TEST(MultInverse, Examples) {
  auto F = q2();
  std::vector<mpq_class> alt;
  for (int i = 0; i < 16; ++i) alt.push_back(i % 2 ? -1 : 1);
  EXPECT_TRUE(SeriesEq(mult_inverse(series_of(F, {1, 1}, 16, "s")), series_of(F, alt, 16, "s")));
  auto g = scalar(F, 2) * fp(F, 2, 32);
  auto h = mult_inverse(g);
  EXPECT_EQ(*h[0].valuation(), Rational(-1));
  EXPECT_TRUE(h[0].equals(scalar(F, mpq_class(1, 2))));
  EXPECT_TRUE(SeriesEq(g * h, series_of(F, {1}, 32, "s")));
  EXPECT_ERRC(mult_inverse(series_of(F, {0, 1, 1}, 8)), Errc::NonUnitConstantTerm);
}

TEST(Derivative, Examples) {
  auto F = q2();
  auto d = derivative(series_of(F, {0, 2, 1}, 8));
  EXPECT_EQ(d.order(), 7);
  EXPECT_TRUE(SeriesEq(d, series_of(F, {2, 2}, 7)));
  EXPECT_TRUE(derivative(series_of(F, {5}, 8)).is_zero());
  // f_2^2 = 1 + s, so 2 f_2 f_2' = 1.
  auto f2 = fp(F, 2, 32);
  auto lhs = scalar(F, 2) * (f2.truncated(31) * derivative(f2));
  EXPECT_TRUE(SeriesEq(lhs, series_of(F, {1}, 31, "s")));
}

TEST(Compose, Examples) {
  auto F = q2();
  auto t = series_of(F, {0, 1}, 16);
  auto g = root_oracle(F, 2, 16) - series_of(F, {1}, 16, "s");
  EXPECT_TRUE(SeriesEq(compose(t, g), g));
  EXPECT_EQ(compose(t, g).var(), "s");
  // exp(u_0(s)) against a direct six-term expansion sum u^k / k!.
  auto e = series_of(F, exp_coeffs(16), 16);
  auto got = compose(e, g).truncated(6);
  auto u = g.truncated(6);
  auto acc = series_of(F, {1}, 6, "s"), power = acc;
  mpq_class fact(1);
  for (int k = 1; k < 6; ++k) {
    power = power * u;
    fact *= k;
    acc = acc + scalar(F, mpq_class(1) / fact) * power;
  }
  EXPECT_TRUE(SeriesEq(got, acc));
  // 1 + s has unit displacement from center 0.
  EXPECT_ERRC(compose(series_of(F, {0, 0, 1}, 8), series_of(F, {1, 1}, 8, "s")), Errc::SubstitutionOutsideDisc);
}

TEST(Reversion, Examples) {
  auto F = q2();
  auto t = series_of(F, {0, 1}, 16);
  EXPECT_TRUE(SeriesEq(reversion(t), t));
  auto u0 = reversion(series_of(F, {0, 2, 1}, 32));
  auto oracle = root_oracle(F, 2, 32, "t") - series_of(F, {1}, 32);
  EXPECT_TRUE(SeriesEq(u0, oracle));
  EXPECT_TRUE(u0[1].equals(scalar(F, mpq_class(1, 2))));
  EXPECT_TRUE(u0[2].equals(scalar(F, mpq_class(-1, 8))));
  EXPECT_TRUE(u0[3].equals(scalar(F, mpq_class(1, 16))));
  EXPECT_ERRC(reversion(series_of(F, {0, 0, 1, 1}, 8)), Errc::NotInvertibleAtOrderOne);
}

TEST(TaylorShift, Examples) {
  auto F = q2();
  auto f = series_of(F, {0, 2, 1}, 8);
  auto g = taylor_shift(f, scalar(F, -2));
  EXPECT_TRUE(g.center().equals(scalar(F, -2)));
  EXPECT_TRUE(SeriesEq(g, series_of(F, {0, -2, 1}, 8)));
  auto h = series_of(F, {3, 1, 4}, 8);
  EXPECT_TRUE(SeriesEq(taylor_shift(h, zero(F)), series_of(F, {0, 1, 4}, 8)));
  EXPECT_TRUE(SeriesEq(taylor_shift(series_of(F, {0, 0, 0, 1}, 8), scalar(F, 1)), series_of(F, {0, 3, 3, 1}, 8)));
  EXPECT_ERRC(taylor_shift(f, scalar(F, mpq_class(1, 2))), Errc::ShiftOutsideDisc);
}

TEST(ValuationPolygon, Examples) {
  auto P = valuation_polygon(series_of(q2(), {0, 2, 1}, 8));
  ASSERT_EQ(P.vertices().size(), 2u);
  EXPECT_EQ(P.vertices()[0], (ValuationPolygon::Point{1, Rational(1)}));
  EXPECT_EQ(P.vertices()[1], (ValuationPolygon::Point{2, Rational(0)}));
  EXPECT_EQ(P.vq(Rational(1)), Rational(2));
  EXPECT_EQ(P.left_slope(Rational(1)), 2);
  EXPECT_EQ(P.right_slope(Rational(1)), 1);
  EXPECT_EQ(P.breakpoints(), std::vector<Rational>{Rational(1)});

  auto Q = valuation_polygon(series_of(q3(), {0, 3, 3, 1}, 8));
  EXPECT_EQ(Q.vq(Rational(1, 2)), Rational(3, 2));

  auto G = valuation_polygon(series_of(q2(), std::vector<mpq_class>(8, 1), 8));
  for (Rational l : {Rational(0), Rational(1, 3), Rational(2)}) EXPECT_EQ(G.right_slope(l), 0);
  EXPECT_ERRC(valuation_polygon(series_of(q2(), {0}, 8)), Errc::ZeroSeries);
}

TEST(RadiusEstimate, BinomialRootHasExponentTwo) {
  auto F = q2();
  auto r = radius_estimate(fp(F, 2, 32), 16, 32);
  EXPECT_EQ(r.q, Rational(2));
  EXPECT_TRUE(r.stable);
  EXPECT_EQ(r.mode, RadiusMode::TailSlopeEstimate);
}

TEST(RadiusEstimate, ExponentialAgainstLegendre) {
  auto F = q2();
  auto e = series_of(F, exp_coeffs(32), 32);
  for (int j = 0; j < 32; ++j) EXPECT_EQ(*e[j].valuation(), Rational(-legendre(j, 2))) << j;
  auto r = radius_estimate(e, 16, 32);
  EXPECT_EQ(r.q, Rational(1));
  EXPECT_TRUE(r.stable);
  auto F3 = q3();
  auto r3 = radius_estimate(series_of(F3, exp_coeffs(48), 48), 24, 48);
  EXPECT_EQ(r3.q, Rational(1, 2));
}

TEST(RadiusEstimate, GeometricSeriesAndDegenerateWindows) {
  auto F = q2();
  auto r = radius_estimate(series_of(F, std::vector<mpq_class>(32, 1), 32));
  EXPECT_EQ(r.q, Rational(0));
  auto poly = radius_estimate(series_of(F, {1, 1}, 32));
  EXPECT_EQ(poly.q, Rational(0));
  EXPECT_FALSE(poly.stable);
  // Convergence beyond the unit disc clamps to 0 but keeps the raw exponent.
  std::vector<mpq_class> c;
  mpq_class pw(1);
  for (int j = 0; j < 32; ++j, pw *= 2) c.push_back(pw);
  auto wide = radius_estimate(series_of(F, c, 32));
  EXPECT_EQ(wide.q, Rational(0));
  EXPECT_EQ(wide.q_unclamped, Rational(-1));
}

TEST(NewtonSolve, Examples) {
  auto F = q2();
  const int N = 24;
  std::vector<TruncatedSeries> P{series_of(F, {0, -1}, N, "s"), series_of(F, {2}, N, "s"), series_of(F, {1}, N, "s")};
  auto f2 = root_oracle(F, 2, N);
  auto one = series_of(F, {1}, N, "s");
  EXPECT_TRUE(SeriesEq(newton_solve(P, zero(F)), f2 - one));
  EXPECT_TRUE(SeriesEq(newton_solve(P, scalar(F, -2)), -f2 - one));
  std::vector<TruncatedSeries> Q{series_of(F, {0, -1}, N, "s"), series_of(F, {0}, N, "s"), series_of(F, {1}, N, "s")};
  EXPECT_ERRC(newton_solve(Q, zero(F)), Errc::SingularFiberPoint);
  EXPECT_ERRC(newton_solve(P, scalar(F, 2)), Errc::NotAFiberPoint);
}

TEST(SeriesProperties, ReversionRoundTrip) {
  std::mt19937_64 rng(31);
  for (long p : {2L, 3L, 5L}) {
    auto F = Field::base(p, 40);
    for (int trial = 0; trial < 10; ++trial) {
      auto f = random_series(rng, F, 12);
      std::vector<PadicScalar> c = f.coeffs();
      c[0] = zero(F);
      c[1] = random_scalar(rng, F, 0, 0);
      f = TruncatedSeries::from_coeffs(zero(F), c, 12, "t");
      auto g = reversion(f);
      auto x = series_of(F, {0, 1}, 12);
      EXPECT_TRUE(SeriesEq(compose(f, g), x)) << p << " " << trial;
      EXPECT_TRUE(SeriesEq(compose(g, f), x)) << p << " " << trial;
    }
  }
}

TEST(SeriesProperties, TaylorShiftRoundTrip) {
  std::mt19937_64 rng(32);
  auto F = q3(40);
  for (int trial = 0; trial < 20; ++trial) {
    auto f = random_series(rng, F, 10);
    auto a = random_scalar(rng, F, 0, 3);
    auto there = recenter(f, a);
    auto back = recenter(there, zero(F));
    EXPECT_TRUE(back.center().is_zero());
    EXPECT_TRUE(SeriesEq(back, f));
    auto shifted = taylor_shift(taylor_shift(f, a), zero(F));
    EXPECT_TRUE(SeriesEq(shifted, f - TruncatedSeries::constant(f[0], zero(F), 10, "t")));
  }
}

TEST(SeriesProperties, PolygonIsConcaveAndMultiplicative) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> num(-12, 12), den(1, 6);
  for (long p : {2L, 3L, 7L}) {
    auto F = Field::base(p, 60);
    for (int trial = 0; trial < 25; ++trial) {
      auto f = random_series(rng, F, 10, -2, 6), g = random_series(rng, F, 10, -2, 6);
      auto Pf = valuation_polygon(f), Pg = valuation_polygon(g);
      for (int k = 0; k < 10; ++k) {
        Rational l1(num(rng), den(rng)), l2(num(rng), den(rng));
        if (l1 > l2) std::swap(l1, l2);
        Rational mid = (l1 + l2) / 2;
        EXPECT_GE(Pf.vq(mid), (Pf.vq(l1) + Pf.vq(l2)) / 2);
        EXPECT_GE(Pf.left_slope(l1), Pf.right_slope(l1));
        if (l1 < l2) {
          EXPECT_GE(Pf.right_slope(l1), Pf.left_slope(l2));
        }
      }
      // Gauss: exact for polynomial products kept below the truncation.
      auto fl = f.truncated(5), gl = g.truncated(5);
      std::vector<PadicScalar> fc = fl.coeffs(), gc = gl.coeffs();
      fc.resize(10, zero(F));
      gc.resize(10, zero(F));
      auto fp5 = TruncatedSeries::from_coeffs(zero(F), fc, 10, "t");
      auto gp5 = TruncatedSeries::from_coeffs(zero(F), gc, 10, "t");
      auto Pfg = valuation_polygon(fp5 * gp5);
      auto A = valuation_polygon(fp5), B = valuation_polygon(gp5);
      for (int k = 0; k < 10; ++k) {
        Rational l(num(rng), den(rng));
        EXPECT_EQ(Pfg.vq(l), A.vq(l) + B.vq(l));
      }
    }
  }
}

TEST(SeriesProperties, NewtonSolveResidualVanishes) {
  std::mt19937_64 rng(34);
  auto F = Field::base(5, 40);
  const int N = 16;
  for (int trial = 0; trial < 10; ++trial) {
    // P(s, X) = X^2 + c X + (random with P(0,0)=0), c a unit.
    auto a0 = random_series(rng, F, N);
    std::vector<PadicScalar> c0 = a0.coeffs();
    c0[0] = zero(F);
    auto P0 = TruncatedSeries::from_coeffs(zero(F), c0, N, "s");
    auto P1 = TruncatedSeries::constant(random_scalar(rng, F, 0, 0), zero(F), N, "s");
    auto P2 = series_of(F, {1}, N, "s");
    auto u = newton_solve({P0, P1, P2}, zero(F));
    auto res = u * u + P1 * u + P0;
    EXPECT_TRUE(res.is_zero());
    EXPECT_TRUE(u[0].is_zero());
  }
}
