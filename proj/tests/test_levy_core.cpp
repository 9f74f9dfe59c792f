#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lexfun/errors.hpp"
#include "lexfun/levy_core.hpp"
#include "lexfun/measures.hpp"

using namespace lexfun;

namespace {

const double kE = std::numbers::e;

// y^{-2} on (1, inf), no closed forms: exercises the quadrature path.
LevyMeasure1D inverse_square_tail() {
  DensitySegment s;
  s.lo = 1.0;
  s.hi = kInf;
  s.density = [](double y) { return 1.0 / (y * y); };
  s.label = "y^-2";
  return LevyMeasure1D({}, {s});
}

// Atoms at e^{2^n} with mass 2^{-n}.
LevyMeasure1D doubly_exponential_atoms() {
  AtomSeries s;
  s.sign = 1;
  s.log_abs_location = [](std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)); };
  s.mass = [](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n)); };
  s.label = "e^{2^n}";
  return LevyMeasure1D({}, {}, {s});
}

Integrand log_abs() {
  return Integrand([](double y) { return std::log(std::abs(y)); }, [](int, double l) { return l; });
}

}  // namespace

TEST(Region, ContainsRespectsClosedness) {
  const Region r = Region::between(1.0, 2.0, true, false);
  EXPECT_TRUE(r.contains(1.0));
  EXPECT_FALSE(r.contains(2.0));
  EXPECT_TRUE(Region::abs_greater(1.0).contains(-3.0));
  EXPECT_FALSE(Region::abs_greater(1.0).contains(1.0));
  EXPECT_TRUE(Region::above(0.0).contains(kInf));
  EXPECT_THROW(Region({Interval{0, 2}, Interval{1, 3}}), DomainError);
}

TEST(IntegrateAgainst, SingleAtomIdentity) {
  const LevyMeasure1D m({{1.0, 2.0}});
  EXPECT_DOUBLE_EQ(integrate_against(m, [](double x) { return x; }, Region::whole_line()), 2.0);
}

TEST(IntegrateAgainst, LogAgainstInverseSquareIsTwoOverE) {
  // antiderivative of log(y)/y^2 is -(log y + 1)/y
  const double v = integrate_against(inverse_square_tail(), log_abs(), Region::above(kE));
  EXPECT_NEAR(v, 2.0 / kE, 1e-8);
}

TEST(IntegrateAgainst, DoublyExponentialAtomsDiverge) {
  const double v = integrate_against(doubly_exponential_atoms(), log_abs(), Region::whole_line());
  EXPECT_EQ(v, kInf);
}

TEST(IntegrateAgainst, DoublyExponentialPartialSums) {
  // sum_{n<=N} 2^{-n} 2^n = N for a truncated family
  AtomSeries s;
  s.log_abs_location = [](std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)); };
  s.mass = [](std::size_t n) { return n <= 6 ? std::ldexp(1.0, -static_cast<int>(n)) : 0.0; };
  const LevyMeasure1D m({}, {}, {s});
  EXPECT_NEAR(integrate_against(m, log_abs(), Region::whole_line()), 6.0, 1e-12);
}

TEST(LevyMeasure1D, RejectsNonIntegrableSmallJumps) {
  DensitySegment s;
  s.lo = 0.0;
  s.hi = 1.0;
  s.density = [](double x) { return std::pow(x, -3.5); };
  EXPECT_THROW(LevyMeasure1D({}, {s}), DomainError);
}

TEST(LevyMeasure1D, RejectsInconsistentClosedForm) {
  DensitySegment s = measures::power_segment(1.0, 0.5, 0.0, 1.0);
  s.mass = [](double a, double b) { return b - a; };
  EXPECT_THROW(LevyMeasure1D({}, {s}), DomainError);
}

TEST(LevyMeasure1D, ActivityAndVariationFlags) {
  const auto cpp = measures::uniform_jumps(0.0, 0.5, 1.0);
  EXPECT_EQ(cpp.activity(), Activity::Finite);
  EXPECT_NEAR(cpp.total_mass(), 1.0, 1e-14);
  const auto s05 = measures::stable_tail(0.5);
  EXPECT_EQ(s05.activity(), Activity::Infinite);
  EXPECT_EQ(s05.small_jump_variation(), Variation::FiniteVariation);
  const auto s15 = measures::stable_tail(1.5);
  EXPECT_EQ(s15.small_jump_variation(), Variation::InfiniteVariation);
}

TEST(LevyMeasure1D, StableTailMatchesClosedForm) {
  const auto m = measures::stable_tail(0.5, 1.0);
  for (double z : {0.01, 0.5, 1.0, 4.0}) {
    EXPECT_NEAR(m.tail_plus(z), 2.0 / std::sqrt(z), 1e-10 * (1 + 2 / std::sqrt(z)));
  }
  EXPECT_EQ(m.tail_minus(1.0), 0.0);
}

TEST(LevyMeasure1D, TailsNonIncreasing) {
  const auto m = measures::exponential_jumps(2.0, 3.0) + measures::uniform_jumps(-1.0, -0.2, 0.5);
  double prev_p = kInf;
  double prev_m = kInf;
  for (double z = 0.05; z < 3.0; z += 0.05) {
    EXPECT_LE(m.tail_plus(z), prev_p);
    EXPECT_LE(m.tail_minus(z), prev_m);
    prev_p = m.tail_plus(z);
    prev_m = m.tail_minus(z);
  }
}

TEST(LevyMeasure1D, TabulatedQuadratureAgreesWithExactMass) {
  const auto m = measures::tabulated({0.1, 0.5, 1.0, 2.0}, {1.0, 3.0, 2.0, 0.0});
  // trapezoids: 0.4*2 + 0.5*2.5 + 1*1 = 3.05
  EXPECT_NEAR(m.total_mass(), 3.05, 1e-12);
  const double numeric = m.integrate([](double) { return 1.0; }, Region::above(0.7));
  const double exact = 0.5 * 0.3 * (2.6 + 2.0) + 1.0;
  EXPECT_NEAR(numeric, exact, 1e-9);
}

TEST(AXi, PureDriftIsOne) {
  const LevyTriplet1D xi(1.0, 0.0, LevyMeasure1D());
  EXPECT_EQ(a_xi(xi, 10.0), 1.0);
}

TEST(AXi, AtomNotAboveOne) {
  const LevyTriplet1D xi(0.0, 0.0, measures::point(1.0, 2.0));
  EXPECT_DOUBLE_EQ(a_xi(xi, 3.0), 1.0);
}

TEST(AXi, AtomAtTwo) {
  const LevyTriplet1D xi(0.0, 0.0, measures::point(2.0, 3.0));
  EXPECT_DOUBLE_EQ(a_xi(xi, 1.5), 2.5);
  // direct quadrature of the piecewise-constant tail
  const double direct = 1.0 + integrate_finite([&](double z) { return xi.measure().tail_plus(z); },
                                               1.0, 1.5);
  EXPECT_NEAR(direct, 2.5, 1e-10);
}

TEST(AXi, FubiniFormMatchesTailQuadrature) {
  const LevyTriplet1D xi(0.3, 0.0, measures::exponential_jumps(0.7, 2.0));
  for (double y : {1.0, 1.7, 4.0, 12.0}) {
    const double direct =
        1.0 + integrate_finite([&](double z) { return xi.measure().tail_plus(z); }, 1.0, y);
    EXPECT_NEAR(a_xi(xi, y), direct, 1e-9);
  }
}

TEST(AXi, MonotoneAndAtLeastOne) {
  const LevyTriplet1D xi(0.0, 1.0, measures::stable_tail(0.8) + measures::point(3.0, 0.5));
  double prev = 1.0;
  for (double y = 1.0; y < 50.0; y *= 1.3) {
    const double a = a_xi(xi, y);
    EXPECT_GE(a, prev - 1e-12);
    prev = a;
  }
  EXPECT_THROW(a_xi(xi, 0.5), DomainError);
}

TEST(LevyTriplet1D, RejectsZeroTriplet) {
  EXPECT_THROW(LevyTriplet1D(0.0, 0.0, LevyMeasure1D()), DomainError);
  EXPECT_THROW(LevyTriplet1D(0.0, -1.0, LevyMeasure1D()), DomainError);
}

TEST(LevyTriplet1D, BoundedVariationDrift) {
  const LevyTriplet1D t(0.7, 0.0, measures::uniform_jumps(0.0, 2.0, 1.0));
  // int_{|z|<=1} z Pi(dz) = 0.5 * 1^2 / 2 = 0.25
  ASSERT_TRUE(t.drift_bv());
  EXPECT_NEAR(*t.drift_bv(), 0.45, 1e-9);
  EXPECT_NEAR(t.cutoff_drift(0.0), 0.45, 1e-9);
  const LevyTriplet1D inf_var(0.0, 0.0, measures::stable_tail(1.5));
  EXPECT_FALSE(inf_var.drift_bv());
}

TEST(MarginalTails, ProductIsIdentity) {
  const auto a = measures::point(1.0, 1.0);
  const auto b = measures::uniform_jumps(0.0, 1.0, 2.0);
  const auto [xi, eta] = marginal_tails(LevyMeasure2D(ProductIndependent{a, b}));
  EXPECT_EQ(xi.atoms().size(), 1u);
  EXPECT_NEAR(eta.total_mass(), 2.0, 1e-14);
}

TEST(MarginalTails, CurveImageOfAtom) {
  const LevyMeasure2D m(CurveSupported{1.0, measures::point(std::log(2.0), 1.0)});
  const auto [xi, eta] = marginal_tails(m);
  ASSERT_EQ(eta.atoms().size(), 1u);
  EXPECT_NEAR(eta.atoms()[0].location, 0.5, 1e-15);
  EXPECT_EQ(eta.atoms()[0].mass, 1.0);
}

TEST(MarginalTails, JointAtomsProject) {
  const LevyMeasure2D m(JointAtoms{{{1.0, 2.0, 0.7}}});
  const auto [xi, eta] = marginal_tails(m);
  ASSERT_EQ(xi.atoms().size(), 1u);
  EXPECT_EQ(xi.atoms()[0].location, 1.0);
  EXPECT_EQ(xi.atoms()[0].mass, 0.7);
  EXPECT_EQ(eta.atoms()[0].location, 2.0);
}

TEST(MarginalTails, CurveMarginalTailMatchesBand) {
  const double k = 2.0;
  const LevyMeasure2D m(CurveSupported{k, measures::exponential_jumps(1.5, 1.0)});
  for (double z : {0.1, 0.4, 1.0, 1.5}) {
    const double band = m.mass({{JumpNorm::AbsY, -kInf, kInf}, {JumpNorm::AbsY, z, kInf}});
    EXPECT_NEAR(m.eta_marginal().tail_plus(z), band, 1e-8);
    // y > z iff x > -log(1 - z/k)
    EXPECT_NEAR(m.eta_marginal().tail_plus(z), std::exp(1.5 * std::log1p(-z / k)), 1e-8);
  }
}

TEST(Doleans, PureDriftEta) {
  const LevyTriplet1D eta(0.0, 1.0, LevyMeasure1D());
  const LevyTriplet2D t = doleans_xi_from_eta(eta, 1.0);
  EXPECT_DOUBLE_EQ(t.sigma().s11, 1.0);
  EXPECT_DOUBLE_EQ(t.sigma().s12, 1.0);
  EXPECT_DOUBLE_EQ(t.sigma().s22, 1.0);
  EXPECT_DOUBLE_EQ(t.gamma1(), 0.5);
  EXPECT_DOUBLE_EQ(t.gamma2(), 0.0);
  EXPECT_TRUE(t.measure().empty());
}

TEST(Doleans, SingleJumpCompoundPoisson) {
  const LevyTriplet1D eta(0.5, 0.0, measures::point(0.5, 1.0));
  const LevyTriplet2D t = doleans_xi_from_eta(eta, 1.0);
  const auto& base = t.measure().xi_marginal();
  ASSERT_EQ(base.atoms().size(), 1u);
  EXPECT_NEAR(base.atoms()[0].location, std::log(2.0), 1e-15);
  EXPECT_EQ(base.atoms()[0].mass, 1.0);
  EXPECT_EQ(t.sigma().s11, 0.0);
  // xi is then a pure jump process: zero bounded-variation drift
  const LevyTriplet1D xi = t.marginal_xi();
  ASSERT_TRUE(xi.drift_bv());
  EXPECT_NEAR(*xi.drift_bv(), 0.0, 1e-14);
}

TEST(Doleans, ForbiddenJumpNamesMass) {
  const LevyTriplet1D eta(0.0, 0.0, measures::point(2.0, 1.0));
  try {
    doleans_xi_from_eta(eta, 1.0);
    FAIL() << "expected a domain error";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("= 1"), std::string::npos) << e.what();
  }
}

TEST(Doleans, NegativeKAcceptsJumpsAboveK) {
  const LevyTriplet1D eta(0.0, 0.0, measures::uniform_jumps(-1.5, -0.2, 1.0));
  EXPECT_THROW(doleans_xi_from_eta(eta, -1.0), DomainError);
  EXPECT_NO_THROW(doleans_xi_from_eta(eta, -2.0));
}

TEST(LevyTriplet2D, RejectsNonPsdCovariance) {
  EXPECT_THROW(LevyTriplet2D(0, 0, {1.0, 2.0, 1.0}, LevyMeasure2D()), DomainError);
}

TEST(JumpCurve, ThresholdInvertsNorm) {
  const JumpCurve c = JumpCurve::exponential(3.0);
  const double u = c.threshold(JumpNorm::Euclid, 1, 1.0);
  const auto [x, y] = c.at(u);
  EXPECT_NEAR(std::hypot(x, y), 1.0, 1e-14);
  const double un = c.threshold(JumpNorm::AbsY, -1, 0.5);
  EXPECT_NEAR(un, std::log1p(0.5 / 3.0), 1e-14);
  EXPECT_EQ(JumpCurve::exponential(0.5).threshold(JumpNorm::AbsY, 1, 0.6), kInf);
}
