#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lexfun/criteria.hpp"
#include "lexfun/errors.hpp"
#include "lexfun/g_functions.hpp"
#include "lexfun/measures.hpp"
#include "random_pairs.hpp"

using namespace lexfun;

namespace {

LevyMeasure1D inverse_square_tail() {
  DensitySegment s;
  s.lo = 1.0;
  s.hi = kInf;
  s.density = [](double y) { return 1.0 / (y * y); };
  return LevyMeasure1D({}, {s});
}

LevyMeasure1D doubly_exponential_atoms() {
  AtomSeries s;
  s.log_abs_location = [](std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)); };
  s.mass = [](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n)); };
  return LevyMeasure1D({}, {}, {s});
}

LevyTriplet2D unit_drift_with_eta(const LevyMeasure1D& eta) {
  return LevyTriplet2D(1.0, 0.0, {}, LevyMeasure2D(ProductIndependent{LevyMeasure1D(), eta}));
}

bool some_rule_passed(const Classification& c) {
  for (const auto& r : c.trace) {
    if (r.passed()) return true;
  }
  return false;
}

std::string last_rule(const Classification& c) { return c.trace.empty() ? "" : c.trace.back().rule; }

// xi_t = t - (compound Poisson with Exp(2) jumps), written in the |x| <= 1 convention
LevyTriplet1D drift_minus_exponential_jumps() {
  const LevyMeasure1D m = measures::exponential_jumps(2.0, 1.0, -1);
  const double small = m.integrate([](double x) { return x; }, Region::between(-1.0, 0.0, true, true));
  return LevyTriplet1D(1.0 + small, 0.0, m);
}

}  // namespace

TEST(CheckConvergence, UnitDriftInverseSquareConverges) {
  const ConvergenceReport r = check_convergence(unit_drift_with_eta(inverse_square_tail()));
  EXPECT_EQ(r.verdict, ConvergenceVerdict::Converges);
  EXPECT_EQ(r.xi_drifts_to_infinity, Tristate::Yes);
  EXPECT_NEAR(r.eta_log_integral, 2.0 / std::numbers::e, 1e-6);
}

TEST(CheckConvergence, DoublyExponentialAtomsDiverge) {
  const ConvergenceReport r = check_convergence(unit_drift_with_eta(doubly_exponential_atoms()));
  EXPECT_EQ(r.verdict, ConvergenceVerdict::Diverges);
  EXPECT_EQ(r.eta_log_integral, kInf);
}

TEST(CheckConvergence, NegativeMeanDiverges) {
  const LevyTriplet2D t(-1.0, 0.0, {1.0, 0.0, 1.0},
                        LevyMeasure2D(ProductIndependent{LevyMeasure1D(), inverse_square_tail()}));
  const ConvergenceReport r = check_convergence(t);
  EXPECT_EQ(r.xi_drifts_to_infinity, Tristate::No);
  EXPECT_EQ(r.verdict, ConvergenceVerdict::Diverges);
}

TEST(CheckConvergence, ZeroMeanIsNotDrift) {
  const LevyTriplet2D t(0.0, 1.0, {1.0, 0.0, 0.0}, LevyMeasure2D());
  EXPECT_EQ(check_convergence(t).xi_drifts_to_infinity, Tristate::No);
}

TEST(CheckConvergence, HeavyJumpsOnBothSidesUndecided) {
  const LevyMeasure1D xi = measures::stable_tail(0.5) + measures::stable_tail(0.5, 1.0, -1);
  const LevyTriplet2D t(0.0, 1.0, {}, LevyMeasure2D(ProductIndependent{xi, LevyMeasure1D()}));
  const ConvergenceReport r = check_convergence(t);
  EXPECT_EQ(r.xi_drifts_to_infinity, Tristate::Unknown);
  EXPECT_EQ(r.verdict, ConvergenceVerdict::Inconclusive);
}

TEST(CheckConvergence, HeavierEtaTailNeverConverges) {
  // Scaling the eta tail up keeps Diverges as Diverges.
  AtomSeries s;
  s.log_abs_location = [](std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)); };
  s.mass = [](std::size_t n) { return 3.0 * std::ldexp(1.0, -static_cast<int>(n)); };
  const LevyMeasure1D heavier = LevyMeasure1D({}, {}, {s}) + inverse_square_tail();
  EXPECT_EQ(check_convergence(unit_drift_with_eta(heavier)).verdict, ConvergenceVerdict::Diverges);
}

TEST(CheckDegenerate, RecoversDoleansK) {
  const LevyTriplet1D eta(0.25, 0.0, measures::uniform_jumps(0.0, 0.5, 1.0));
  const DegeneracyResult d = check_degenerate(doleans_xi_from_eta(eta, 1.0));
  ASSERT_TRUE(d.degenerate()) << d.failing_clause;
  EXPECT_NEAR(*d.k, 1.0, 1e-12);
  EXPECT_LT(d.sigma_residual, 1e-9);
  EXPECT_LT(d.curve_residual, 1e-9);
  EXPECT_LT(d.claim_residual, 1e-9);
}

TEST(CheckDegenerate, ProductMeasureIsNotCurve) {
  const LevyTriplet2D t(0.5, 0.5, {},
                        LevyMeasure2D(ProductIndependent{measures::point(1.0, 1.0),
                                                         measures::point(0.5, 1.0)}));
  const DegeneracyResult d = check_degenerate(t);
  EXPECT_FALSE(d.degenerate());
  EXPECT_FALSE(d.failing_clause.empty());
}

TEST(CheckDegenerate, BrownianPairKTwo) {
  // eta_t = 2(xi_t - t/2) with unit xi variance: gamma1 - gamma2 / 2 = 1/2
  const LevyTriplet2D t(0.5, 0.0, {1.0, 2.0, 4.0}, LevyMeasure2D());
  const DegeneracyResult d = check_degenerate(t);
  ASSERT_TRUE(d.degenerate()) << d.failing_clause;
  EXPECT_DOUBLE_EQ(*d.k, 2.0);
  const LevyTriplet2D off(0.7, 0.0, {1.0, 2.0, 4.0}, LevyMeasure2D());
  EXPECT_FALSE(check_degenerate(off).degenerate());
}

TEST(CheckDegenerate, NoProbeAvailable) {
  const LevyTriplet2D t(1.0, 1.0, {}, LevyMeasure2D());
  EXPECT_FALSE(check_degenerate(t).degenerate());
}

TEST(CheckDegenerate, RoundTripRandomCorpus) {
  std::mt19937_64 rng(20240611);
  for (int i = 0; i < 20; ++i) {
    const auto [eta, k] = lexfun::testing::random_admissible_eta(rng);
    const DegeneracyResult d = check_degenerate(doleans_xi_from_eta(eta, k));
    ASSERT_TRUE(d.degenerate()) << "k=" << k << " " << d.failing_clause;
    EXPECT_LE(std::abs(*d.k - k), 1e-9 * std::abs(k));
    EXPECT_LE(d.claim_residual, 1e-9);
  }
}

TEST(ClassifyExponential, DoleansPairIsConstant) {
  const LevyTriplet1D eta(0.25, 0.0, measures::uniform_jumps(0.0, 0.5, 1.0));
  const Classification c = classify_exponential(doleans_xi_from_eta(eta, 1.0));
  EXPECT_EQ(c.verdict, Verdict::ConstantAtom);
  ASSERT_TRUE(c.k);
  EXPECT_NEAR(*c.k, 1.0, 1e-12);
  EXPECT_TRUE(some_rule_passed(c));
}

TEST(ClassifyExponential, IndependentBrowniansHaveNoAtoms) {
  const Classification c = classify_exponential(LevyTriplet2D(1.0, 0.0, {1.0, 0.0, 1.0}, LevyMeasure2D()));
  EXPECT_FALSE(predicts_atoms(c.verdict));
  ASSERT_GE(c.trace.size(), 2u);
  EXPECT_EQ(c.trace[1].rule, "atom_iff_constant");
  EXPECT_TRUE(c.trace[1].passed());
  // no upward jumps and a positive mean also make the limit self-decomposable
  EXPECT_EQ(c.verdict, Verdict::LebesgueDensity);
}

TEST(ClassifyExponential, SpectrallyNegativeAgainstTimeHasDensity) {
  const LevyTriplet1D xi = drift_minus_exponential_jumps();
  const LevyTriplet2D t(xi.gamma(), 1.0, {},
                        LevyMeasure2D(ProductIndependent{xi.measure(), LevyMeasure1D()}));
  const Classification c = classify_exponential(t);
  EXPECT_EQ(c.verdict, Verdict::LebesgueDensity);
  EXPECT_EQ(last_rule(c), "self_decomposable");
}

TEST(ClassifyExponential, DivergentIsUnknown) {
  const Classification c = classify_exponential(LevyTriplet2D(-1.0, 1.0, {}, LevyMeasure2D()));
  EXPECT_EQ(c.verdict, Verdict::Unknown);
  EXPECT_FALSE(c.warnings.empty());
}

TEST(ClassifyG, CompoundPoissonNoDrift) {
  const LevyTriplet1D xi(1.0, 0.0, measures::point(1.0, 1.0));
  const Classification c = classify_g_integral(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::LebesgueDensity);
  EXPECT_EQ(last_rule(c), "cpp_no_drift");
}

TEST(ClassifyG, CompoundPoissonWithDriftHasAtoms) {
  const LevyTriplet1D xi(2.0, 0.0, measures::point(1.0, 1.0));
  const Classification c = classify_g_integral(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::HasAtoms);
  EXPECT_EQ(last_rule(c), "cpp_with_drift_compact_g");
}

TEST(ClassifyG, BrownianWithDriftBump) {
  const LevyTriplet1D xi(1.0, 1.0, LevyMeasure1D());
  const Classification c = classify_g_integral(xi, gfun::bump(0.0, 1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::NoAtoms);
  EXPECT_EQ(last_rule(c), "compact_support_transient");
}

TEST(ClassifyG, StableSubordinatorIndicator) {
  const LevyTriplet1D xi(2.0, 0.0, measures::stable_tail(0.5));
  const Classification c = classify_g_integral(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::NoAtoms);
  EXPECT_EQ(last_rule(c), "subordinator_first_passage");
}

TEST(ClassifyG, CompoundPoissonSubordinatorWithDriftUnknown) {
  const LevyTriplet1D xi(2.0, 0.0, measures::point(0.5, 1.0));
  const Classification c = classify_g_integral(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity());
  // drift 1.5 and atom: the drift rule fires before anything about first passage
  EXPECT_EQ(c.verdict, Verdict::HasAtoms);
}

TEST(ClassifyG, GaussianPartMakesZeroRegular) {
  const LevyTriplet1D xi(1.0, 1.0, measures::point(-1.0, 0.3));
  const Classification c = classify_g_integral(xi, gfun::gaussian(1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::NoAtoms);
  EXPECT_EQ(last_rule(c), "zero_regular_for_itself");
}

TEST(ClassifyG, DriftMinusStableSubordinator) {
  const LevyMeasure1D m = measures::stable_tail(0.5, 1.0, -1);
  // gamma = a + int_{-1}^0 x Pi(dx) = a - 2 with a = 3
  const LevyTriplet1D xi(1.0, 0.0, m);
  const Classification c = classify_g_integral(xi, gfun::gaussian(1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::NoAtoms);
  EXPECT_EQ(last_rule(c), "spectrally_negative_bv");
}

TEST(ClassifyG, LevelSetNearZeroWithDriftingSubordinator) {
  const LevyTriplet1D xi(2.5, 0.0, measures::stable_tail(0.5));
  const Classification c = classify_g_integral(xi, gfun::ramp(-1.0, 1.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::AbsolutelyContinuous);
  EXPECT_EQ(last_rule(c), "level_set_near_zero");
}

TEST(ClassifyG, LevelSetJumpWindow) {
  GDescriptor g = gfun::gaussian(1.0);
  g.level_set_nondegenerate = LevelSetWindow{0.5, 1.5, 1.0};
  const LevyTriplet1D xi(1.0, 0.0, measures::point(1.0, 2.0) + measures::point(-0.5, 1.0));
  const auto y = YProcessSpec::make_subordinator(LevyTriplet1D(1.0, 0.0, measures::point(0.5, 1.0)));
  const Classification c = classify_g_integral(xi, g, y);
  EXPECT_EQ(c.verdict, Verdict::NoAtoms);
  EXPECT_EQ(last_rule(c), "level_set_jump_window");
}

TEST(ClassifyG, RecurrentFallsBackToUnknown) {
  const LevyTriplet1D xi(0.0, 1.0, LevyMeasure1D());
  const Classification c = classify_g_integral(xi, gfun::indicator(1.0, 2.0), YProcessSpec::identity());
  EXPECT_EQ(c.verdict, Verdict::Unknown);
  EXPECT_FALSE(c.warnings.empty());
  EXPECT_FALSE(some_rule_passed(c));
}

TEST(ClassifyG, ContradictoryFlagsRejected) {
  GDescriptor g = gfun::indicator(1.0, 2.0);
  g.g0_nonzero = true;
  EXPECT_THROW(validate_g_flags(g), DomainError);
  GDescriptor h = gfun::constant(1.0);
  h.strictly_monotone_near_0 = true;
  EXPECT_THROW(validate_g_flags(h), DomainError);
  GDescriptor k = gfun::indicator(-1.0, 1.0);
  k.compact_support = std::pair{-0.5, 0.5};
  EXPECT_THROW(
      classify_g_integral(LevyTriplet1D(1.0, 1.0, LevyMeasure1D()), k, YProcessSpec::identity()),
      DomainError);
}

TEST(ClassifyG, CatalogueFlagsAreConsistent) {
  for (const GDescriptor& g : {gfun::indicator(0.0, 1.0), gfun::indicator(-1.0, 2.0), gfun::bump(0.3, 1.0),
                               gfun::bump(0.0, 1.0), gfun::ramp(-1.0, 1.0), gfun::gaussian(0.5),
                               gfun::constant(2.0), gfun::zero()}) {
    EXPECT_NO_THROW(validate_g_flags(g)) << g.name;
  }
}

TEST(Classification, JsonCarriesTrace) {
  const LevyTriplet1D xi(2.0, 0.0, measures::point(1.0, 1.0));
  const auto j = classify_g_integral(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity()).to_json();
  EXPECT_EQ(j["verdict"], "HasAtoms");
  EXPECT_GE(j["trace"].size(), 1u);
}
