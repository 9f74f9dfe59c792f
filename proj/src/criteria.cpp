#include "lexfun/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexfun/errors.hpp"

namespace lexfun {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::ConstantAtom:
      return "ConstantAtom";
    case Verdict::HasAtoms:
      return "HasAtoms";
    case Verdict::NoAtoms:
      return "NoAtoms";
    case Verdict::AbsolutelyContinuous:
      return "AbsolutelyContinuous";
    case Verdict::LebesgueDensity:
      return "LebesgueDensity";
    case Verdict::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

std::string to_string(Tristate t) {
  switch (t) {
    case Tristate::Yes:
      return "Yes";
    case Tristate::No:
      return "No";
    case Tristate::Unknown:
      return "Unknown";
  }
  return "Unknown";
}

std::string to_string(ConvergenceVerdict v) {
  switch (v) {
    case ConvergenceVerdict::Converges:
      return "Converges";
    case ConvergenceVerdict::Diverges:
      return "Diverges";
    case ConvergenceVerdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

bool predicts_atoms(Verdict v) { return v == Verdict::ConstantAtom || v == Verdict::HasAtoms; }

bool RuleTrace::passed() const {
  return std::all_of(premises.begin(), premises.end(), [](const Premise& p) { return p.passed; });
}

namespace {

nlohmann::json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

nlohmann::json Classification::to_json() const {
  nlohmann::json j;
  j["verdict"] = to_string(verdict);
  if (k) j["k"] = *k;
  j["trace"] = nlohmann::json::array();
  for (const RuleTrace& r : trace) {
    nlohmann::json jr;
    jr["rule"] = r.rule;
    jr["result"] = r.result;
    jr["passed"] = r.passed();
    jr["premises"] = nlohmann::json::array();
    for (const Premise& p : r.premises) {
      jr["premises"].push_back({{"name", p.name}, {"passed", p.passed}, {"detail", p.detail}});
    }
    j["trace"].push_back(jr);
  }
  j["warnings"] = warnings;
  return j;
}

nlohmann::json ConvergenceReport::to_json() const {
  nlohmann::json j;
  j["xi_drifts_to_infinity"] = to_string(xi_drifts_to_infinity);
  j["xi_mean"] = xi_mean ? number_or_string(*xi_mean) : nlohmann::json(nullptr);
  j["eta_log_integral"] = number_or_string(eta_log_integral);
  j["verdict"] = to_string(verdict);
  if (!diagnostics.empty()) j["diagnostics"] = diagnostics;
  return j;
}

nlohmann::json DegeneracyResult::to_json() const {
  nlohmann::json j;
  j["degenerate"] = degenerate();
  if (k) j["k"] = *k;
  j["sigma_residual"] = number_or_string(sigma_residual);
  j["curve_residual"] = number_or_string(curve_residual);
  j["claim_residual"] = number_or_string(claim_residual);
  if (!failing_clause.empty()) j["failing_clause"] = failing_clause;
  return j;
}

// ---------------------------------------------------------------------------
// Drift and transience

std::optional<double> levy_mean(const LevyTriplet1D& xi) {
  const LevyMeasure1D& m = xi.measure();
  try {
    const double up = m.integrate([](double x) { return x; }, Region::above(1.0));
    const double down = m.integrate([](double x) { return x; }, Region::below(-1.0));
    if (std::isinf(up) && std::isinf(down)) return std::nullopt;
    return xi.gamma() + up + down;
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

Tristate is_transient(const LevyTriplet1D& xi) {
  const auto mean = levy_mean(xi);
  if (!mean) return Tristate::Unknown;
  return std::abs(*mean) <= 1e-12 ? Tristate::No : Tristate::Yes;
}

// ---------------------------------------------------------------------------
// Convergence

ConvergenceReport check_convergence(const LevyTriplet2D& triplet) {
  ConvergenceReport rep;
  const LevyTriplet1D xi = triplet.marginal_xi();
  const LevyMeasure1D eta_measure = triplet.measure().eta_marginal();
  rep.xi_mean = levy_mean(xi);
  if (!rep.xi_mean) {
    rep.xi_drifts_to_infinity = Tristate::Unknown;
  } else {
    rep.xi_drifts_to_infinity = *rep.xi_mean > 1e-12 ? Tristate::Yes : Tristate::No;
  }
  const bool flat = !xi.measure().has_positive_part();
  auto a_of = [&](double l) { return flat ? 1.0 : a_xi(xi, std::max(1.0, l)); };
  try {
    rep.eta_log_integral = eta_measure.integrate(
        Integrand([&](double y) {
                    const double l = std::log(std::abs(y));
                    return l / a_of(l);
                  },
                  [&](int, double l) { return l / a_of(l); }),
        Region::abs_greater(std::exp(1.0)));
  } catch (const NumericError& e) {
    rep.eta_log_integral = std::nan("");
    rep.diagnostics = e.what();
  }
  const bool finite = std::isfinite(rep.eta_log_integral);
  const bool infinite = std::isinf(rep.eta_log_integral);
  if (rep.xi_drifts_to_infinity == Tristate::No) {
    rep.verdict = ConvergenceVerdict::Diverges;
  } else if (infinite) {
    rep.verdict = ConvergenceVerdict::Diverges;
  } else if (rep.xi_drifts_to_infinity == Tristate::Yes && finite) {
    rep.verdict = ConvergenceVerdict::Converges;
  } else {
    rep.verdict = ConvergenceVerdict::Inconclusive;
    if (rep.diagnostics.empty()) rep.diagnostics = "drift of xi to +inf undecidable from the mean";
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Degeneracy

DegeneracyResult check_degenerate(const LevyTriplet2D& triplet, const DegeneracyTolerances& tol) {
  DegeneracyResult res;
  const Covariance2& s = triplet.sigma();
  const LevyMeasure2D& m = triplet.measure();
  const auto points = m.probe_points();

  double k = std::nan("");
  if (s.s11 > 0.0) {
    k = s.s12 / s.s11;
  } else {
    for (const auto& [x, y] : points) {
      if (x == 0.0) continue;
      const double cand = y / (-std::expm1(-x));
      if (std::isfinite(cand) && cand != 0.0) {
        k = cand;
        break;
      }
    }
    if (std::isnan(k)) {
      res.failing_clause = "no candidate k: zero xi variance and no joint jump with x != 0";
      return res;
    }
  }
  if (!std::isfinite(k) || k == 0.0) {
    res.failing_clause = "candidate k is zero or not finite";
    return res;
  }

  res.sigma_residual = std::max(std::abs(s.s12 - k * s.s11), std::abs(s.s22 - k * k * s.s11));
  res.curve_residual = 0.0;
  for (const auto& [x, y] : points) {
    // relative to |y| once |y| > 1: far probes carry only rounding error
    res.curve_residual = std::max(res.curve_residual,
                                  std::abs(y + k * std::expm1(-x)) / std::max(1.0, std::abs(y)));
  }
  const double lhs = triplet.gamma1() - triplet.gamma2() / k;
  const double rhs = 0.5 * s.s11 + doleans_claim_integral(m);
  res.claim_residual = std::abs(lhs - rhs);

  if (!(res.sigma_residual <= tol.sigma)) {
    res.failing_clause = "covariance is not of the form [[1,k],[k,k^2]] s11 (residual " +
                         fmt(res.sigma_residual) + ")";
  } else if (!(res.curve_residual <= tol.curve)) {
    res.failing_clause = "jump measure is not carried by y = k(1 - e^{-x}) (residual " +
                         fmt(res.curve_residual) + ")";
  } else if (!(res.claim_residual <= tol.gamma)) {
    res.failing_clause = "drift identity fails (residual " + fmt(res.claim_residual) + ")";
  } else {
    res.k = k;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Classification of exponential functionals

Classification classify_exponential(const LevyTriplet2D& triplet) {
  Classification c;
  const ConvergenceReport conv = check_convergence(triplet);
  const Premise converges{"integral converges", conv.verdict == ConvergenceVerdict::Converges,
                          "convergence check: " + to_string(conv.verdict)};
  if (!converges.passed) {
    c.trace.push_back({"convergence", "integral converges a.s.", {converges}});
    c.warnings.push_back("convergence not established; no distributional verdict");
    return c;
  }

  const DegeneracyResult deg = check_degenerate(triplet);
  RuleTrace r1{"degenerate_pair",
               "limit is the constant k",
               {converges,
                {"covariance, curve support and drift identity hold", deg.degenerate(),
                 deg.degenerate() ? "k=" + fmt(*deg.k) : deg.failing_clause}}};
  c.trace.push_back(r1);
  if (r1.passed()) {
    c.verdict = Verdict::ConstantAtom;
    c.k = deg.k;
    return c;
  }

  RuleTrace r2{"atom_iff_constant",
               "a non-constant limit has no atoms",
               {converges, {"pair is not degenerate", true, deg.failing_clause}}};
  c.trace.push_back(r2);
  c.verdict = Verdict::NoAtoms;

  const LevyTriplet1D xi = triplet.marginal_xi();
  const LevyMeasure1D& pe = triplet.measure().eta_marginal();
  double log_moment = std::nan("");
  try {
    log_moment = pe.integrate(Integrand([](double y) { return std::log(std::abs(y)); },
                                        [](int, double l) { return l; }),
                              Region::abs_greater(std::exp(1.0)));
  } catch (const NumericError&) {
  }
  RuleTrace r3{"self_decomposable",
               "limit is self-decomposable, hence has a density",
               {{"xi has no positive jumps", !xi.measure().has_positive_part(), ""},
                {"xi drifts to +inf", conv.xi_drifts_to_infinity == Tristate::Yes,
                 conv.xi_mean ? "mean=" + fmt(*conv.xi_mean) : "mean undefined"},
                {"log-moment of eta jumps beyond e is finite", std::isfinite(log_moment),
                 fmt(log_moment)}}};
  c.trace.push_back(r3);
  if (r3.passed()) c.verdict = Verdict::LebesgueDensity;
  return c;
}

// ---------------------------------------------------------------------------
// g-flag validation

namespace {

bool same_value(double a, double b) {
  return std::abs(a - b) <= 1e-14 * std::max(std::abs(a), std::abs(b));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

double level_set_fraction(const GDescriptor& g, const std::vector<double>& zs,
                          const std::vector<double>& ts) {
  std::size_t equal = 0;
  std::size_t total = 0;
  for (double z : zs) {
    for (double t : ts) {
      equal += same_value(g.eval(t), g.eval(t + z)) ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(equal) / static_cast<double>(total);
}

}  // namespace

void validate_g_flags(const GDescriptor& g) {
  auto fail = [&](const std::string& why) {
    throw DomainError("g '" + g.name + "': declared properties contradict: " + why);
  };
  if (!g.eval) fail("no evaluator");
  const double lo = g.compact_support ? g.compact_support->first : -10.0;
  const double hi = g.compact_support ? g.compact_support->second : 10.0;
  if (g.compact_support && !(lo <= hi)) fail("support interval is reversed");
  const auto grid = linspace(lo - 2.0, hi + 2.0, 2001);

  if (g.nonneg) {
    for (double x : grid) {
      if (g.eval(x) < 0.0) fail("nonneg but g(" + fmt(x) + ") < 0");
    }
  }
  if (g.compact_support) {
    for (double x : grid) {
      if ((x < lo || x > hi) && g.eval(x) != 0.0) {
        fail("compact support [" + fmt(lo) + "," + fmt(hi) + "] but g(" + fmt(x) + ") != 0");
      }
    }
  }
  if (g.support_interior_contains_0 && !(g.compact_support && lo < 0.0 && 0.0 < hi)) {
    fail("support interior should contain 0");
  }
  if (g.positive_on_interior) {
    if (!g.compact_support) fail("positive_on_interior needs a compact support");
    for (double x : linspace(lo, hi, 2001)) {
      if (x > lo && x < hi && !(g.eval(x) > 0.0)) fail("g(" + fmt(x) + ") <= 0 inside support");
    }
  }
  if (g.g0_nonzero && g.eval(0.0) == 0.0) fail("g0_nonzero but g(0) = 0");
  if (g.positive_near_0) {
    for (double x : {-1e-6, 0.0, 1e-6}) {
      if (!(g.eval(x) > 0.0)) fail("positive_near_0 but g(" + fmt(x) + ") <= 0");
    }
  }
  if (g.indicator_of) {
    const auto [a, b] = *g.indicator_of;
    if (g.compact_support && (*g.compact_support != *g.indicator_of)) {
      fail("indicator interval differs from declared support");
    }
    for (double x : linspace(a - 1.0, b + 1.0, 401)) {
      const double want = (x >= a && x <= b) ? 1.0 : 0.0;
      if (g.eval(x) != want) fail("not the indicator of [" + fmt(a) + "," + fmt(b) + "]");
    }
  }
  if (g.level_set_nondegenerate) {
    const LevelSetWindow& w = *g.level_set_nondegenerate;
    if (!(w.j_lo < w.j_hi) || (w.j_lo <= 0.0 && w.j_hi >= 0.0)) {
      fail("level-set window J must be a compact interval avoiding 0");
    }
    if (!(w.t0 > 0.0)) fail("level-set t0 must be positive");
    std::vector<double> zs;
    for (int i = 0; i < 64; ++i) zs.push_back(w.j_lo + (i + 0.5) / 64.0 * (w.j_hi - w.j_lo));
    auto ts = linspace(w.t0, w.t0 + 10.0, 200);
    for (double t : linspace(-w.t0 - 10.0, -w.t0, 200)) ts.push_back(t);
    const double frac = level_set_fraction(g, zs, ts);
    if (frac > 0.01) fail("g(t) = g(t+z) on " + fmt(100 * frac) + "% of the level-set grid");
  }
  if (g.level_set_nondegenerate_near_0) {
    const double e = *g.level_set_nondegenerate_near_0;
    if (!(e > 0.0)) fail("near-0 level-set epsilon must be positive");
    std::vector<double> zs;
    for (int i = 0; i < 64; ++i) zs.push_back(-e + (i + 0.5) / 32.0 * e);
    const auto ts = linspace(-e * (1 - 1e-9), e * (1 - 1e-9), 401);
    const double frac = level_set_fraction(g, zs, ts);
    if (frac > 0.01) fail("g(t) = g(t+z) near 0 on " + fmt(100 * frac) + "% of the grid");
  }
  if (g.strictly_monotone_near_0) {
    const double d = g.level_set_nondegenerate_near_0.value_or(1e-2);
    const auto xs = linspace(-d * (1 - 1e-9), d * (1 - 1e-9), 201);
    int sign = 0;
    for (std::size_t i = 1; i < xs.size(); ++i) {
      const double diff = g.eval(xs[i]) - g.eval(xs[i - 1]);
      const int s = diff > 0.0 ? 1 : (diff < 0.0 ? -1 : 0);
      if (s == 0 || (sign != 0 && s != sign)) fail("not strictly monotone near 0");
      sign = s;
    }
  }
}

// ---------------------------------------------------------------------------
// Classification of g-integrals

Classification classify_g_integral(const LevyTriplet1D& xi, const GDescriptor& g,
                                   const YProcessSpec& y) {
  validate_g_flags(g);
  Classification c;
  const LevyMeasure1D& m = xi.measure();
  const auto mean = levy_mean(xi);
  const Tristate transient = is_transient(xi);
  const bool gaussian = xi.sigma2() > 0.0;
  const bool finite_activity = m.activity() == Activity::Finite;
  const bool bounded_variation =
      !gaussian && m.small_jump_variation() == Variation::FiniteVariation;
  const std::optional<double> drift = bounded_variation ? xi.drift_bv() : std::nullopt;
  const bool zero_drift = drift && std::abs(*drift) <= 1e-12;
  const bool identity_y = y.kind == YProcessSpec::Kind::Identity;
  const std::string mean_text = mean ? "mean=" + fmt(*mean) : "mean undefined";
  const std::string drift_text = drift ? "drift=" + fmt(*drift) : "no finite-variation drift";

  if (transient == Tristate::No) {
    c.warnings.push_back("xi has zero mean, so it is recurrent; the integral is typically infinite");
  } else if (transient == Tristate::Unknown) {
    c.warnings.push_back("transience of xi undecided: the mean does not exist");
  }

  const Premise p_identity{"Y_t = t", identity_y, y.label};
  const Premise p_transient{"xi transient", transient == Tristate::Yes, mean_text};

  auto try_rule = [&](RuleTrace r, Verdict v) {
    c.trace.push_back(std::move(r));
    if (c.trace.back().passed()) {
      c.verdict = v;
      return true;
    }
    return false;
  };

  // Compound Poisson, no drift, g(0) != 0.
  if (try_rule({"cpp_no_drift",
                "integral has a Lebesgue density",
                {p_identity,
                 {"xi compound Poisson", !gaussian && finite_activity && !m.empty(), ""},
                 {"xi has no drift", zero_drift, drift_text},
                 {"g(0) != 0", g.g0_nonzero, fmt(g.eval(0.0))}}},
               Verdict::LebesgueDensity)) {
    return c;
  }

  // Compound Poisson plus drift a != 0 drifting to sgn(a) inf, compact g.
  const bool drifts_with_a = drift && mean && *drift != 0.0 && std::abs(*mean) > 1e-12 &&
                             ((*drift > 0.0) == (*mean > 0.0));
  if (try_rule({"cpp_with_drift_compact_g",
                "integral has atoms",
                {p_identity,
                 {"xi compound Poisson plus drift", !gaussian && finite_activity && !m.empty(), ""},
                 {"drift a != 0 and xi drifts to sgn(a) inf", drifts_with_a,
                  drift_text + ", " + mean_text},
                 {"g has compact support", g.compact_support.has_value(), ""}}},
               Verdict::HasAtoms)) {
    return c;
  }

  // Subordinator first passage with indicator g.
  const bool subordinator = !gaussian && !m.has_negative_part() && drift && *drift >= 0.0 &&
                            !(m.empty() && *drift == 0.0);
  const bool indicator_0x = g.indicator_of && g.indicator_of->first == 0.0 &&
                            g.indicator_of->second > 0.0;
  if (try_rule({"subordinator_first_passage",
                "integral is a first-passage time without atoms",
                {p_identity,
                 {"xi subordinator", subordinator, drift_text},
                 {"infinite jump measure or zero drift", !finite_activity || zero_drift, ""},
                 {"g = 1_[0,x]", indicator_0x, ""}}},
               Verdict::NoAtoms)) {
    return c;
  }

  // Compactly supported positive g around 0, transient xi.
  const bool unbounded_variation = !bounded_variation;
  const bool boundary_countable = g.boundary_countable || g.boundary_finite;
  const bool case_i = unbounded_variation && g.boundary_finite;
  const bool case_ii = bounded_variation && zero_drift && boundary_countable;
  if (try_rule({"compact_support_transient",
                "integral has no atoms",
                {p_identity,
                 p_transient,
                 {"g >= 0", g.nonneg, ""},
                 {"g compactly supported", g.compact_support.has_value(), ""},
                 {"0 interior to supp g", g.support_interior_contains_0, ""},
                 {"g > 0 on the interior of supp g", g.positive_on_interior, ""},
                 {"unbounded variation with finite boundary, or bounded variation with zero "
                  "drift and countable boundary",
                  case_i || case_ii,
                  case_i ? "case (i)" : (case_ii ? "case (ii)" : drift_text)}}},
               Verdict::NoAtoms)) {
    return c;
  }

  // 0 regular for itself.
  const bool spectrally_negative = !m.has_positive_part();
  const bool regular = gaussian || (unbounded_variation && spectrally_negative);
  if (try_rule({"zero_regular_for_itself",
                "integral has no atoms",
                {p_identity,
                 p_transient,
                 {"0 regular for itself (Gaussian part, or infinite variation without upward "
                  "jumps)",
                  regular, ""},
                 {"g >= 0", g.nonneg, ""},
                 {"g > 0 near 0", g.positive_near_0, ""}}},
               Verdict::NoAtoms)) {
    return c;
  }

  // xi_t = a t - sigma_t.
  const double sub_mean =
      m.has_negative_part() ? -m.integrate([](double x) { return x; }, Region::below(0.0)) : 0.0;
  const bool drift_minus_sub = !gaussian && spectrally_negative && m.has_negative_part() &&
                               !finite_activity && bounded_variation && drift && *drift > 0.0;
  if (try_rule({"spectrally_negative_bv",
                "integral has no atoms",
                {p_identity,
                 {"xi = a t - subordinator with infinite jump measure, a > 0", drift_minus_sub,
                  drift_text},
                 {"a != E sigma_1", drift && std::abs(*drift - sub_mean) > 1e-12,
                  "E sigma_1=" + fmt(sub_mean)},
                 {"g >= 0", g.nonneg, ""},
                 {"g > 0 near 0", g.positive_near_0, ""}}},
               Verdict::NoAtoms)) {
    return c;
  }

  // Level-set conditions with a general Y.
  const auto y_case = [&](bool& abs_cont) {
    abs_cont = y.ac_density_nonvanishing;
    return y.ac_density_nonvanishing || (y.strictly_increasing && g.countable_discontinuities);
  };
  bool abs_cont = false;
  const bool y_ok = y_case(abs_cont);
  const Verdict y_verdict = abs_cont ? Verdict::AbsolutelyContinuous : Verdict::NoAtoms;
  const Premise p_y{"Y has an a.e. positive density, or is strictly increasing with g having "
                    "countably many discontinuities",
                    y_ok, abs_cont ? "case (i)" : (y_ok ? "case (ii)" : y.label)};

  double j_mass = 0.0;
  if (g.level_set_nondegenerate) {
    const auto& w = *g.level_set_nondegenerate;
    j_mass = m.mass(Region::between(w.j_lo, w.j_hi, true, true));
  }
  if (try_rule({"level_set_jump_window",
                "integral is absolutely continuous (i) or has no atoms (ii)",
                {p_transient,
                 {"jump measure non-zero", !m.empty(), ""},
                 {"level sets of g(t) = g(t+z) null for |t| >= t0, z in J",
                  g.level_set_nondegenerate.has_value(), ""},
                 {"Pi_xi(J) > 0", j_mass > 0.0, fmt(j_mass)},
                 p_y}},
               y_verdict)) {
    return c;
  }

  if (try_rule({"level_set_near_zero",
                "integral is absolutely continuous (i) or has no atoms (ii)",
                {p_transient,
                 {"infinite jump measure", !finite_activity, ""},
                 {"level sets of g(t) = g(t+z) null near 0 (or g strictly monotone near 0)",
                  g.level_set_nondegenerate_near_0.has_value() || g.strictly_monotone_near_0, ""},
                 p_y}},
               y_verdict)) {
    return c;
  }

  c.verdict = Verdict::Unknown;
  return c;
}

}  // namespace lexfun
