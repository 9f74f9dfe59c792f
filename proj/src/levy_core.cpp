#include "lexfun/levy_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexfun/errors.hpp"

namespace lexfun {

// ---------------------------------------------------------------------------
// LevyTriplet1D

LevyTriplet1D::LevyTriplet1D(double gamma, double sigma2, LevyMeasure1D measure)
    : gamma_(gamma), sigma2_(sigma2), measure_(std::move(measure)) {
  if (!std::isfinite(gamma_) || !std::isfinite(sigma2_)) {
    throw DomainError("triplet entries must be finite");
  }
  if (sigma2_ < 0.0) throw DomainError("Gaussian variance must be non-negative");
  if (gamma_ == 0.0 && sigma2_ == 0.0 && measure_.empty()) {
    throw DomainError("the zero triplet is not admissible");
  }
  if (measure_.small_jump_variation() == Variation::FiniteVariation) {
    drift_bv_ = gamma_ - measure_.integrate([](double x) { return x; }, Region::abs_at_most(1.0));
  }
}

double cutoff_drift(double gamma, const LevyMeasure1D& measure, double eps) {
  if (measure.empty()) return gamma;
  auto id = [](double x) { return x; };
  if (eps <= 1.0) {
    return gamma - measure.integrate(id, Region({Interval{-1.0, -eps, true, false},
                                                 Interval{eps, 1.0, false, true}}));
  }
  return gamma + measure.integrate(id, Region({Interval{-eps, -1.0, true, false},
                                               Interval{1.0, eps, false, true}}));
}

double LevyTriplet1D::cutoff_drift(double eps) const {
  return lexfun::cutoff_drift(gamma_, measure_, eps);
}

// ---------------------------------------------------------------------------
// Bands and curves

double jump_norm(JumpNorm norm, double x, double y) {
  switch (norm) {
    case JumpNorm::AbsX:
      return std::abs(x);
    case JumpNorm::AbsY:
      return std::abs(y);
    case JumpNorm::Euclid:
      return std::hypot(x, y);
    case JumpNorm::Max:
      return std::max(std::abs(x), std::abs(y));
  }
  return 0.0;
}

JumpCurve JumpCurve::x_axis() {
  return {[](double u) { return std::pair<double, double>{u, 0.0}; }};
}

JumpCurve JumpCurve::y_axis() {
  return {[](double u) { return std::pair<double, double>{0.0, u}; }};
}

JumpCurve JumpCurve::exponential(double k) {
  return {[k](double u) { return std::pair<double, double>{u, -k * std::expm1(-u)}; }};
}

double JumpCurve::threshold(JumpNorm norm, int side, double c) const {
  if (c < 0.0) return 0.0;
  if (std::isinf(c)) return kInf;
  auto v = [&](double u) {
    const auto [x, y] = at(side * u);
    return jump_norm(norm, x, y);
  };
  double lo = 0.0;
  double hi = std::max(c, 1e-300);
  while (!(v(hi) > c)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  for (int i = 0; i < 2000; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (v(mid) > c) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

bool JumpCurve::in_band(double u, const JointBand& band) const {
  const auto [x, y] = at(u);
  return std::all_of(band.begin(), band.end(), [&](const BandCondition& b) {
    const double v = jump_norm(b.norm, x, y);
    return v > b.lo && v <= b.hi;
  });
}

Region JumpCurve::band_region(const JointBand& band) const {
  std::vector<Interval> pieces;
  for (int side : {-1, 1}) {
    double a = 0.0;
    double b = kInf;
    for (const BandCondition& cond : band) {
      a = std::max(a, threshold(cond.norm, side, cond.lo));
      b = std::min(b, threshold(cond.norm, side, cond.hi));
    }
    if (!(a < b)) continue;
    // Widen slightly; the exact predicate is applied inside the integrand.
    const double wa = a * (1.0 - 1e-12);
    const double wb = std::isinf(b) ? b : b * (1.0 + 1e-12) + 1e-300;
    if (side > 0) {
      pieces.push_back(Interval{wa, wb, false, true});
    } else {
      pieces.push_back(Interval{-wb, -wa, true, false});
    }
  }
  return Region(std::move(pieces));
}

// ---------------------------------------------------------------------------
// LevyMeasure2D

namespace {

double integrate_on_curve(const LevyMeasure1D& base, const JumpCurve& curve,
                          const std::function<double(double, double)>& f, const JointBand& band,
                          const QuadratureOptions& opts) {
  if (base.empty()) return 0.0;
  const Region region = curve.band_region(band);
  if (region.intervals().empty()) return 0.0;
  return base.integrate(
      [&](double u) {
        if (!curve.in_band(u, band)) return 0.0;
        const auto [x, y] = curve.at(u);
        return f(x, y);
      },
      region, opts);
}

}  // namespace

LevyMeasure2D::LevyMeasure2D() : rep_(ProductIndependent{}) {}

LevyMeasure2D::LevyMeasure2D(Representation rep) : rep_(std::move(rep)) {
  if (auto* p = std::get_if<ProductIndependent>(&rep_)) {
    xi_marginal_ = p->xi;
    eta_marginal_ = p->eta;
  } else if (auto* j = std::get_if<JointAtoms>(&rep_)) {
    std::vector<Atom> xs;
    std::vector<Atom> ys;
    for (const JointAtom& a : j->atoms) {
      if (!std::isfinite(a.x) || !std::isfinite(a.y) || (a.x == 0.0 && a.y == 0.0)) {
        throw DomainError("joint atom must sit at a finite point other than the origin");
      }
      if (!(a.mass > 0.0)) throw DomainError("joint atom must carry positive mass");
      if (a.x != 0.0) xs.push_back({a.x, a.mass});
      if (a.y != 0.0) ys.push_back({a.y, a.mass});
    }
    xi_marginal_ = LevyMeasure1D(std::move(xs));
    eta_marginal_ = LevyMeasure1D(std::move(ys));
  } else {
    auto& c = std::get<CurveSupported>(rep_);
    if (!std::isfinite(c.k) || c.k == 0.0) throw DomainError("curve parameter k must be non-zero");
    xi_marginal_ = c.base;
    const double k = c.k;
    eta_marginal_ = c.base.image(MonotoneMap{
        [k](double x) { return -k * std::expm1(-x); },
        [k](double y) { return -std::log1p(-y / k); },
        [k](double y) { return 1.0 / (k - y); },
        "k(1-exp(-x))"});
  }
}

double LevyMeasure2D::integrate(const std::function<double(double, double)>& f,
                                const JointBand& band, const QuadratureOptions& opts) const {
  if (const auto* p = std::get_if<ProductIndependent>(&rep_)) {
    return integrate_on_curve(p->xi, JumpCurve::x_axis(), f, band, opts) +
           integrate_on_curve(p->eta, JumpCurve::y_axis(), f, band, opts);
  }
  if (const auto* j = std::get_if<JointAtoms>(&rep_)) {
    double total = 0.0;
    for (const JointAtom& a : j->atoms) {
      const bool inside = std::all_of(band.begin(), band.end(), [&](const BandCondition& b) {
        const double v = jump_norm(b.norm, a.x, a.y);
        return v > b.lo && v <= b.hi;
      });
      if (inside) total += a.mass * f(a.x, a.y);
    }
    return total;
  }
  const auto& c = std::get<CurveSupported>(rep_);
  return integrate_on_curve(c.base, JumpCurve::exponential(c.k), f, band, opts);
}

double LevyMeasure2D::mass(const JointBand& band) const {
  return integrate([](double, double) { return 1.0; }, band);
}

std::vector<std::pair<double, double>> LevyMeasure2D::probe_points() const {
  std::vector<std::pair<double, double>> pts;
  if (const auto* p = std::get_if<ProductIndependent>(&rep_)) {
    for (double x : p->xi.probe_points()) pts.emplace_back(x, 0.0);
    for (double y : p->eta.probe_points()) pts.emplace_back(0.0, y);
  } else if (const auto* j = std::get_if<JointAtoms>(&rep_)) {
    for (const JointAtom& a : j->atoms) pts.emplace_back(a.x, a.y);
  } else {
    const auto& c = std::get<CurveSupported>(rep_);
    const JumpCurve curve = JumpCurve::exponential(c.k);
    for (double u : c.base.probe_points()) pts.push_back(curve.at(u));
  }
  return pts;
}

// ---------------------------------------------------------------------------
// LevyTriplet2D

LevyTriplet2D::LevyTriplet2D(double gamma1, double gamma2, Covariance2 sigma,
                             LevyMeasure2D measure)
    : gamma1_(gamma1), gamma2_(gamma2), sigma_(sigma), measure_(std::move(measure)) {
  if (!std::isfinite(gamma1_) || !std::isfinite(gamma2_)) {
    throw DomainError("drift entries must be finite");
  }
  const double tr = sigma_.s11 + sigma_.s22;
  const double det = sigma_.s11 * sigma_.s22 - sigma_.s12 * sigma_.s12;
  const double tol = 1e-12 * std::max(1.0, tr * tr);
  if (sigma_.s11 < 0.0 || sigma_.s22 < 0.0 || det < -tol) {
    std::ostringstream os;
    os << "covariance [[" << sigma_.s11 << "," << sigma_.s12 << "],[" << sigma_.s12 << ","
       << sigma_.s22 << "]] is not positive semi-definite";
    throw DomainError(os.str());
  }
}

LevyTriplet1D LevyTriplet2D::marginal_xi() const {
  const double shift = measure_.integrate([](double x, double) { return x; },
                                          {{JumpNorm::AbsX, -kInf, 1.0}, {JumpNorm::Euclid, 1.0, kInf}});
  return LevyTriplet1D(gamma1_ + shift, sigma_.s11, measure_.xi_marginal());
}

LevyTriplet1D LevyTriplet2D::marginal_eta() const {
  const double shift = measure_.integrate([](double, double y) { return y; },
                                          {{JumpNorm::AbsY, -kInf, 1.0}, {JumpNorm::Euclid, 1.0, kInf}});
  return LevyTriplet1D(gamma2_ + shift, sigma_.s22, measure_.eta_marginal());
}

// ---------------------------------------------------------------------------
// Operations

double a_xi(const LevyTriplet1D& triplet, double y) {
  if (!(y >= 1.0)) throw DomainError("a_xi requires y >= 1");
  const LevyMeasure1D& m = triplet.measure();
  if (!m.has_positive_part()) return 1.0;
  if (std::isinf(y)) {
    return 1.0 + m.integrate([](double x) { return x - 1.0; }, Region::above(1.0));
  }
  const double inner =
      m.integrate([](double x) { return x - 1.0; }, Region::between(1.0, y, false, true));
  const double outer = y > 1.0 ? (y - 1.0) * m.tail_plus(y) : 0.0;
  return 1.0 + inner + outer;
}

std::pair<LevyMeasure1D, LevyMeasure1D> marginal_tails(const LevyMeasure2D& measure) {
  return {measure.xi_marginal(), measure.eta_marginal()};
}

MonotoneMap doleans_jump_map(double k) {
  return MonotoneMap{[k](double y) { return -std::log1p(-y / k); },
                     [k](double x) { return -k * std::expm1(-x); },
                     [k](double x) { return k * std::exp(-x); }, "-log(1-y/k)"};
}

double doleans_claim_integral(const LevyMeasure2D& measure) {
  return measure.integrate(
      [](double x, double) {
        // e^{-x} - 1 + x, accurate near 0
        return std::abs(x) < 1e-3 ? x * x * (0.5 - x / 6.0 + x * x / 24.0) : std::expm1(-x) + x;
      },
      {{JumpNorm::Euclid, -kInf, 1.0}});
}

LevyTriplet2D doleans_xi_from_eta(const LevyTriplet1D& eta, double k) {
  if (!std::isfinite(k) || k == 0.0) throw DomainError("k must be finite and non-zero");
  const LevyMeasure1D& pe = eta.measure();
  const Region forbidden = k > 0 ? Region::between(k, kInf, true, false)
                                 : Region::between(-kInf, k, false, true);
  const double bad = pe.mass(forbidden);
  if (bad > 0.0) {
    std::ostringstream os;
    os << "Pi_eta({y : y/k >= 1}) = " << bad << " > 0 for k = " << k;
    throw DomainError(os.str());
  }
  const double s_xi = eta.sigma2() / (k * k);
  const Covariance2 sigma{s_xi, s_xi * k, eta.sigma2()};
  LevyMeasure2D measure(CurveSupported{k, pe.image(doleans_jump_map(k))});
  const double eta_shift = measure.integrate(
      [](double, double y) { return y; }, {{JumpNorm::AbsY, -kInf, 1.0}, {JumpNorm::Euclid, 1.0, kInf}});
  const double gamma2 = eta.gamma() - eta_shift;
  const double gamma1 = gamma2 / k + 0.5 * s_xi + doleans_claim_integral(measure);
  return LevyTriplet2D(gamma1, gamma2, sigma, std::move(measure));
}

}  // namespace lexfun
