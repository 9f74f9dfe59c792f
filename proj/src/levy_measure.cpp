#include "lexfun/levy_measure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "lexfun/errors.hpp"

namespace lexfun {

// ---------------------------------------------------------------------------
// Interval / Region

bool Interval::contains(double x) const {
  if (std::isnan(x)) return false;
  if (x == kInf) return hi == kInf;
  if (x == -kInf) return lo == -kInf;
  const bool above_lo = lo_closed ? x >= lo : x > lo;
  const bool below_hi = hi_closed ? x <= hi : x < hi;
  return above_lo && below_hi;
}

Region::Region(std::vector<Interval> pieces) : pieces_(std::move(pieces)) {
  std::sort(pieces_.begin(), pieces_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    if (pieces_[i].lo > pieces_[i].hi) throw DomainError("Region: interval with lo > hi");
    if (i > 0 && pieces_[i].lo < pieces_[i - 1].hi) {
      throw DomainError("Region: intervals overlap");
    }
  }
}

Region Region::whole_line() { return Region({Interval{-kInf, kInf}}); }
Region Region::above(double z) { return Region({Interval{z, kInf}}); }
Region Region::below(double z) { return Region({Interval{-kInf, z}}); }
Region Region::abs_greater(double r) {
  return Region({Interval{-kInf, -r}, Interval{r, kInf}});
}
Region Region::abs_at_most(double r) {
  return Region({Interval{-r, r, true, true}});
}
Region Region::between(double a, double b, bool a_closed, bool b_closed) {
  return Region({Interval{a, b, a_closed, b_closed}});
}

bool Region::contains(double x) const {
  return std::any_of(pieces_.begin(), pieces_.end(),
                     [x](const Interval& iv) { return iv.contains(x); });
}

// ---------------------------------------------------------------------------
// Component integrals

namespace {

double normalize_zero(double v) { return v == 0.0 ? 0.0 : v; }

// Integral of f * density over (a, b), which lies inside the segment.
double integrate_segment_piece(const DensitySegment& seg, const RealFn& f, double a, double b,
                               const QuadratureOptions& opts) {
  if (!(a < b)) return 0.0;
  if (seg.positive_side()) {
    RealFn h = [&](double u) {
      const double fu = f(u);
      return fu == 0.0 ? 0.0 : fu * seg.density(u);
    };
    return integrate_positive_half_line(h, a, b, opts);
  }
  RealFn h = [&](double u) {
    const double fu = f(-u);
    return fu == 0.0 ? 0.0 : fu * seg.density(-u);
  };
  return integrate_positive_half_line(h, -b, -a, opts);
}

double segment_mass_piece(const DensitySegment& seg, double a, double b,
                          const QuadratureOptions& opts) {
  if (!(a < b)) return 0.0;
  if (seg.mass) return seg.mass(a, b);
  return integrate_segment_piece(seg, [](double) { return 1.0; }, a, b, opts);
}

template <class PieceFn>
double over_region(const DensitySegment& seg, const Region& region, PieceFn&& piece) {
  double total = 0.0;
  for (const Interval& iv : region.intervals()) {
    const double a = std::max(iv.lo, seg.lo);
    const double b = std::min(iv.hi, seg.hi);
    if (a < b) total += piece(a, b);
  }
  return total;
}

double integrate_series(const AtomSeries& s, const Integrand& f, const Region& region,
                        const QuadratureOptions& opts) {
  double sum = 0.0;
  double at_checkpoint = 0.0;
  std::size_t checkpoint = 1;
  std::vector<double> increments;
  bool exhausted = false;
  for (std::size_t n = 1; n <= opts.max_series_terms; ++n) {
    const double m = s.mass(n);
    if (!(m > 0.0)) {
      exhausted = true;
      break;
    }
    const double l = s.log_abs_location(n);
    const double x = l < 709.0 ? s.sign * std::exp(l) : s.sign * kInf;
    if (region.contains(x)) {
      const double v = (std::isfinite(x) || !f.at_log) ? f.at(x) : f.at_log(s.sign, l);
      const double term = v * m;
      if (!std::isfinite(term)) break;
      sum += term;
    }
    if (n == checkpoint) {
      increments.push_back(sum - at_checkpoint);
      at_checkpoint = sum;
      checkpoint *= 2;
      if (std::abs(sum) > opts.divergence_threshold) return sum > 0 ? kInf : -kInf;
      const std::size_t k = increments.size();
      if (k >= 3) {
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(sum));
        if (std::abs(increments[k - 1]) <= tol && std::abs(increments[k - 2]) <= tol) return sum;
      }
    }
  }
  if (exhausted) return sum;
  // Stopped by the term cap or by terms leaving double range: decide by trend.
  const std::size_t k = increments.size();
  if (k >= 3) {
    const double a = std::abs(increments[k - 3]);
    const double b = std::abs(increments[k - 2]);
    const double c = std::abs(increments[k - 1]);
    if (a <= b && b <= c && c > opts.abs_tol) return sum > 0 ? kInf : -kInf;
    if (c <= std::max(opts.abs_tol, opts.rel_tol * std::abs(sum))) return sum;
  }
  std::ostringstream os;
  os << "series '" << s.label << "' partial=" << sum << " checkpoints=" << k;
  throw NumericError("atom series neither settled nor diverged", os.str());
}

}  // namespace

// ---------------------------------------------------------------------------
// LevyMeasure1D

LevyMeasure1D::LevyMeasure1D() = default;

LevyMeasure1D::LevyMeasure1D(std::vector<Atom> atoms, std::vector<DensitySegment> segments,
                             std::vector<AtomSeries> series)
    : atoms_(std::move(atoms)), segments_(std::move(segments)), series_(std::move(series)) {
  validate_and_classify();
}

void LevyMeasure1D::validate_and_classify() {
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.location) || a.location == 0.0) {
      throw DomainError("Levy measure atom must sit at a finite non-zero location");
    }
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      throw DomainError("Levy measure atom must carry a positive finite mass");
    }
  }
  for (DensitySegment& s : segments_) {
    s.lo = normalize_zero(s.lo);
    s.hi = normalize_zero(s.hi);
    if (!(s.lo < s.hi)) throw DomainError("density segment '" + s.label + "' is empty");
    if (s.lo < 0.0 && s.hi > 0.0) {
      throw DomainError("density segment '" + s.label + "' straddles the origin");
    }
    if (!s.density) throw DomainError("density segment '" + s.label + "' has no density");
  }
  for (const AtomSeries& s : series_) {
    if (!s.log_abs_location || !s.mass || (s.sign != 1 && s.sign != -1)) {
      throw DomainError("atom series '" + s.label + "' is incomplete");
    }
  }

  // Closed-form masses must agree with the density on an interior probe.
  for (const DensitySegment& s : segments_) {
    if (!s.mass) continue;
    double a = s.lo;
    double b = s.hi;
    if (a == 0.0) a = std::isfinite(b) ? b / 4 : 1.0;
    if (b == 0.0) b = std::isfinite(a) ? a / 4 : -1.0;
    if (std::isinf(b)) b = std::max(2.0 * std::abs(a), 1.0) * (a >= 0 ? 1.0 : -1.0) + a;
    if (std::isinf(a)) a = b - std::max(2.0 * std::abs(b), 1.0);
    const double lo = a + 0.25 * (b - a);
    const double hi = a + 0.75 * (b - a);
    const double exact = s.mass(lo, hi);
    const double numeric = integrate_segment_piece(s, [](double) { return 1.0; }, lo, hi, {});
    if (std::abs(exact - numeric) > 1e-7 * std::max(1.0, std::abs(exact))) {
      std::ostringstream os;
      os << "segment '" << s.label << "' on (" << lo << "," << hi << "): closed form " << exact
         << " vs quadrature " << numeric;
      throw DomainError("inconsistent density segment: " + os.str());
    }
  }

  const double levy_integral =
      integrate([](double x) { return std::min(1.0, x * x); }, Region::whole_line());
  if (!std::isfinite(levy_integral)) {
    throw DomainError("Levy measure violates the integrability condition for min(1, x^2)");
  }
  total_mass_ = mass(Region::whole_line());
  activity_ = std::isfinite(total_mass_) ? Activity::Finite : Activity::Infinite;
  const double small_abs =
      integrate([](double x) { return std::abs(x); }, Region::abs_at_most(1.0));
  variation_ = std::isfinite(small_abs) ? Variation::FiniteVariation : Variation::InfiniteVariation;
}

double LevyMeasure1D::tail_plus(double z) const { return mass(Region::above(z)); }

double LevyMeasure1D::tail_minus(double z) const { return mass(Region::below(-z)); }

double LevyMeasure1D::mass(const Region& region) const {
  QuadratureOptions opts;
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (region.contains(a.location)) total += a.mass;
  }
  for (const DensitySegment& s : segments_) {
    total += over_region(s, region, [&](double a, double b) {
      return segment_mass_piece(s, a, b, opts);
    });
  }
  for (const AtomSeries& s : series_) {
    total += integrate_series(s, [](double) { return 1.0; }, region, opts);
  }
  return total;
}

double LevyMeasure1D::integrate(const Integrand& f, const Region& region,
                                const QuadratureOptions& opts) const {
  double total = 0.0;
  for (const Atom& a : atoms_) {
    if (region.contains(a.location)) total += f.at(a.location) * a.mass;
  }
  for (const DensitySegment& s : segments_) {
    total += over_region(s, region, [&](double a, double b) {
      return integrate_segment_piece(s, f.at, a, b, opts);
    });
  }
  for (const AtomSeries& s : series_) {
    total += integrate_series(s, f, region, opts);
  }
  return total;
}

double integrate_against(const LevyMeasure1D& measure, const Integrand& f, const Region& region,
                         const QuadratureOptions& opts) {
  return measure.integrate(f, region, opts);
}

bool LevyMeasure1D::has_positive_part() const {
  return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.location > 0; }) ||
         std::any_of(segments_.begin(), segments_.end(),
                     [](const DensitySegment& s) { return s.positive_side(); }) ||
         std::any_of(series_.begin(), series_.end(), [](const AtomSeries& s) { return s.sign > 0; });
}

bool LevyMeasure1D::has_negative_part() const {
  return std::any_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.location < 0; }) ||
         std::any_of(segments_.begin(), segments_.end(),
                     [](const DensitySegment& s) { return !s.positive_side(); }) ||
         std::any_of(series_.begin(), series_.end(), [](const AtomSeries& s) { return s.sign < 0; });
}

double LevyMeasure1D::positive_support_sup() const {
  double sup = 0.0;
  for (const Atom& a : atoms_) sup = std::max(sup, a.location);
  for (const DensitySegment& s : segments_) {
    if (s.positive_side()) sup = std::max(sup, s.hi);
  }
  for (const AtomSeries& s : series_) {
    if (s.sign > 0) sup = kInf;
  }
  return sup;
}

double LevyMeasure1D::negative_support_inf() const {
  double inf = 0.0;
  for (const Atom& a : atoms_) inf = std::min(inf, a.location);
  for (const DensitySegment& s : segments_) {
    if (!s.positive_side()) inf = std::min(inf, s.lo);
  }
  for (const AtomSeries& s : series_) {
    if (s.sign < 0) inf = -kInf;
  }
  return inf;
}

LevyMeasure1D LevyMeasure1D::image(const MonotoneMap& map) const {
  std::vector<Atom> atoms;
  atoms.reserve(atoms_.size());
  for (const Atom& a : atoms_) {
    const double x = map.forward(a.location);
    if (!std::isfinite(x) || x == 0.0) {
      std::ostringstream os;
      os << "image of atom at " << a.location << " under '" << map.label << "' is " << x;
      throw DomainError(os.str());
    }
    atoms.push_back({x, a.mass});
  }

  std::vector<DensitySegment> segments;
  segments.reserve(segments_.size());
  for (const DensitySegment& src : segments_) {
    const double e1 = normalize_zero(src.lo == 0.0 ? 0.0 : map.forward(src.lo));
    const double e2 = normalize_zero(src.hi == 0.0 ? 0.0 : map.forward(src.hi));
    DensitySegment img;
    img.lo = std::min(e1, e2);
    img.hi = std::max(e1, e2);
    img.label = map.label + "(" + src.label + ")";
    img.density = [src, map](double x) {
      return src.density(map.inverse(x)) * std::abs(map.inverse_derivative(x));
    };
    img.mass = [src, map](double a, double b) {
      double p = map.inverse(a);
      double q = map.inverse(b);
      if (p > q) std::swap(p, q);
      p = std::max(p, src.lo);
      q = std::min(q, src.hi);
      return segment_mass_piece(src, p, q, {});
    };
    if (src.outer_mass_inverse) {
      img.outer_mass_inverse = [src, map](double m) { return map.forward(src.outer_mass_inverse(m)); };
    }
    segments.push_back(std::move(img));
  }

  std::vector<AtomSeries> series;
  for (const AtomSeries& src : series_) {
    AtomSeries img;
    img.label = map.label + "(" + src.label + ")";
    const double probe = map.forward(src.sign * 1.0);
    img.sign = probe > 0 ? 1 : -1;
    img.mass = src.mass;
    img.log_abs_location = [src, map](std::size_t n) {
      const double l = src.log_abs_location(n);
      const double x = l < 709.0 ? src.sign * std::exp(l) : src.sign * kInf;
      return std::log(std::abs(map.forward(x)));
    };
    series.push_back(std::move(img));
  }
  return LevyMeasure1D(std::move(atoms), std::move(segments), std::move(series));
}

LevyMeasure1D LevyMeasure1D::operator+(const LevyMeasure1D& other) const {
  std::vector<Atom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  std::vector<DensitySegment> segments = segments_;
  segments.insert(segments.end(), other.segments_.begin(), other.segments_.end());
  std::vector<AtomSeries> series = series_;
  series.insert(series.end(), other.series_.begin(), other.series_.end());
  return LevyMeasure1D(std::move(atoms), std::move(segments), std::move(series));
}

std::vector<double> LevyMeasure1D::probe_points(std::size_t per_segment) const {
  std::vector<double> pts;
  for (const Atom& a : atoms_) pts.push_back(a.location);
  for (const DensitySegment& s : segments_) {
    const double sgn = s.positive_side() ? 1.0 : -1.0;
    double near = std::abs(s.positive_side() ? s.lo : s.hi);
    double far = std::abs(s.positive_side() ? s.hi : s.lo);
    for (std::size_t i = 0; i < per_segment; ++i) {
      const double u = (static_cast<double>(i) + 0.5) / static_cast<double>(per_segment);
      double x = 0.0;
      if (near == 0.0 && std::isinf(far)) {
        x = std::ldexp(1.0, static_cast<int>(i) - static_cast<int>(per_segment / 2));
      } else if (near == 0.0) {
        x = far * std::ldexp(1.0, -static_cast<int>(i) - 1);
      } else if (std::isinf(far)) {
        x = near * std::ldexp(1.0, static_cast<int>(i) + 1);
      } else {
        x = near + u * (far - near);
      }
      pts.push_back(sgn * x);
    }
  }
  for (const AtomSeries& s : series_) {
    for (std::size_t n = 1; n <= 4; ++n) {
      const double l = s.log_abs_location(n);
      if (l < 700.0) pts.push_back(s.sign * std::exp(l));
    }
  }
  return pts;
}

}  // namespace lexfun
