#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "lexfun/quadrature.hpp"

namespace lexfun {

struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Absolutely continuous piece of a Levy measure on an open interval that
/// lies on one side of the origin. `mass` and `outer_mass_inverse` are
/// optional closed forms; without them everything falls back to quadrature
/// of `density`.
struct DensitySegment {
  double lo = 0.0;
  double hi = 0.0;
  RealFn density;
  /// Exact mass of (a, b), where lo <= a < b <= hi. May return +inf.
  std::function<double(double, double)> mass;
  /// Point x whose "outer" mass (the part of the segment farther from 0
  /// than x) equals m.
  RealFn outer_mass_inverse;
  std::string label;

  bool positive_side() const { return lo >= 0.0; }
};

/// Countable atom family n = 1, 2, ... with locations given through
/// log|x_n| so that very heavy tails stay representable.
struct AtomSeries {
  int sign = 1;
  std::function<double(std::size_t)> log_abs_location;
  std::function<double(std::size_t)> mass;
  std::string label;
};

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double x) const;
};

/// Finite union of disjoint intervals.
class Region {
 public:
  Region() = default;
  explicit Region(std::vector<Interval> pieces);

  static Region whole_line();
  static Region above(double z);        // (z, inf)
  static Region below(double z);        // (-inf, z)
  static Region abs_greater(double r);  // |x| > r
  static Region abs_at_most(double r);  // |x| <= r, origin excluded implicitly
  static Region between(double a, double b, bool a_closed = false, bool b_closed = false);

  const std::vector<Interval>& intervals() const { return pieces_; }
  bool contains(double x) const;

 private:
  std::vector<Interval> pieces_;
};

/// Test function for integration against a measure. `at_log(sign, log|x|)`
/// is consulted for atoms whose location overflows a double.
struct Integrand {
  RealFn at;
  std::function<double(int, double)> at_log;

  template <class F>
    requires std::invocable<const F&, double>
  Integrand(F f) : at(std::move(f)) {}  // NOLINT(google-explicit-constructor)
  Integrand(RealFn f, std::function<double(int, double)> f_log)
      : at(std::move(f)), at_log(std::move(f_log)) {}
};

/// Strictly monotone bijection with forward(0) = 0, used for image measures.
struct MonotoneMap {
  RealFn forward;
  RealFn inverse;
  RealFn inverse_derivative;
  std::string label;
};

enum class Activity { Finite, Infinite };
enum class Variation { FiniteVariation, InfiniteVariation };

/// One-dimensional Levy measure: atoms + density segments + atom series.
/// Immutable; the activity and small-jump-variation flags are derived once
/// at construction.
class LevyMeasure1D {
 public:
  LevyMeasure1D();
  explicit LevyMeasure1D(std::vector<Atom> atoms, std::vector<DensitySegment> segments = {},
                         std::vector<AtomSeries> series = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensitySegment>& segments() const { return segments_; }
  const std::vector<AtomSeries>& series() const { return series_; }
  bool empty() const { return atoms_.empty() && segments_.empty() && series_.empty(); }

  /// Pi((z, inf)) for z > 0.
  double tail_plus(double z) const;
  /// Pi((-inf, -z)) for z > 0.
  double tail_minus(double z) const;
  double mass(const Region& region) const;
  double integrate(const Integrand& f, const Region& region,
                   const QuadratureOptions& opts = {}) const;

  Activity activity() const { return activity_; }
  Variation small_jump_variation() const { return variation_; }
  /// Total mass; +inf for infinite activity.
  double total_mass() const { return total_mass_; }
  bool has_positive_part() const;
  bool has_negative_part() const;
  /// sup of the positive support (0 if none, may be inf).
  double positive_support_sup() const;
  /// inf of the negative support (0 if none, may be -inf).
  double negative_support_inf() const;

  LevyMeasure1D image(const MonotoneMap& map) const;
  LevyMeasure1D operator+(const LevyMeasure1D& other) const;

  /// Representative support points: atom locations and interior points of
  /// every density segment.
  std::vector<double> probe_points(std::size_t per_segment = 9) const;

 private:
  void validate_and_classify();

  std::vector<Atom> atoms_;
  std::vector<DensitySegment> segments_;
  std::vector<AtomSeries> series_;
  Activity activity_ = Activity::Finite;
  Variation variation_ = Variation::FiniteVariation;
  double total_mass_ = 0.0;
};

/// Free-function form of `LevyMeasure1D::integrate`.
double integrate_against(const LevyMeasure1D& measure, const Integrand& f, const Region& region,
                         const QuadratureOptions& opts = {});

}  // namespace lexfun
