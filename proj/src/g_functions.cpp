#include "lexfun/g_functions.hpp"

#include <cmath>
#include <sstream>

#include "lexfun/errors.hpp"

namespace lexfun::gfun {

namespace {

std::string label(const char* name, double a, double b) {
  std::ostringstream os;
  os << name << '[' << a << ',' << b << ']';
  return os.str();
}

// Flags shared by positive functions on a compact [a, b] with finite boundary.
void compact_positive(GDescriptor& g, double a, double b) {
  g.nonneg = true;
  g.compact_support = {a, b};
  g.positive_on_interior = true;
  g.boundary_finite = true;
  g.boundary_countable = true;
  g.support_interior_contains_0 = a < 0.0 && 0.0 < b;
  g.breakpoints = {a, b};
}

}  // namespace

GDescriptor indicator(double a, double b) {
  if (!(a < b)) throw DomainError("indicator needs a < b");
  GDescriptor g;
  g.name = label("indicator", a, b);
  g.eval = [a, b](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; };
  compact_positive(g, a, b);
  g.g0_nonzero = a <= 0.0 && 0.0 <= b;
  g.positive_near_0 = a < 0.0 && 0.0 < b;
  g.countable_discontinuities = true;
  g.indicator_of = {a, b};
  return g;
}

GDescriptor bump(double centre, double radius) {
  if (!(radius > 0.0)) throw DomainError("bump radius must be positive");
  const double a = centre - radius;
  const double b = centre + radius;
  GDescriptor g;
  g.name = label("bump", a, b);
  g.eval = [centre, radius](double x) {
    const double u = (x - centre) / radius;
    return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
  };
  compact_positive(g, a, b);
  g.g0_nonzero = a < 0.0 && 0.0 < b;
  g.positive_near_0 = g.g0_nonzero;
  g.countable_discontinuities = true;
  if (g.g0_nonzero && centre != 0.0) {
    // monotone between 0 and the centre, and out to the nearer support edge
    const double d = centre > 0.0 ? std::min(centre, -a) : std::min(-centre, b);
    g.strictly_monotone_near_0 = true;
    g.level_set_nondegenerate_near_0 = 0.5 * d;
  }
  return g;
}

GDescriptor ramp(double a, double b) {
  if (!(a < b)) throw DomainError("ramp needs a < b");
  GDescriptor g;
  g.name = label("ramp", a, b);
  g.eval = [a, b](double x) { return (x > a && x <= b) ? (x - a) / (b - a) : 0.0; };
  compact_positive(g, a, b);
  g.g0_nonzero = a < 0.0 && 0.0 <= b;
  g.positive_near_0 = a < 0.0 && 0.0 < b;
  g.countable_discontinuities = true;
  if (g.positive_near_0) {
    g.strictly_monotone_near_0 = true;
    g.level_set_nondegenerate_near_0 = 0.5 * std::min(-a, b);
  }
  return g;
}

GDescriptor gaussian(double s) {
  if (!(s > 0.0)) throw DomainError("gaussian width must be positive");
  GDescriptor g;
  g.name = "gaussian(" + std::to_string(s) + ")";
  g.eval = [s](double x) { return std::exp(-0.5 * x * x / (s * s)); };
  g.nonneg = true;
  g.g0_nonzero = true;
  g.positive_near_0 = true;
  g.countable_discontinuities = true;
  // g(t) = g(t + z) only at t = -z/2.
  g.level_set_nondegenerate_near_0 = s;
  g.negligible_outside = std::pair{-12.0 * s, 12.0 * s};
  return g;
}

GDescriptor constant(double c) {
  GDescriptor g;
  g.name = "constant(" + std::to_string(c) + ")";
  g.eval = [c](double) { return c; };
  g.nonneg = c >= 0.0;
  g.g0_nonzero = c != 0.0;
  g.positive_near_0 = c > 0.0;
  g.countable_discontinuities = true;
  return g;
}

GDescriptor zero() {
  GDescriptor g = constant(0.0);
  g.name = "zero";
  return g;
}

}  // namespace lexfun::gfun
