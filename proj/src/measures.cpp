#include "lexfun/measures.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "lexfun/errors.hpp"

namespace lexfun::measures {

LevyMeasure1D point(double size, double rate) { return LevyMeasure1D({{size, rate}}); }

LevyMeasure1D uniform_jumps(double a, double b, double rate) {
  if (!(a < b) || (a < 0.0 && b > 0.0)) {
    throw DomainError("uniform jumps need a < b on one side of 0");
  }
  if (!(rate > 0.0)) throw DomainError("jump rate must be positive");
  const double dens = rate / (b - a);
  DensitySegment s;
  s.lo = a;
  s.hi = b;
  s.label = "uniform";
  s.density = [dens](double) { return dens; };
  s.mass = [dens](double x, double y) { return dens * (y - x); };
  if (a >= 0.0) {
    s.outer_mass_inverse = [b, dens](double m) { return b - m / dens; };
  } else {
    s.outer_mass_inverse = [a, dens](double m) { return a + m / dens; };
  }
  return LevyMeasure1D({}, {s});
}

LevyMeasure1D exponential_jumps(double theta, double rate, int sign) {
  if (!(theta > 0.0) || !(rate > 0.0)) throw DomainError("exponential jumps need theta, rate > 0");
  DensitySegment s;
  s.label = "exponential";
  const double sg = sign > 0 ? 1.0 : -1.0;
  s.lo = sg > 0 ? 0.0 : -kInf;
  s.hi = sg > 0 ? kInf : 0.0;
  s.density = [=](double x) { return rate * theta * std::exp(-theta * std::abs(x)); };
  s.mass = [=](double x, double y) {
    const double a = std::min(std::abs(x), std::abs(y));
    const double b = std::max(std::abs(x), std::abs(y));
    return rate * (std::exp(-theta * a) - std::exp(-theta * b));
  };
  s.outer_mass_inverse = [=](double m) { return sg * (-std::log(m / rate) / theta); };
  return LevyMeasure1D({}, {s});
}

DensitySegment power_segment(double c, double alpha, double lo, double hi, int sign) {
  if (!(c > 0.0) || !(lo >= 0.0) || !(lo < hi)) throw DomainError("bad power segment");
  if (alpha >= 0.0 && lo == 0.0 && alpha >= 2.0) {
    throw DomainError("power density with alpha >= 2 is not a Levy measure near 0");
  }
  if (alpha <= 0.0 && std::isinf(hi)) {
    throw DomainError("power density with alpha <= 0 has infinite mass at infinity");
  }
  const double sg = sign > 0 ? 1.0 : -1.0;
  DensitySegment s;
  s.label = "power";
  s.lo = sg > 0 ? lo : -hi;
  s.hi = sg > 0 ? hi : -lo;
  // Mass of |x| in (a, b).
  auto abs_mass = [=](double a, double b) {
    if (alpha == 0.0) return c * std::log(b / a);
    const double pa = a == 0.0 ? (alpha > 0.0 ? kInf : 0.0) : std::pow(a, -alpha);
    const double pb = std::isinf(b) ? 0.0 : std::pow(b, -alpha);
    return c / alpha * (pa - pb);
  };
  s.density = [=](double x) { return c * std::pow(std::abs(x), -1.0 - alpha); };
  s.mass = [=](double x, double y) {
    const double a = std::min(std::abs(x), std::abs(y));
    const double b = std::max(std::abs(x), std::abs(y));
    return abs_mass(a, b);
  };
  s.outer_mass_inverse = [=](double m) {
    if (alpha == 0.0) return sg * hi * std::exp(-m / c);
    const double phi = std::isinf(hi) ? 0.0 : std::pow(hi, -alpha);
    return sg * std::pow(alpha * m / c + phi, -1.0 / alpha);
  };
  return s;
}

LevyMeasure1D stable_tail(double alpha, double c, int sign) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw DomainError("stable index must lie in (0, 2)");
  return LevyMeasure1D({}, {power_segment(c, alpha, 0.0, kInf, sign)});
}

LevyMeasure1D tabulated(const std::vector<double>& x, const std::vector<double>& f) {
  if (x.size() != f.size() || x.size() < 2) throw DomainError("tabulated density needs >= 2 points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DomainError("tabulated abscissae must increase");
  }
  for (double v : f) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError("tabulated density must be >= 0");
  }
  if (x.front() < 0.0 && x.back() > 0.0) throw DomainError("tabulated density straddles 0");
  auto xs = std::make_shared<const std::vector<double>>(x);
  auto fs = std::make_shared<const std::vector<double>>(f);
  auto eval = [xs, fs](double t) {
    const auto& X = *xs;
    const auto& F = *fs;
    if (t < X.front() || t > X.back()) return 0.0;
    if (t == X.back()) return F.back();
    const std::size_t j = static_cast<std::size_t>(std::upper_bound(X.begin(), X.end(), t) - X.begin());
    const double w = (t - X[j - 1]) / (X[j] - X[j - 1]);
    return F[j - 1] + w * (F[j] - F[j - 1]);
  };
  // Exact integral of the linear interpolant over (a, b).
  auto mass = [xs, eval](double a, double b) {
    const auto& X = *xs;
    a = std::max(a, X.front());
    b = std::min(b, X.back());
    if (!(a < b)) return 0.0;
    double total = 0.0;
    double left = a;
    auto it = std::upper_bound(X.begin(), X.end(), a);
    while (left < b) {
      const double right = (it == X.end()) ? b : std::min(*it, b);
      total += 0.5 * (right - left) * (eval(left) + eval(right));
      left = right;
      if (it != X.end()) ++it;
    }
    return total;
  };
  DensitySegment s;
  s.lo = x.front();
  s.hi = x.back();
  s.label = "tabulated";
  s.density = eval;
  s.mass = mass;
  return LevyMeasure1D({}, {s});
}

}  // namespace lexfun::measures
