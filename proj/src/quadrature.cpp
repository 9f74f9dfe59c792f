#include "lexfun/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "lexfun/errors.hpp"

namespace lexfun {

double integrate_finite(const RealFn& f, double a, double b, const QuadratureOptions& opts) {
  if (!(a < b)) return 0.0;
  double err = 0.0;
  double l1 = 0.0;
  // Boost's error estimate degrades on very short intervals; work on [0, 1].
  const double w = b - a;
  auto g = [&](double t) { return w * f(t < 1.0 ? a + w * t : b); };
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      g, 0.0, 1.0, 15, std::min(opts.rel_tol, 1e-10), &err, &l1);
  if (std::isnan(value)) {
    std::ostringstream os;
    os << "interval=(" << a << "," << b << ")";
    throw NumericError("quadrature produced NaN", os.str());
  }
  // Accept a moderately loose estimate; only flag clear non-convergence.
  const double accept = 1e4 * std::max(opts.abs_tol, opts.rel_tol * l1);
  if (std::isfinite(value) && err > accept) {
    std::ostringstream os;
    os << "interval=(" << a << "," << b << ") value=" << value << " error=" << err;
    throw NumericError("adaptive quadrature did not converge", os.str());
  }
  return value;
}

namespace {

enum class SweepDirection { TowardZero, TowardInfinity };

// Sums window contributions until they settle; detects divergence by
// threshold or by monotone growth of the final contributions.
double sweep(const RealFn& f, double anchor, double bound, SweepDirection dir,
             const QuadratureOptions& opts) {
  double sum = 0.0;
  int small_run = 0;
  std::vector<double> recent;
  recent.reserve(static_cast<std::size_t>(opts.max_windows));
  for (int m = 0; m < opts.max_windows; ++m) {
    double a = 0.0;
    double b = 0.0;
    if (dir == SweepDirection::TowardZero) {
      b = std::ldexp(anchor, -m);
      a = std::ldexp(anchor, -m - 1);
      if (a <= bound) a = bound;
    } else {
      a = std::ldexp(anchor, m);
      b = std::ldexp(anchor, m + 1);
      if (b >= bound) b = bound;
    }
    if (!(a < b) || !std::isfinite(a) || !std::isfinite(b) || a == 0.0) {
      return sum;
    }
    const double c = integrate_finite(f, a, b, opts);
    if (!std::isfinite(c)) return c;
    sum += c;
    recent.push_back(std::abs(c));
    if (std::abs(sum) > opts.divergence_threshold) {
      return sum > 0 ? kInf : -kInf;
    }
    if (std::abs(c) <= std::max(opts.abs_tol, opts.rel_tol * std::abs(sum))) {
      if (++small_run >= 3) return sum;
    } else {
      small_run = 0;
    }
    const bool reached_bound = (dir == SweepDirection::TowardZero) ? (a == bound) : (b == bound);
    if (reached_bound) return sum;
  }
  constexpr std::size_t kTrend = 8;
  if (recent.size() >= kTrend &&
      std::is_sorted(recent.end() - kTrend, recent.end()) && recent.back() > 0.0) {
    return sum > 0 ? kInf : -kInf;
  }
  std::ostringstream os;
  os << "windows=" << opts.max_windows << " partial=" << sum
     << " last=" << (recent.empty() ? 0.0 : recent.back());
  throw NumericError("truncation sweep neither settled nor diverged", os.str());
}

}  // namespace

double integrate_positive_half_line(const RealFn& f, double lo, double hi,
                                    const QuadratureOptions& opts) {
  if (!(lo < hi)) return 0.0;
  if (lo < 0.0) throw DomainError("integrate_positive_half_line: lo must be >= 0");
  double total = 0.0;
  double core_lo = lo;
  double core_hi = hi;
  if (lo == 0.0) {
    const double anchor = std::min(hi, 1.0);
    total += sweep(f, anchor, 0.0, SweepDirection::TowardZero, opts);
    core_lo = anchor;
  }
  if (std::isinf(hi)) {
    const double anchor = std::max(core_lo, 1.0);
    const double outer = sweep(f, anchor, kInf, SweepDirection::TowardInfinity, opts);
    if (std::isinf(outer) || std::isinf(total)) return total + outer;
    total += outer;
    core_hi = anchor;
  }
  if (std::isinf(total)) return total;
  if (core_lo < core_hi) total += integrate_finite(f, core_lo, core_hi, opts);
  return total;
}

double bisect(const RealFn& f, double lo, double hi, int max_iter) {
  double flo = f(lo);
  const double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) {
    std::ostringstream os;
    os << "f(" << lo << ")=" << flo << " f(" << hi << ")=" << fhi;
    throw NumericError("bisection bracket does not change sign", os.str());
  }
  for (int i = 0; i < max_iter; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double gauss_legendre16(const RealFn& f, double a, double b) {
  static constexpr std::array<double, 8> kNodes = {
      0.0950125098376374401853193, 0.2816035507792589132304605, 0.4580167776572273863424194,
      0.6178762444026437484466718, 0.7554044083550030338951012, 0.8656312023878317438804679,
      0.9445750230732325760779884, 0.9894009349916499325961542};
  static constexpr std::array<double, 8> kWeights = {
      0.1894506104550684962853967, 0.1826034150449235888667637, 0.1691565193950025381893121,
      0.1495959888165767320815017, 0.1246289712555338720524763, 0.0951585116824927848099251,
      0.0622535239386478928628438, 0.0271524594117540948517806};
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kNodes.size(); ++i) {
    s += kWeights[i] * (f(mid - half * kNodes[i]) + f(mid + half * kNodes[i]));
  }
  return s * half;
}

}  // namespace lexfun
