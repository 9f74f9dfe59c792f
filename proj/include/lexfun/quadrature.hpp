#pragma once

#include <functional>
#include <limits>

namespace lexfun {

/// Tolerances shared by every quadrature in the library.
struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  /// Partial sums beyond this magnitude are reported as divergent (+/-inf).
  double divergence_threshold = 1e12;
  /// Cap on dyadic windows per sweep direction (towards 0 or towards infinity).
  int max_windows = 1100;
  /// Cap on terms of a countable atom family.
  std::size_t max_series_terms = std::size_t{1} << 20;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using RealFn = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on a finite interval.
double integrate_finite(const RealFn& f, double a, double b, const QuadratureOptions& opts = {});

/// Integral of f over (lo, hi) with 0 <= lo < hi <= inf. An endpoint at 0 or
/// at infinity is handled by a geometric truncation sweep over windows
/// (s 2^{-m-1}, s 2^{-m}] resp. (s 2^m, s 2^{m+1}]. Returns +/-inf when the
/// sweep exhibits monotone growth; throws NumericError when it neither
/// settles nor grows.
double integrate_positive_half_line(const RealFn& f, double lo, double hi,
                                    const QuadratureOptions& opts = {});

/// Root of a monotone function on [lo, hi] by bisection; f(lo) and f(hi) must
/// bracket zero.
double bisect(const RealFn& f, double lo, double hi, int max_iter = 400);

/// Fixed 16-point Gauss-Legendre rule; cheap inner rule for short pieces.
double gauss_legendre16(const RealFn& f, double a, double b);

}  // namespace lexfun
