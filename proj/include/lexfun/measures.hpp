#pragma once

#include <vector>

#include "lexfun/levy_measure.hpp"

// Ready-made Levy measure pieces with closed-form masses and inverse tails.
namespace lexfun::measures {

/// Single jump size: atom of mass `rate` at `size`.
LevyMeasure1D point(double size, double rate);

/// Compound Poisson with uniform jumps on (a, b), 0 not inside (a, b).
LevyMeasure1D uniform_jumps(double a, double b, double rate);

/// Compound Poisson with Exp(theta) jump sizes, signed by `sign`.
LevyMeasure1D exponential_jumps(double theta, double rate, int sign = 1);

/// Density c |x|^{-1-alpha} on (lo, hi) (sign +1) or (-hi, -lo) (sign -1).
DensitySegment power_segment(double c, double alpha, double lo, double hi, int sign = 1);

/// c x^{-1-alpha} on (0, inf): the jump measure of an alpha-stable subordinator.
LevyMeasure1D stable_tail(double alpha, double c = 1.0, int sign = 1);

/// Piecewise-linear density through (x_i, f_i); all x_i on one side of 0.
LevyMeasure1D tabulated(const std::vector<double>& x, const std::vector<double>& f);

}  // namespace lexfun::measures
