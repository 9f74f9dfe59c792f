#pragma once

#include "lexfun/exfun.hpp"

// Named integrands with their provable properties already declared.
namespace lexfun::gfun {

/// 1_{[a, b]}.
GDescriptor indicator(double a, double b);
/// Smooth bump exp(-1 / (1 - u^2)), u = (x - centre) / radius, on (centre - radius, centre + radius).
GDescriptor bump(double centre, double radius);
/// (x - a) / (b - a) on [a, b], 0 elsewhere; jumps down at b.
GDescriptor ramp(double a, double b);
/// exp(-x^2 / (2 s^2)).
GDescriptor gaussian(double s);
GDescriptor constant(double c);
GDescriptor zero();

}  // namespace lexfun::gfun
