#pragma once

#include <cmath>
#include <random>
#include <utility>

#include "lexfun/levy_core.hpp"
#include "lexfun/measures.hpp"

namespace lexfun::testing {

// Random eta triplet with every jump satisfying y / k < 1, plus k itself.
inline std::pair<LevyTriplet1D, double> random_admissible_eta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double sign = u(rng) < 0.5 ? -1.0 : 1.0;
  const double k = sign * (0.1 + 4.9 * u(rng));
  // jumps must stay strictly on the near side of k
  const double lim = std::abs(k);
  const double sigma2 = u(rng) < 0.6 ? 2.0 * u(rng) : 0.0;
  LevyMeasure1D m;
  if (u(rng) < 0.7) {
    const double hi = lim * (0.2 + 0.7 * u(rng));
    const double lo = hi * 0.3 * u(rng);
    m = m + (sign > 0 ? measures::uniform_jumps(lo, hi, 0.5 + u(rng))
                      : measures::uniform_jumps(-hi, -lo, 0.5 + u(rng)));
  }
  if (u(rng) < 0.5) m = m + measures::point(sign * lim * (0.05 + 0.9 * u(rng)), 0.2 + u(rng));
  if (u(rng) < 0.5) m = m + measures::exponential_jumps(0.5 + 2.0 * u(rng), 0.3 + u(rng), -sign > 0 ? 1 : -1);
  if (u(rng) < 0.3) m = m + measures::stable_tail(0.3 + 1.4 * u(rng), 0.2 + 0.5 * u(rng), -sign > 0 ? 1 : -1);
  const double gamma = 2.0 * u(rng) - 1.0;
  if (sigma2 == 0.0 && m.empty()) return {LevyTriplet1D(gamma + 0.5, 1.0, m), k};
  return {LevyTriplet1D(gamma, sigma2, m), k};
}

}  // namespace lexfun::testing
