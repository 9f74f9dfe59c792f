#include "lexfun/stats.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lexfun/errors.hpp"

namespace lexfun {

nlohmann::json AtomReport::to_json() const {
  nlohmann::json j;
  j["verdict"] = atoms_found ? "AtomsFound" : "NoAtomsDetected";
  j["null_max_mass"] = null_max_mass;
  j["unresolved"] = unresolved;
  j["candidates"] = nlohmann::json::array();
  for (const AtomCandidate& c : candidates) {
    j["candidates"].push_back({{"location", c.location},
                               {"mass_estimate", c.mass_estimate},
                               {"count", c.count},
                               {"window_width", c.window_width}});
  }
  return j;
}

// ---------------------------------------------------------------------------
// Atom detection

namespace {

// P(Bin(n, q) >= c)
double binomial_upper(std::size_t n, double q, std::size_t c) {
  if (c == 0) return 1.0;
  if (c > n) return 0.0;
  if (q >= 1.0) return 1.0;
  return boost::math::ibeta(static_cast<double>(c), static_cast<double>(n - c + 1), q);
}

// Smallest c with P(Bin(n, q) >= c) < level.
std::size_t critical_count(std::size_t n, double q, double level) {
  // binomial_upper is non-increasing in c: bisect for the first c below level
  std::size_t lo = static_cast<std::size_t>(std::floor(static_cast<double>(n) * q));
  std::size_t hi = n + 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (binomial_upper(n, q, mid) >= level) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace

AtomReport detect_atoms(std::vector<double> v, double resolution, double alpha) {
  const std::size_t n = v.size();
  if (n < 100) throw DomainError("atom detection needs at least 100 samples");
  std::sort(v.begin(), v.end());
  auto resolvable = [&](double x) {
    return resolution > 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x));
  };
  if (!resolvable(v[n / 2])) {
    throw DomainError("resolution is below floating-point granularity of the pool");
  }
  const double width = 2.0 * resolution;
  const double level = alpha / static_cast<double>(n);

  struct Window {
    std::size_t begin;
    std::size_t end;  // exclusive
  };
  std::vector<Window> windows(n);
  std::vector<std::size_t> wide_count(n);
  {
    std::size_t hi = 0;
    std::size_t wlo = 0;
    std::size_t whi = 0;
    for (std::size_t i = 0; i < n; ++i) {
      hi = std::max(hi, i);
      while (hi < n && v[hi] <= v[i] + width) ++hi;
      windows[i] = {i, hi};
      const double centre = v[i] + resolution;
      while (wlo < n && v[wlo] < centre - 10.0 * resolution) ++wlo;
      whi = std::max(whi, wlo);
      while (whi < n && v[whi] <= centre + 10.0 * resolution) ++whi;
      wide_count[i] = whi - wlo;
    }
  }

  AtomReport rep;
  std::map<std::size_t, std::size_t> critical_by_neighbours;
  std::vector<std::size_t> count(n);
  std::vector<bool> significant(n);
  for (std::size_t i = 0; i < n; ++i) {
    count[i] = windows[i].end - windows[i].begin;
    const std::size_t neighbours = wide_count[i] - std::min(wide_count[i], count[i]);
    auto it = critical_by_neighbours.find(neighbours);
    if (it == critical_by_neighbours.end()) {
      const double q = std::min(1.0, (static_cast<double>(neighbours) + 1.0) / (9.0 * n));
      it = critical_by_neighbours.emplace(neighbours, critical_count(n, q, level)).first;
    }
    const std::size_t crit = it->second;
    rep.null_max_mass = std::max(rep.null_max_mass, static_cast<double>(crit - 1) / n);
    // far tails where the spacing of doubles exceeds the resolution are not tested
    significant[i] = count[i] >= crit && resolvable(v[i]);
    if (!resolvable(v[i])) ++rep.unresolved;
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    if (significant[i] && static_cast<double>(count[i]) / n > rep.null_max_mass) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });
  std::vector<std::pair<double, double>> taken;
  for (std::size_t i : order) {
    const double lo = v[windows[i].begin];
    const double hi = lo + width;
    const bool overlaps = std::any_of(taken.begin(), taken.end(), [&](const auto& t) {
      return lo <= t.second && t.first <= hi;
    });
    if (overlaps) continue;
    taken.emplace_back(lo, hi);
    const std::size_t mid = windows[i].begin + count[i] / 2;
    rep.candidates.push_back(
        {v[mid], static_cast<double>(count[i]) / n, count[i], width});
  }
  std::sort(rep.candidates.begin(), rep.candidates.end(),
            [](const AtomCandidate& a, const AtomCandidate& b) { return a.location < b.location; });
  rep.atoms_found = !rep.candidates.empty();
  return rep;
}

AtomReport detect_atoms(const SamplePool& pool, double resolution, double alpha) {
  return detect_atoms(pool.values, resolution, alpha);
}

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Theta-function form of the cdf, accurate for small lambda.
    const double pi = std::numbers::pi;
    const double y = -pi * pi / (8.0 * lambda * lambda);
    double s = 0.0;
    for (int k = 1; k <= 50; ++k) {
      const double term = std::exp((2 * k - 1) * (2 * k - 1) * y);
      s += term;
      if (term < 1e-17 * s) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    if (term < 1e-17) break;
    sign = -sign;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

namespace {

double stephens_p(double d, double n_eff) {
  const double rn = std::sqrt(n_eff);
  return kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d);
}

}  // namespace

KsResult ks_test(std::vector<double> v, const std::function<double(double)>& cdf) {
  const std::size_t n = v.size();
  if (n < 10) throw DomainError("KS test needs at least 10 samples");
  std::sort(v.begin(), v.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return {d, stephens_p(d, static_cast<double>(n)), n};
}

KsResult ks_test(const SamplePool& pool, const std::function<double(double)>& cdf) {
  return ks_test(pool.values, cdf);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.size() < 10 || b.size() < 10) throw DomainError("KS test needs at least 10 samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {d, stephens_p(d, na * nb / (na + nb)), a.size() + b.size()};
}

// ---------------------------------------------------------------------------
// Fixed-point test

FixedPointResult fixed_point_test(const LevyTriplet2D& triplet, double t, std::size_t n,
                                  std::uint64_t seed, const HorizonPolicy& policy,
                                  Execution exec) {
  if (!(t >= 0.0)) throw DomainError("fixed-point time must be non-negative");
  const PathModel model = exponential_model(triplet, policy);
  FixedPointResult res;
  res.pool_a = sample_exponential_functional(model, n, policy, seed, exec).values;

  res.pool_b.assign(n, 0.0);
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(n);
  auto one = [&](std::int64_t i) {
    const RngStream base{seed, static_cast<std::uint64_t>(i)};
    const auto [it, xit] = exponential_up_to(model, t, base.derived(2));
    const double fresh = sample_one_exponential(model, policy, base.derived(3)).value;
    res.pool_b[static_cast<std::size_t>(i)] = it + std::exp(-xit) * fresh;
  };
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        one(i);
      } catch (...) {
#pragma omp critical(lexfun_fixed_point_error)
        if (!error) error = std::current_exception();
      }
    }
  } else {
    for (std::int64_t i = 0; i < count; ++i) one(i);
  }
  if (error) std::rethrow_exception(error);
  std::sort(res.pool_b.begin(), res.pool_b.end());

  auto spread = [](const std::vector<double>& v) { return v.back() - v.front(); };
  if (n > 0) {
    const double scale = 1.0 + std::abs(res.pool_a.front());
    const double tol = 1e3 * policy.tail_tolerance * scale;
    if (spread(res.pool_a) <= tol && spread(res.pool_b) <= tol &&
        std::abs(res.pool_a.front() - res.pool_b.front()) <= tol) {
      res.degenerate = true;
      res.p_value = 1.0;
      res.statistic = 0.0;
      return res;
    }
  }
  const KsResult ks = ks_two_sample(res.pool_a, res.pool_b);
  res.p_value = ks.p_value;
  res.statistic = ks.statistic;
  return res;
}

// ---------------------------------------------------------------------------
// Oracles

namespace oracle {

std::function<double(double)> dufresne(double sigma2, double mu) {
  if (!(sigma2 > 0.0) || !(mu > 0.0)) throw DomainError("dufresne oracle needs sigma2, mu > 0");
  const double shape = 2.0 * mu / sigma2;
  return [shape, sigma2](double x) {
    if (x <= 0.0) return 0.0;
    return boost::math::gamma_q(shape, 2.0 / (sigma2 * x));
  };
}

std::function<double(double)> truncated_exponential(double rate, double upper) {
  const double norm = -std::expm1(-rate * upper);
  return [rate, upper, norm](double x) {
    if (x <= 0.0) return 0.0;
    if (x >= upper) return 1.0;
    return -std::expm1(-rate * x) / norm;
  };
}

std::function<double(double)> uniform(double a, double b) {
  return [a, b](double x) { return std::clamp((x - a) / (b - a), 0.0, 1.0); };
}

std::function<double(double)> normal(double mean, double sd) {
  return [mean, sd](double x) { return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2)); };
}

std::function<double(double)> exponential(double rate) {
  return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

}  // namespace oracle

void write_histogram_csv(std::ostream& os, const std::vector<double>& values, std::size_t bins) {
  os << "bin_lo,bin_hi,count,density\n";
  if (values.empty() || bins == 0) return;
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  const double lo = *mn;
  const double hi = *mx > *mn ? *mx : *mn + 1.0;
  const double w = (hi - lo) / static_cast<double>(bins);
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / w);
    counts[std::min(b, bins - 1)] += 1;
  }
  const double n = static_cast<double>(values.size());
  for (std::size_t b = 0; b < bins; ++b) {
    os << lo + b * w << ',' << lo + (b + 1) * w << ',' << counts[b] << ','
       << static_cast<double>(counts[b]) / (n * w) << '\n';
  }
}

}  // namespace lexfun
