#include "lexfun/exfun.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lexfun/errors.hpp"

namespace lexfun {

GDescriptor GDescriptor::scaled(double c) const {
  GDescriptor out = *this;
  out.name = std::to_string(c) + "*" + name;
  out.eval = [f = eval, c](double x) { return c * f(x); };
  return out;
}

YProcessSpec YProcessSpec::identity() { return {}; }

YProcessSpec YProcessSpec::make_subordinator(LevyTriplet1D triplet) {
  if (triplet.sigma2() != 0.0 || triplet.measure().has_negative_part() ||
      !triplet.drift_bv() || *triplet.drift_bv() < 0.0) {
    throw DomainError("subordinator Y needs no Gaussian part, no negative jumps, drift >= 0");
  }
  YProcessSpec y;
  y.kind = Kind::Subordinator;
  y.strictly_increasing = *triplet.drift_bv() > 0.0 ||
                          triplet.measure().activity() == Activity::Infinite;
  y.ac_density_nonvanishing = false;
  y.subordinator = std::move(triplet);
  y.label = "subordinator";
  return y;
}

YProcessSpec YProcessSpec::deterministic(RealFn rate, std::string label) {
  YProcessSpec y;
  y.kind = Kind::DeterministicIncreasing;
  y.rate = std::move(rate);
  y.label = std::move(label);
  return y;
}

// ---------------------------------------------------------------------------
// Exponential functional

namespace {

// (1 - e^{-u}) / u
double phi(double u) { return std::abs(u) < 1e-8 ? 1.0 - 0.5 * u : -std::expm1(-u) / u; }

constexpr double kMaxExponent = 700.0;

}  // namespace

double exponential_step_contribution(const PathStep& s, const PathModel& model) {
  const double w = std::exp(-s.xi0);
  double c = model.b2 * s.h() * phi(s.dxi_c) * w;
  if (s.g2 != 0.0) {
    double gauss = s.g2;
    if (model.cov.s11 > 0.0) {
      gauss -= 0.5 * (model.cov.s12 / model.cov.s11) * (s.g1 * s.g1 - model.cov.s11 * s.h());
    }
    c += w * gauss;
  }
  if (s.jump && s.jy != 0.0) c += std::exp(-s.xi_left()) * s.jy;
  return c;
}

double integrate_exponential(const PathGrid& path) {
  if (!path.has_eta()) throw DomainError("integrate_exponential needs a bivariate path");
  PathModel model;
  model.b1 = path.meta.drift_xi;
  model.b2 = path.meta.drift_eta;
  model.cov = path.meta.cov;
  double total = 0.0;
  double min_xi = 0.0;
  double t_prev = 0.0;
  double xi_prev = 0.0;
  double eta_prev = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    PathStep s;
    s.t0 = t_prev;
    s.t1 = path.times[i];
    s.xi0 = xi_prev;
    s.eta0 = eta_prev;
    s.dxi_c = path.xi_left[i] - xi_prev;
    s.deta_c = path.eta_left[i] - eta_prev;
    s.g1 = s.dxi_c - model.b1 * s.h();
    s.g2 = model.cov.s22 > 0.0 ? s.deta_c - model.b2 * s.h() : 0.0;
    if (path.marks[i]) {
      s.jump = true;
      s.jx = path.marks[i]->dxi;
      s.jy = path.marks[i]->deta;
    }
    min_xi = std::min({min_xi, s.xi0, s.xi_left()});
    if (-min_xi > kMaxExponent) {
      throw NumericError("e^{-xi} overflows", "excursion minimum xi=" + std::to_string(min_xi));
    }
    total += exponential_step_contribution(s, model);
    t_prev = s.t1;
    xi_prev = path.xi[i];
    eta_prev = path.eta[i];
  }
  return total;
}

PathModel exponential_model(const LevyTriplet2D& triplet, const HorizonPolicy& policy) {
  const bool gauss = triplet.sigma().s11 > 0.0 || triplet.sigma().s22 > 0.0 || policy.gaussian_proxy;
  SimulationOptions opts;
  opts.max_step = gauss ? policy.max_step : kInf;
  opts.gaussian_proxy = policy.gaussian_proxy;
  return PathModel::bivariate(triplet, policy.epsilon, opts);
}

SampleResult sample_one_exponential(const PathModel& model, const HorizonPolicy& policy,
                                    const RngStream& rng) {
  PathStepper st(model, rng);
  const double log_stop = -std::log(policy.tail_tolerance);
  SampleResult r;
  double min_xi = 0.0;
  while (true) {
    if (st.time() >= policy.min_horizon && st.xi() > log_stop) break;
    if (st.time() >= policy.max_horizon) {
      r.partial = true;
      break;
    }
    const double t_stop =
        std::min(policy.max_horizon, std::max(policy.min_horizon, st.time() + 1.0));
    const PathStep s = st.advance(t_stop);
    min_xi = std::min(min_xi, s.xi_left());
    if (-min_xi > kMaxExponent) {
      throw NumericError("e^{-xi} overflows", "excursion minimum xi=" + std::to_string(min_xi));
    }
    r.value += exponential_step_contribution(s, model);
  }
  r.truncation_time = st.time();
  return r;
}

std::pair<double, double> exponential_up_to(const PathModel& model, double t,
                                            const RngStream& rng) {
  PathStepper st(model, rng);
  double value = 0.0;
  while (st.time() < t) {
    const PathStep s = st.advance(t);
    if (s.xi_left() < -kMaxExponent) {
      throw NumericError("e^{-xi} overflows", "xi=" + std::to_string(s.xi_left()));
    }
    value += exponential_step_contribution(s, model);
  }
  return {value, st.xi()};
}

namespace {

template <class SampleFn>
SamplePool run_pool(std::size_t n, Execution exec, SampleFn&& sample) {
  std::vector<SampleResult> results(n);
  std::exception_ptr error;
  const auto count = static_cast<std::int64_t>(n);
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
    for (std::int64_t i = 0; i < count; ++i) {
      try {
        results[static_cast<std::size_t>(i)] = sample(static_cast<std::uint64_t>(i));
      } catch (...) {
#pragma omp critical(lexfun_pool_error)
        if (!error) error = std::current_exception();
      }
    }
  } else {
    for (std::int64_t i = 0; i < count; ++i) {
      results[static_cast<std::size_t>(i)] = sample(static_cast<std::uint64_t>(i));
    }
  }
  if (error) std::rethrow_exception(error);
  SamplePool pool;
  pool.values.reserve(n);
  pool.truncation_times.reserve(n);
  for (const SampleResult& r : results) {
    pool.values.push_back(r.value);
    pool.truncation_times.push_back(r.truncation_time);
    pool.partial_count += r.partial ? 1 : 0;
    pool.heuristic_stops += r.heuristic_stop ? 1 : 0;
  }
  std::sort(pool.values.begin(), pool.values.end());
  std::sort(pool.truncation_times.begin(), pool.truncation_times.end());
  return pool;
}

}  // namespace

SamplePool sample_exponential_functional(const PathModel& model, std::size_t n,
                                         const HorizonPolicy& policy, std::uint64_t seed,
                                         Execution exec) {
  SamplePool pool = run_pool(n, exec, [&](std::uint64_t i) {
    return sample_one_exponential(model, policy, RngStream{seed, i});
  });
  pool.seed = seed;
  pool.policy = policy;
  pool.functional = "exponential";
  return pool;
}

SamplePool sample_exponential_functional(const LevyTriplet2D& triplet, std::size_t n,
                                         const HorizonPolicy& policy, std::uint64_t seed,
                                         Execution exec) {
  return sample_exponential_functional(exponential_model(triplet, policy), n, policy, seed, exec);
}

// ---------------------------------------------------------------------------
// g-integrals

namespace {

double integrate_piece(const RealFn& f, double a, double b) {
  if (!(a < b)) return 0.0;
  if (b - a <= 0.25) return gauss_legendre16(f, a, b);
  return integrate_finite(f, a, b);
}

// int over [t0, t0 + h] of g(x(s)) with x linear from x0 to x1.
double g_time_integral(const GDescriptor& g, double h, double x0, double x1) {
  if (!(h > 0.0)) return 0.0;
  if (x0 == x1) return g.eval(x0) * h;
  const double lo = std::min(x0, x1);
  const double hi = std::max(x0, x1);
  double total = 0.0;
  double a = lo;
  for (double bp : g.breakpoints) {
    if (bp <= a || bp >= hi) continue;
    total += integrate_piece(g.eval, a, bp);
    a = bp;
  }
  total += integrate_piece(g.eval, a, hi);
  return total * h / (hi - lo);
}

// int over [t0, t1] of g(x(s)) rho(s) ds with x linear.
double g_rate_integral(const GDescriptor& g, const RealFn& rho, double t0, double t1, double x0,
                       double x1) {
  const double h = t1 - t0;
  if (!(h > 0.0)) return 0.0;
  auto x_at = [&](double s) { return x0 + (x1 - x0) * (s - t0) / h; };
  RealFn f = [&](double s) { return g.eval(x_at(s)) * rho(s); };
  std::vector<double> cuts;
  if (x0 != x1) {
    for (double bp : g.breakpoints) {
      const double s = t0 + (bp - x0) / (x1 - x0) * h;
      if (s > t0 && s < t1) cuts.push_back(s);
    }
    std::sort(cuts.begin(), cuts.end());
  }
  double total = 0.0;
  double a = t0;
  for (double c : cuts) {
    total += integrate_piece(f, a, c);
    a = c;
  }
  total += integrate_piece(f, a, t1);
  return total;
}

// Accumulates int g(xi) dY over successive linear pieces of xi.
class GAccumulator {
 public:
  GAccumulator(const GDescriptor& g, const YProcessSpec& y, const RngStream& rng, double epsilon)
      : g_(&g), y_(&y) {
    if (y.kind == YProcessSpec::Kind::Subordinator) {
      y_model_ = PathModel::univariate(*y.subordinator, epsilon);
      y_stepper_.emplace(*y_model_, rng.derived(1));
    }
  }

  void segment(double t0, double t1, double x0, double x1) {
    const double h = t1 - t0;
    switch (y_->kind) {
      case YProcessSpec::Kind::Identity:
        value_ += g_time_integral(*g_, h, x0, x1);
        break;
      case YProcessSpec::Kind::DeterministicIncreasing:
        value_ += g_rate_integral(*g_, y_->rate, t0, t1, x0, x1);
        break;
      case YProcessSpec::Kind::Subordinator: {
        if (y_model_->b1 != 0.0) value_ += y_model_->b1 * g_time_integral(*g_, h, x0, x1);
        while (y_stepper_->time() < t1) {
          const PathStep s = y_stepper_->advance(t1);
          if (s.jump && h > 0.0) {
            value_ += g_->eval(x0 + (x1 - x0) * (s.t1 - t0) / h) * s.jx;
          }
        }
        break;
      }
    }
  }

  double value() const { return value_; }

 private:
  const GDescriptor* g_;
  const YProcessSpec* y_;
  std::optional<PathModel> y_model_;
  std::optional<PathStepper> y_stepper_;
  double value_ = 0.0;
};

}  // namespace

double integrate_g(const PathGrid& path, const GDescriptor& g, const YProcessSpec& y,
                   const RngStream& rng, double epsilon) {
  GAccumulator acc(g, y, rng, epsilon);
  double t_prev = 0.0;
  double xi_prev = 0.0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    acc.segment(t_prev, path.times[i], xi_prev, path.xi_left[i]);
    t_prev = path.times[i];
    xi_prev = path.xi[i];
  }
  return acc.value();
}

namespace {

struct StopRule {
  bool exact_exit = false;  // non-decreasing xi: stop once xi > b
  int direction = 0;        // heuristic: +1 drifts up, -1 drifts down
  double lo = 0.0;
  double hi = 0.0;
  double margin = 0.0;
  bool any = false;
};

StopRule make_stop_rule(const LevyTriplet1D& xi, const GDescriptor& g,
                        const HorizonPolicy& policy) {
  StopRule rule;
  const auto support = g.compact_support ? g.compact_support : g.negligible_outside;
  if (!support) return rule;
  rule.any = true;
  rule.lo = support->first;
  rule.hi = support->second;
  const double width = rule.hi - rule.lo;
  rule.margin = policy.margin_factor * (width > 0.0 ? width : 1.0);
  const LevyMeasure1D& m = xi.measure();
  const bool nondecreasing = xi.sigma2() == 0.0 && !m.has_negative_part() && xi.drift_bv() &&
                             *xi.drift_bv() >= 0.0;
  if (nondecreasing && g.compact_support) {
    rule.exact_exit = true;
    return rule;
  }
  const double up = m.integrate([](double x) { return x; }, Region::above(1.0));
  const double down = m.integrate([](double x) { return x; }, Region::below(-1.0));
  if (std::isinf(up) && std::isinf(down)) return rule;
  const double mean = xi.gamma() + up + down;
  rule.direction = mean > 0.0 ? 1 : (mean < 0.0 ? -1 : 0);
  return rule;
}

SampleResult sample_one_g(const PathModel& model, const StopRule& rule, const GDescriptor& g,
                          const YProcessSpec& y, const HorizonPolicy& policy,
                          const RngStream& rng) {
  PathStepper st(model, rng);
  GAccumulator acc(g, y, rng, policy.epsilon);
  SampleResult r;
  double beyond_since = -1.0;
  while (true) {
    const double x = st.xi();
    if (rule.exact_exit && x > rule.hi) break;
    if (rule.direction != 0) {
      const bool beyond = rule.direction > 0 ? x > rule.hi + rule.margin : x < rule.lo - rule.margin;
      if (beyond) {
        if (beyond_since < 0.0) beyond_since = st.time();
        if (st.time() - beyond_since >= policy.extra_time) {
          r.heuristic_stop = true;
          break;
        }
      } else {
        beyond_since = -1.0;
      }
    }
    if (st.time() >= policy.max_horizon) {
      r.partial = true;
      break;
    }
    const PathStep s = st.advance(std::min(policy.max_horizon, st.time() + 1.0));
    acc.segment(s.t0, s.t1, s.xi0, s.xi_left());
  }
  r.value = acc.value();
  r.truncation_time = st.time();
  return r;
}

}  // namespace

SamplePool sample_g_functional(const LevyTriplet1D& triplet, const GDescriptor& g,
                               const YProcessSpec& y, std::size_t n, const HorizonPolicy& policy,
                               std::uint64_t seed, Execution exec) {
  SimulationOptions opts;
  opts.gaussian_proxy = policy.gaussian_proxy;
  opts.max_step = (triplet.sigma2() > 0.0 || policy.gaussian_proxy) ? policy.max_step : kInf;
  const PathModel model = PathModel::univariate(triplet, policy.epsilon, opts);
  const StopRule rule = make_stop_rule(triplet, g, policy);
  SamplePool pool = run_pool(n, exec, [&](std::uint64_t i) {
    return sample_one_g(model, rule, g, y, policy, RngStream{seed, i});
  });
  pool.seed = seed;
  pool.policy = policy;
  pool.functional = "g:" + g.name + ",Y:" + y.label;
  return pool;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

void SamplePool::write_csv(std::ostream& os) const {
  for (double v : values) {
    put(os, v);
    os << '\n';
  }
}

SamplePool SamplePool::read_csv(std::istream& is) {
  SamplePool pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    double v = 0.0;
    const char* b = line.data() + first;
    const char* e = line.data() + last + 1;
    auto res = std::from_chars(b, e, v);
    if (res.ec != std::errc() || res.ptr != e) {
      if (lineno == 1) continue;  // header
      throw DomainError("pool CSV line " + std::to_string(lineno) + ": not a number");
    }
    pool.values.push_back(v);
  }
  std::sort(pool.values.begin(), pool.values.end());
  return pool;
}

std::string SamplePool::meta_json() const {
  nlohmann::json j;
  j["n"] = values.size();
  j["seed"] = seed;
  j["functional"] = functional;
  j["epsilon"] = policy.epsilon;
  j["tail_tolerance"] = policy.tail_tolerance;
  j["horizon_policy"] = {{"min_horizon", policy.min_horizon},
                         {"max_horizon", policy.max_horizon},
                         {"max_step", policy.max_step},
                         {"margin_factor", policy.margin_factor},
                         {"extra_time", policy.extra_time},
                         {"gaussian_proxy", policy.gaussian_proxy}};
  nlohmann::json trunc;
  if (!truncation_times.empty()) {
    const auto& t = truncation_times;
    trunc["min"] = t.front();
    trunc["median"] = t[t.size() / 2];
    trunc["max"] = t.back();
    trunc["mean"] = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  }
  j["truncation_times"] = trunc;
  j["partial_count"] = partial_count;
  j["heuristic_stops"] = heuristic_stops;
  return j.dump(2);
}

}  // namespace lexfun
