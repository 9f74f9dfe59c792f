#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lexfun/path_sim.hpp"

namespace lexfun {

struct LevelSetWindow {
  double j_lo = 0.0;
  double j_hi = 0.0;
  double t0 = 0.0;
};

/// Integrand g together with properties the caller asserts about it.
struct GDescriptor {
  std::string name;
  RealFn eval;

  bool nonneg = false;
  /// [a, b] containing supp g.
  std::optional<std::pair<double, double>> compact_support;
  bool support_interior_contains_0 = false;
  bool positive_on_interior = false;
  bool boundary_countable = false;
  bool boundary_finite = false;
  bool g0_nonzero = false;
  bool positive_near_0 = false;
  bool countable_discontinuities = false;
  bool strictly_monotone_near_0 = false;
  std::optional<LevelSetWindow> level_set_nondegenerate;
  std::optional<double> level_set_nondegenerate_near_0;
  /// g = 1_{[a, b]}.
  std::optional<std::pair<double, double>> indicator_of;
  /// Points where g may jump or kink; integration splits there.
  std::vector<double> breakpoints;
  /// g is below any relevant scale outside [a, b] (used only for stopping).
  std::optional<std::pair<double, double>> negligible_outside;

  /// c * g with the same properties (c > 0 keeps sign flags).
  GDescriptor scaled(double c) const;
};

struct YProcessSpec {
  enum class Kind { Identity, Subordinator, DeterministicIncreasing };
  Kind kind = Kind::Identity;
  std::optional<LevyTriplet1D> subordinator;
  /// Derivative of a deterministic Y.
  RealFn rate;
  bool strictly_increasing = true;
  bool ac_density_nonvanishing = true;
  std::string label = "identity";

  static YProcessSpec identity();
  static YProcessSpec make_subordinator(LevyTriplet1D triplet);
  static YProcessSpec deterministic(RealFn rate, std::string label);
};

struct HorizonPolicy {
  double tail_tolerance = 1e-8;
  double min_horizon = 5.0;
  double max_horizon = 1e4;
  double epsilon = 1e-3;
  /// Sub-grid step, used only when a Gaussian part is present.
  double max_step = 0.005;
  bool gaussian_proxy = false;
  /// No-return margin for g-integrals, in multiples of the support width.
  double margin_factor = 10.0;
  /// Minimum time spent beyond the margin before stopping.
  double extra_time = 1.0;
};

struct SampleResult {
  double value = 0.0;
  double truncation_time = 0.0;
  bool partial = false;
  bool heuristic_stop = false;
};

struct SamplePool {
  std::vector<double> values;
  std::vector<double> truncation_times;
  std::uint64_t seed = 0;
  HorizonPolicy policy;
  std::string functional;
  std::size_t partial_count = 0;
  std::size_t heuristic_stops = 0;

  std::size_t n() const { return values.size(); }
  bool partial() const { return partial_count > 0; }

  void write_csv(std::ostream& os) const;
  std::string meta_json() const;
  static SamplePool read_csv(std::istream& is);
};

enum class Execution { Serial, Parallel };

/// Contribution of one path step to int e^{-xi_{s-}} d eta_s.
double exponential_step_contribution(const PathStep& step, const PathModel& model);

/// I over the horizon of a recorded bivariate path.
double integrate_exponential(const PathGrid& path);

/// Runs one sample of I with the stopping rule of `policy`.
SampleResult sample_one_exponential(const PathModel& model, const HorizonPolicy& policy,
                                    const RngStream& rng);

/// (I_t, xi_t) along one path up to a fixed time t.
std::pair<double, double> exponential_up_to(const PathModel& model, double t,
                                            const RngStream& rng);

PathModel exponential_model(const LevyTriplet2D& triplet, const HorizonPolicy& policy);

SamplePool sample_exponential_functional(const LevyTriplet2D& triplet, std::size_t n,
                                         const HorizonPolicy& policy, std::uint64_t seed,
                                         Execution exec = Execution::Parallel);
SamplePool sample_exponential_functional(const PathModel& model, std::size_t n,
                                         const HorizonPolicy& policy, std::uint64_t seed,
                                         Execution exec = Execution::Parallel);

/// int g(xi_t) dY_t over the horizon of a recorded univariate path. Y jumps
/// for a subordinator Y come from `rng`.
double integrate_g(const PathGrid& path, const GDescriptor& g, const YProcessSpec& y,
                   const RngStream& rng, double epsilon = 1e-3);

SamplePool sample_g_functional(const LevyTriplet1D& triplet, const GDescriptor& g,
                               const YProcessSpec& y, std::size_t n, const HorizonPolicy& policy,
                               std::uint64_t seed, Execution exec = Execution::Parallel);

}  // namespace lexfun
