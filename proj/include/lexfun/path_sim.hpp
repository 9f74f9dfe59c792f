#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <vector>

#include "lexfun/levy_core.hpp"

namespace lexfun {

/// Reproducible random stream: the same (seed, stream_id) always yields the
/// same engine state.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;

  std::mt19937_64 engine() const;
  /// Independent stream for an auxiliary process driven by the same sample.
  RngStream derived(std::uint64_t salt) const;
};

/// Draws jumps of a 1D Levy measure restricted to x < -cut_neg or x > cut_pos.
class JumpSampler {
 public:
  JumpSampler() = default;
  JumpSampler(const LevyMeasure1D& measure, double cut_neg, double cut_pos);

  double rate() const { return total_; }
  double draw(std::mt19937_64& rng) const;

 private:
  struct Piece {
    double mass = 0.0;
    std::function<double(double)> from_outer_mass;  // outer mass in (0, mass] -> location
  };
  std::vector<Piece> pieces_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

struct JumpSource {
  double rate = 0.0;
  std::function<std::pair<double, double>(std::mt19937_64&)> draw;
};

struct SimulationOptions {
  /// Longest continuous step; the grid gets a point at least this often.
  double max_step = kInf;
  /// Replace removed small jumps by a matching Gaussian instead of pure mean.
  bool gaussian_proxy = false;
};

/// Everything needed to advance a (xi, eta) path: continuous drifts after the
/// small-jump cutoff, covariance with its symmetric square root, and the
/// compound Poisson streams of retained jumps.
struct PathModel {
  double b1 = 0.0;
  double b2 = 0.0;
  Covariance2 cov;
  double r11 = 0.0;
  double r12 = 0.0;
  double r22 = 0.0;
  std::vector<JumpSource> sources;
  double total_rate = 0.0;
  double epsilon = 0.0;
  bool has_eta = false;
  double max_step = kInf;

  static PathModel univariate(const LevyTriplet1D& triplet, double epsilon,
                              const SimulationOptions& opts = {});
  static PathModel bivariate(const LevyTriplet2D& triplet, double epsilon,
                             const SimulationOptions& opts = {});
};

/// One step of a path: continuous move over (t0, t1] followed by an optional
/// jump at t1.
struct PathStep {
  double t0 = 0.0;
  double t1 = 0.0;
  double xi0 = 0.0;
  double eta0 = 0.0;
  double dxi_c = 0.0;
  double deta_c = 0.0;
  double g1 = 0.0;  // Gaussian parts of the continuous increments
  double g2 = 0.0;
  bool jump = false;
  double jx = 0.0;
  double jy = 0.0;

  double h() const { return t1 - t0; }
  double xi_left() const { return xi0 + dxi_c; }
  double eta_left() const { return eta0 + deta_c; }
};

class PathStepper {
 public:
  PathStepper(const PathModel& model, const RngStream& rng);

  /// Advances to the next jump, the next sub-grid point, or t_stop.
  PathStep advance(double t_stop);

  double time() const { return t_; }
  double xi() const { return xi_; }
  double eta() const { return eta_; }

 private:
  const PathModel* model_;
  std::mt19937_64 eng_;
  double t_ = 0.0;
  double xi_ = 0.0;
  double eta_ = 0.0;
  double next_jump_ = kInf;
};

struct JumpMark {
  double dxi = 0.0;
  double deta = 0.0;
};

struct PathMeta {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  double epsilon = 0.0;
  double horizon = 0.0;
  double drift_xi = 0.0;
  double drift_eta = 0.0;
  Covariance2 cov;
};

/// Event-driven skeleton of a path on (0, horizon].
struct PathGrid {
  std::vector<double> times;
  std::vector<double> xi_left;
  std::vector<double> xi;
  std::vector<double> eta_left;
  std::vector<double> eta;
  std::vector<std::optional<JumpMark>> marks;
  PathMeta meta;

  bool has_eta() const { return !eta.empty(); }
  std::size_t size() const { return times.size(); }
  void write_csv(std::ostream& os) const;
};

PathGrid simulate_path(const LevyTriplet1D& triplet, double horizon, double epsilon,
                       const RngStream& rng, const SimulationOptions& opts = {});
PathGrid simulate_bivariate(const LevyTriplet2D& triplet, double horizon, double epsilon,
                            const RngStream& rng, const SimulationOptions& opts = {});
/// Records a path from an already compiled model.
PathGrid simulate_model(const PathModel& model, double horizon, const RngStream& rng);

}  // namespace lexfun
