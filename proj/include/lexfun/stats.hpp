#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "lexfun/exfun.hpp"

namespace lexfun {

struct AtomCandidate {
  double location = 0.0;
  double mass_estimate = 0.0;
  std::size_t count = 0;
  double window_width = 0.0;
};

struct AtomReport {
  std::vector<AtomCandidate> candidates;
  /// Largest cluster mass a continuous law explains at the chosen level.
  double null_max_mass = 0.0;
  /// Samples too large in magnitude to resolve at the requested width.
  std::size_t unresolved = 0;
  bool atoms_found = false;

  nlohmann::json to_json() const;
};

/// Sliding-window cluster test against a local-uniformity null.
AtomReport detect_atoms(std::vector<double> values, double resolution, double alpha = 0.01);
AtomReport detect_atoms(const SamplePool& pool, double resolution, double alpha = 0.01);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

KsResult ks_test(std::vector<double> values, const std::function<double(double)>& cdf);
KsResult ks_test(const SamplePool& pool, const std::function<double(double)>& cdf);
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct FixedPointResult {
  double p_value = 1.0;
  double statistic = 0.0;
  /// Both pools constant and equal within tolerance.
  bool degenerate = false;
  std::vector<double> pool_a;
  std::vector<double> pool_b;
};

/// Compares samples of I with samples of I_t + e^{-xi_t} I' (I' independent).
FixedPointResult fixed_point_test(const LevyTriplet2D& triplet, double t, std::size_t n,
                                  std::uint64_t seed, const HorizonPolicy& policy = {},
                                  Execution exec = Execution::Parallel);

namespace oracle {

/// Law of int_0^inf exp(-(sigma B_s + mu s)) ds.
std::function<double(double)> dufresne(double sigma2, double mu);
/// Exp(rate) conditioned on [0, upper).
std::function<double(double)> truncated_exponential(double rate, double upper);
std::function<double(double)> uniform(double a, double b);
std::function<double(double)> normal(double mean, double sd);
std::function<double(double)> exponential(double rate);

}  // namespace oracle

/// Equal-width histogram as CSV: bin_lo,bin_hi,count,density.
void write_histogram_csv(std::ostream& os, const std::vector<double>& values, std::size_t bins);

}  // namespace lexfun
