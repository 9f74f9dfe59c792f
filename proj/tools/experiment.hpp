#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexfun/exfun.hpp"

namespace lexfun::cli {

/// Schema or value problem in an experiment file, located by line and field path.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(int line, std::string field, const std::string& message);
  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

struct KsAnalysis {
  std::string oracle;
  std::function<double(double)> cdf;
  /// Only samples below this value, by more than the atom resolution, enter the test.
  std::optional<double> below;
  nlohmann::json params;
};

struct FixedPointAnalysis {
  std::vector<double> times;
  std::size_t n = 2000;
};

struct Experiment {
  std::string name;
  std::string functional;  // "exponential" or "g_integral"
  std::optional<LevyTriplet2D> pair;
  std::optional<LevyTriplet1D> xi;
  std::optional<GDescriptor> g;
  std::optional<YProcessSpec> y;
  nlohmann::json description;

  std::size_t n = 1000;
  std::uint64_t seed = 1;
  HorizonPolicy policy;
  bool force = false;

  bool classify = true;
  bool atoms = true;
  std::optional<double> resolution;
  std::optional<KsAnalysis> ks;
  std::optional<FixedPointAnalysis> fixed_point;
  std::string output_dir;

  bool exponential() const { return functional == "exponential"; }
  double atom_resolution() const { return resolution.value_or(10.0 * policy.tail_tolerance); }
};

struct ParseContext {
  std::filesystem::path user_dir;
};

/// Reads a YAML (or JSON) experiment file.
Experiment load_experiment(const std::filesystem::path& file, const ParseContext& ctx);

/// Tabulated densities found in the user directory, by name.
std::vector<std::string> user_densities(const std::filesystem::path& dir);

/// Catalogue listing, one entry per line.
std::string catalogue_listing(const std::filesystem::path& user_dir);

}  // namespace lexfun::cli
