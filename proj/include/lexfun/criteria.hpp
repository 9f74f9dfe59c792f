#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexfun/exfun.hpp"
#include "lexfun/levy_core.hpp"

namespace lexfun {

enum class Verdict { ConstantAtom, HasAtoms, NoAtoms, AbsolutelyContinuous, LebesgueDensity, Unknown };
enum class Tristate { Yes, No, Unknown };
enum class ConvergenceVerdict { Converges, Diverges, Inconclusive };

std::string to_string(Verdict v);
std::string to_string(Tristate t);
std::string to_string(ConvergenceVerdict v);

/// True for verdicts that assert at least one atom.
bool predicts_atoms(Verdict v);

struct Premise {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RuleTrace {
  std::string rule;
  /// Result the rule encodes, in words.
  std::string result;
  std::vector<Premise> premises;

  bool passed() const;
};

struct Classification {
  Verdict verdict = Verdict::Unknown;
  std::optional<double> k;
  std::vector<RuleTrace> trace;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

struct ConvergenceReport {
  Tristate xi_drifts_to_infinity = Tristate::Unknown;
  std::optional<double> xi_mean;
  /// +inf when divergent, NaN when it could not be evaluated.
  double eta_log_integral = 0.0;
  ConvergenceVerdict verdict = ConvergenceVerdict::Inconclusive;
  std::string diagnostics;

  nlohmann::json to_json() const;
};

struct DegeneracyTolerances {
  double sigma = 1e-10;
  double curve = 1e-9;
  double gamma = 1e-8;
};

struct DegeneracyResult {
  std::optional<double> k;
  double sigma_residual = 0.0;
  double curve_residual = 0.0;
  double claim_residual = 0.0;
  std::string failing_clause;

  bool degenerate() const { return k.has_value(); }
  nlohmann::json to_json() const;
};

/// E xi_1 when it exists (possibly +/-inf), nullopt when both tails are non-integrable.
std::optional<double> levy_mean(const LevyTriplet1D& xi);
/// Yes if the mean exists and is non-zero, No if it is zero, Unknown otherwise.
Tristate is_transient(const LevyTriplet1D& xi);

ConvergenceReport check_convergence(const LevyTriplet2D& triplet);

DegeneracyResult check_degenerate(const LevyTriplet2D& triplet,
                                  const DegeneracyTolerances& tol = {});

Classification classify_exponential(const LevyTriplet2D& triplet);

/// Numeric spot checks of the declared g-properties; throws DomainError on
/// contradiction.
void validate_g_flags(const GDescriptor& g);

Classification classify_g_integral(const LevyTriplet1D& triplet, const GDescriptor& g,
                                   const YProcessSpec& y);

}  // namespace lexfun
