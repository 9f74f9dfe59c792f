// Runs the eight acceptance checks and prints one PASS/FAIL line for each.
// Exit status is the number of failed checks.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "lexfun/criteria.hpp"
#include "lexfun/g_functions.hpp"
#include "lexfun/measures.hpp"
#include "lexfun/stats.hpp"
#include "random_pairs.hpp"

using namespace lexfun;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void check(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ostringstream line;
  if (secs > limit_s) {
    o.pass = false;
    o.detail += "; over the time limit";
  }
  line << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << " " << title << ": " << o.detail << " ["
       << std::fixed;
  line.precision(2);
  line << secs << " s, limit " << limit_s << " s]";
  std::cout << line.str() << std::endl;
  failures += o.pass ? 0 : 1;
}

std::string fmt(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

LevyTriplet1D cpp_uniform_eta() { return LevyTriplet1D(0.25, 0.0, measures::uniform_jumps(0.0, 0.5, 1.0)); }

// 1: eta = CPP(1, U(0, 0.5)), k = 1
Outcome degenerate_constant() {
  HorizonPolicy pol;
  pol.tail_tolerance = 1e-8;
  const SamplePool pool = sample_exponential_functional(doleans_xi_from_eta(cpp_uniform_eta(), 1.0), 1000, pol, 1);
  double worst = 0.0;
  for (double v : pool.values) worst = std::max(worst, std::abs(v - 1.0));
  const AtomReport atoms = detect_atoms(pool, 10.0 * pol.tail_tolerance);
  const bool single = atoms.candidates.size() == 1 && atoms.candidates[0].mass_estimate == 1.0;
  return {pool.n() == 1000 && worst <= 1e-3 && single,
          "max |I - 1| = " + fmt(worst) + ", atoms " + std::to_string(atoms.candidates.size()) +
              (atoms.candidates.empty() ? "" : " with mass " + fmt(atoms.candidates[0].mass_estimate))};
}

// 2: random admissible (eta, k), recover k and the drift identity
Outcome degeneracy_round_trip() {
  std::mt19937_64 rng(2024);
  double worst_k = 0.0;
  double worst_claim = 0.0;
  int missed = 0;
  for (int i = 0; i < 50; ++i) {
    const auto [eta, k] = lexfun::testing::random_admissible_eta(rng);
    const DegeneracyResult d = check_degenerate(doleans_xi_from_eta(eta, k));
    if (!d.degenerate()) {
      ++missed;
      continue;
    }
    worst_k = std::max(worst_k, std::abs(*d.k - k) / std::abs(k));
    worst_claim = std::max(worst_claim, d.claim_residual);
  }
  return {missed == 0 && worst_k <= 1e-9 && worst_claim <= 1e-8,
          "missed " + std::to_string(missed) + "/50, max rel k error " + fmt(worst_k, 3) +
              ", max claim residual " + fmt(worst_claim, 3)};
}

// 3: xi = t + CPP(1, +1), g = 1_[0,1]: I = min(T1, 1)
Outcome drift_cpp_closed_form() {
  const LevyTriplet1D xi(2.0, 0.0, measures::point(1.0, 1.0));
  HorizonPolicy pol;
  const SamplePool pool = sample_g_functional(xi, gfun::indicator(0.0, 1.0), YProcessSpec::identity(), 10000, pol, 3);
  const double res = 10.0 * pol.tail_tolerance;
  const AtomReport atoms = detect_atoms(pool, res);
  double mass = 0.0;
  for (const auto& c : atoms.candidates) {
    if (std::abs(c.location - 1.0) <= res) mass = c.mass_estimate;
  }
  std::vector<double> below;
  for (double v : pool.values) {
    if (v < 1.0 - res) below.push_back(v);
  }
  const KsResult ks = ks_test(below, oracle::truncated_exponential(1.0, 1.0));
  const double expected = std::exp(-1.0);
  return {std::abs(mass - expected) <= 0.015 && ks.p_value > 0.01,
          "atom mass at 1 = " + fmt(mass, 4) + " (want " + fmt(expected, 4) + " +- 0.015), KS p = " +
              fmt(ks.p_value, 3) + " on " + std::to_string(below.size()) + " samples"};
}

// 4: driftless 1/2-stable subordinator, g = 1_[0,1]
Outcome stable_subordinator_no_atoms() {
  const LevyMeasure1D m = measures::stable_tail(0.5);
  const double small = m.integrate([](double x) { return x; }, Region::abs_at_most(1.0));
  const LevyTriplet1D xi(small, 0.0, m);
  const GDescriptor g = gfun::indicator(0.0, 1.0);
  const Classification c = classify_g_integral(xi, g, YProcessSpec::identity());
  bool rule = false;
  for (const auto& r : c.trace) rule = rule || (r.rule == "subordinator_first_passage" && r.passed());
  HorizonPolicy pol;
  pol.epsilon = 1e-4;
  const SamplePool pool = sample_g_functional(xi, g, YProcessSpec::identity(), 10000, pol, 4);
  const AtomReport atoms = detect_atoms(pool, 10.0 * pol.tail_tolerance);
  const bool consistent = predicts_atoms(c.verdict) == atoms.atoms_found;
  return {c.verdict == Verdict::NoAtoms && rule && !atoms.atoms_found && consistent,
          "verdict " + to_string(c.verdict) + (rule ? " via first-passage rule" : " (rule missing)") +
              ", detector " + (atoms.atoms_found ? "AtomsFound" : "NoAtomsDetected") +
              ", partial " + std::to_string(pool.partial_count)};
}

// 5: xi = sqrt(2) B + t, eta = t against 2 / (sigma2 Gamma(2 mu / sigma2))
Outcome dufresne_oracle() {
  const LevyTriplet2D pair(1.0, 1.0, {2.0, 0.0, 0.0}, LevyMeasure2D());
  HorizonPolicy pol;
  pol.max_step = 0.002;
  const auto cdf = oracle::dufresne(2.0, 1.0);
  int passed = 0;
  std::string ps;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double p = ks_test(sample_exponential_functional(pair, 10000, pol, seed), cdf).p_value;
    passed += p > 0.01 ? 1 : 0;
    ps += (ps.empty() ? "" : ", ") + fmt(p, 3);
  }
  return {passed >= 3, std::to_string(passed) + "/5 seeds with p > 0.01 (" + ps + ")"};
}

LevyMeasure1D inverse_square_tail() {
  DensitySegment s;
  s.lo = 1.0;
  s.hi = kInf;
  s.density = [](double y) { return 1.0 / (y * y); };
  return LevyMeasure1D({}, {s});
}

LevyMeasure1D doubly_exponential_atoms() {
  AtomSeries s;
  s.log_abs_location = [](std::size_t n) { return std::ldexp(1.0, static_cast<int>(n)); };
  s.mass = [](std::size_t n) { return std::ldexp(1.0, -static_cast<int>(n)); };
  return LevyMeasure1D({}, {}, {s});
}

// 6: the three convergence examples
Outcome convergence_examples() {
  auto with_eta = [](double gamma1, Covariance2 cov, const LevyMeasure1D& eta) {
    return LevyTriplet2D(gamma1, 0.0, cov, LevyMeasure2D(ProductIndependent{LevyMeasure1D(), eta}));
  };
  const ConvergenceReport a = check_convergence(with_eta(1.0, {}, inverse_square_tail()));
  const ConvergenceReport b = check_convergence(with_eta(1.0, {}, doubly_exponential_atoms()));
  const ConvergenceReport c = check_convergence(with_eta(-1.0, {1.0, 0.0, 1.0}, inverse_square_tail()));
  const double err = std::abs(a.eta_log_integral - 2.0 / std::numbers::e);
  const bool ok = a.verdict == ConvergenceVerdict::Converges && err <= 1e-6 &&
                  b.verdict == ConvergenceVerdict::Diverges && c.verdict == ConvergenceVerdict::Diverges;
  return {ok, to_string(a.verdict) + " (|integral - 2/e| = " + fmt(err, 3) + ") / " + to_string(b.verdict) + " / " +
                  to_string(c.verdict)};
}

// 7: I and xi-shifted I agree in law
Outcome fixed_point() {
  const LevyTriplet2D pair(1.0, 1.0, {1.0, 0.0, 0.0}, LevyMeasure2D());
  HorizonPolicy pol;
  pol.max_step = 0.005;
  int passed = 0;
  std::string ps;
  for (double t : {0.5, 1.0, 2.0}) {
    for (std::uint64_t seed : {71u, 72u, 73u}) {
      const double p = fixed_point_test(pair, t, 10000, seed, pol).p_value;
      passed += p > 0.01 ? 1 : 0;
      ps += (ps.empty() ? "" : ", ") + fmt(p, 2);
    }
  }
  return {passed >= 8, std::to_string(passed) + "/9 with p > 0.01 (" + ps + ")"};
}

int run_quiet(const std::string& cmd, std::string& out) {
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return -1;
  std::array<char, 4096> buf{};
  while (fgets(buf.data(), buf.size(), p)) out += buf.data();
  const int status = pclose(p);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 8: verify over the bundled corpus never reports a contradiction
Outcome corpus_consistency() {
  const fs::path out = fs::temp_directory_path() / "lexfun_acceptance_corpus";
  fs::remove_all(out);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(LEXFUN_EXPERIMENT_DIR)) {
    if (e.path().extension() == ".yaml") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  int contradictions = 0;
  int errors = 0;
  std::string notes;
  for (const auto& s : files) {
    std::string text;
    const int code = run_quiet(std::string(LEXFUN_CLI_PATH) + " --out " + (out / s.stem()).string() +
                                   " verify " + s.string(),
                               text);
    if (code == 2) ++contradictions;
    if (code != 0 && code != 2) ++errors;
    if (code != 0) notes += " " + s.stem().string() + "=" + std::to_string(code);
  }
  return {files.size() >= 10 && contradictions == 0 && errors == 0,
          std::to_string(files.size()) + " experiment files, " + std::to_string(contradictions) + " contradictions, " +
              std::to_string(errors) + " errors" + notes};
}

}  // namespace

int main() {
  check(1, "degenerate pair is the constant 1", 30, degenerate_constant);
  check(2, "degeneracy round trip", 10, degeneracy_round_trip);
  check(3, "drift plus unit jumps, time in [0,1]", 60, drift_cpp_closed_form);
  check(4, "stable subordinator, no atoms", 120, stable_subordinator_no_atoms);
  check(5, "Brownian exponential functional vs inverse gamma", 300, dufresne_oracle);
  check(6, "convergence examples", 1, convergence_examples);
  check(7, "fixed-point identity in law", 300, fixed_point);
  check(8, "classifier and detector agree on bundled experiments", 900, corpus_consistency);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures;
}
