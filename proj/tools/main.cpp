#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "lexfun/criteria.hpp"
#include "lexfun/errors.hpp"
#include "lexfun/stats.hpp"
#include "experiment.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lexfun;
using namespace lexfun::cli;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kContradiction = 2;

struct Globals {
  std::optional<std::uint64_t> seed;
  std::string user_dir;
  std::string out;
};

Experiment load(const std::string& file, const Globals& g) {
  Experiment e = load_experiment(file, ParseContext{g.user_dir});
  if (g.seed) e.seed = *g.seed;
  if (!g.out.empty()) e.output_dir = g.out;
  return e;
}

json classify_json(const Experiment& e) {
  json j;
  if (e.exponential()) {
    j["convergence"] = check_convergence(*e.pair).to_json();
    j["degeneracy"] = check_degenerate(*e.pair).to_json();
    j["classification"] = classify_exponential(*e.pair).to_json();
  } else {
    j["classification"] = classify_g_integral(*e.xi, *e.g, *e.y).to_json();
  }
  return j;
}

Verdict verdict_of(const Experiment& e) {
  return e.exponential() ? classify_exponential(*e.pair).verdict
                         : classify_g_integral(*e.xi, *e.g, *e.y).verdict;
}

SamplePool sample(const Experiment& e) {
  return e.exponential() ? sample_exponential_functional(*e.pair, e.n, e.policy, e.seed)
                         : sample_g_functional(*e.xi, *e.g, *e.y, e.n, e.policy, e.seed);
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << text;
}

void write_pool(const fs::path& dir, const SamplePool& pool) {
  std::ofstream os(dir / "pool.csv");
  if (!os) throw std::runtime_error("cannot write " + (dir / "pool.csv").string());
  pool.write_csv(os);
  write_file(dir / "pool.meta.json", pool.meta_json());
}

void dump_paths(const Experiment& e, std::size_t count, const fs::path& dir) {
  SimulationOptions opts;
  opts.max_step = e.policy.max_step;
  opts.gaussian_proxy = e.policy.gaussian_proxy;
  fs::create_directories(dir / "paths");
  for (std::size_t i = 0; i < count; ++i) {
    const RngStream rng{e.seed, i};
    const PathGrid path = e.exponential()
                              ? simulate_bivariate(*e.pair, e.policy.min_horizon, e.policy.epsilon, rng, opts)
                              : simulate_path(*e.xi, e.policy.min_horizon, e.policy.epsilon, rng, opts);
    std::ofstream os(dir / "paths" / ("path_" + std::to_string(i) + ".csv"));
    path.write_csv(os);
  }
}

int cmd_classify(const std::string& file, const Globals& g) {
  const Experiment e = load(file, g);
  json j = classify_json(e);
  j["name"] = e.name;
  j["description"] = e.description;
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_simulate(const std::string& file, std::size_t paths, const Globals& g) {
  const Experiment e = load(file, g);
  const fs::path dir = e.output_dir;
  fs::create_directories(dir);
  const SamplePool pool = sample(e);
  write_pool(dir, pool);
  if (paths > 0) dump_paths(e, paths, dir);
  std::cout << pool.meta_json() << '\n';
  std::cerr << "wrote " << pool.n() << " samples to " << (dir / "pool.csv").string() << '\n';
  return kOk;
}

int cmd_atoms(const std::string& file, double resolution) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read " + file);
  const SamplePool pool = SamplePool::read_csv(in);
  std::cout << detect_atoms(pool, resolution).to_json().dump(2) << '\n';
  return kOk;
}

int cmd_verify(const std::string& file, const Globals& g) {
  const Experiment e = load(file, g);
  const fs::path dir = e.output_dir;
  fs::create_directories(dir);

  json report = classify_json(e);
  report["name"] = e.name;
  report["description"] = e.description;
  const Verdict verdict = verdict_of(e);

  bool run = true;
  if (e.exponential()) {
    const auto conv = check_convergence(*e.pair).verdict;
    if (conv != ConvergenceVerdict::Converges && !e.force) {
      run = false;
      report["sampling"] = {{"skipped", true},
                            {"reason", "convergence is " + to_string(conv) + "; set sampler.force to sample"}};
    }
  }

  bool contradiction = false;
  if (run) {
    const SamplePool pool = sample(e);
    write_pool(dir, pool);
    {
      std::ofstream hist(dir / "histogram.csv");
      write_histogram_csv(hist, pool.values, 100);
    }
    report["sampling"] = json::parse(pool.meta_json());
    report["sampling"]["skipped"] = false;

    if (e.atoms) {
      const AtomReport atoms = detect_atoms(pool, e.atom_resolution());
      report["atoms"] = atoms.to_json();
      report["atoms"]["resolution"] = e.atom_resolution();
      if (verdict != Verdict::Unknown && predicts_atoms(verdict) != atoms.atoms_found) {
        contradiction = true;
        report["contradiction"] = "classifier says " + to_string(verdict) + " but the detector reports " +
                                  (atoms.atoms_found ? "atoms" : "no atoms");
      }
    }
    if (e.ks) {
      // an atom at the cut may land a rounding error below it
      const double cut = e.ks->below ? *e.ks->below - e.atom_resolution() : kInf;
      std::vector<double> xs;
      for (double v : pool.values) {
        if (v < cut) xs.push_back(v);
      }
      json k = {{"oracle", e.ks->oracle}, {"params", e.ks->params}, {"n", xs.size()}};
      if (e.ks->below) k["below"] = *e.ks->below;
      if (xs.size() >= 10) {
        const KsResult r = ks_test(xs, e.ks->cdf);
        k["statistic"] = r.statistic;
        k["p_value"] = r.p_value;
      } else {
        k["skipped"] = "fewer than 10 samples";
      }
      report["ks"] = k;
    }
  }
  if (e.fixed_point) {
    if (!e.exponential()) throw std::runtime_error("fixed_point applies to exponential experiments only");
    json arr = json::array();
    for (double t : e.fixed_point->times) {
      const FixedPointResult r = fixed_point_test(*e.pair, t, e.fixed_point->n, e.seed, e.policy);
      arr.push_back({{"t", t}, {"p_value", r.p_value}, {"statistic", r.statistic}, {"degenerate", r.degenerate}});
    }
    report["fixed_point"] = arr;
  }
  report["status"] = contradiction ? "contradiction" : "consistent";
  write_file(dir / "report.json", report.dump(2) + "\n");
  std::cout << e.name << ": verdict " << to_string(verdict) << ", " << report["status"].get<std::string>()
            << " (" << (dir / "report.json").string() << ")\n";
  return contradiction ? kContradiction : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("LEXFUN_THREADS")) {
    const int n = std::atoi(threads);
    if (n > 0) omp_set_num_threads(n);
  }

  CLI::App app{"Exponential functionals and g-integrals of Levy processes"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "override the seed in the experiment file");
  app.add_option("--user-dir", g.user_dir, "directory of tabulated densities (<name>.csv)")->check(CLI::ExistingDirectory);
  app.add_option("--out", g.out, "output directory (default out/<name>)");

  std::string experiment_file;
  auto* classify = app.add_subcommand("classify", "print the classifier verdict and trace as JSON");
  classify->add_option("experiment", experiment_file)->required()->check(CLI::ExistingFile);

  std::size_t paths = 0;
  auto* simulate = app.add_subcommand("simulate", "sample the functional into pool.csv");
  simulate->add_option("experiment", experiment_file)->required()->check(CLI::ExistingFile);
  simulate->add_option("--paths", paths, "also write this many path CSVs");

  std::string pool_file;
  double resolution = 1e-6;
  auto* atoms = app.add_subcommand("atoms", "run the atom detector on a sample pool");
  atoms->add_option("pool", pool_file)->required()->check(CLI::ExistingFile);
  atoms->add_option("--resolution", resolution, "largest window width treated as a point")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "classify, sample and compare against the detector");
  verify->add_option("experiment", experiment_file)->required()->check(CLI::ExistingFile);

  auto* list = app.add_subcommand("list", "list catalogue entries and user densities");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*classify) return cmd_classify(experiment_file, g);
    if (*simulate) return cmd_simulate(experiment_file, paths, g);
    if (*atoms) return cmd_atoms(pool_file, resolution);
    if (*verify) return cmd_verify(experiment_file, g);
    if (*list) {
      std::cout << catalogue_listing(g.user_dir);
      return kOk;
    }
  } catch (const SchemaError& e) {
    std::cerr << experiment_file << ": " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
