#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "lexfun/criteria.hpp"
#include "lexfun/errors.hpp"
#include "lexfun/g_functions.hpp"
#include "lexfun/measures.hpp"
#include "lexfun/stats.hpp"

namespace lexfun::cli {

SchemaError::SchemaError(int line, std::string field, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", field '" + field + "': " + message),
      line_(line),
      field_(std::move(field)) {}

namespace {

int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

// A YAML node together with its dotted path and the nearest known line.
struct Field {
  YAML::Node node;
  std::string path;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(line, path, msg); }

  bool has(const std::string& key) const { return node.IsMap() && node[key].IsDefined() && !node[key].IsNull(); }

  Field operator[](const std::string& key) const {
    if (!node.IsMap()) fail("expected a table");
    const YAML::Node child = node[key];
    const std::string p = path.empty() ? key : path + "." + key;
    return {child, p, child.IsDefined() ? std::max(line_of(child), line) : line};
  }

  Field at(std::size_t i) const {
    const YAML::Node child = node[i];
    return {child, path + "[" + std::to_string(i) + "]", std::max(line_of(child), line)};
  }

  Field required(const std::string& key) const {
    if (!has(key)) (*this)[key].fail("missing required field");
    return (*this)[key];
  }

  void allow(std::initializer_list<const char*> keys) const {
    if (!node.IsMap()) fail("expected a table");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node) {
      const auto k = kv.first.as<std::string>();
      if (!ok.count(k)) {
        std::string list;
        for (const auto& s : ok) list += (list.empty() ? "" : ", ") + s;
        Field{kv.first, path.empty() ? k : path + "." + k, line_of(kv.first)}.fail(
            "unknown field (allowed: " + list + ")");
      }
    }
  }

  double number() const {
    if (!node.IsScalar()) fail("expected a number");
    const auto s = node.as<std::string>();
    if (s == "inf" || s == ".inf" || s == "+inf") return kInf;
    if (s == "-inf" || s == "-.inf") return -kInf;
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) fail("expected a number, got '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("expected a number, got '" + s + "'");
    }
  }

  double number(const std::string& key, double def) const { return has(key) ? (*this)[key].number() : def; }
  double number(const std::string& key) const { return required(key).number(); }

  double positive(const std::string& key, std::optional<double> def = std::nullopt) const {
    if (!has(key) && def) return *def;
    const Field f = required(key);
    const double v = f.number();
    if (!(v > 0.0)) f.fail("must be positive");
    return v;
  }

  std::uint64_t count(const std::string& key, std::uint64_t def) const {
    if (!has(key)) return def;
    const Field f = (*this)[key];
    const double v = f.number();
    if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) f.fail("expected a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }

  bool boolean() const {
    try {
      return node.as<bool>();
    } catch (const YAML::Exception&) {
      fail("expected true or false");
    }
  }
  bool boolean(const std::string& key, bool def) const { return has(key) ? (*this)[key].boolean() : def; }

  std::string text() const {
    if (!node.IsScalar()) fail("expected a string");
    return node.as<std::string>();
  }
  std::string text(const std::string& key) const { return required(key).text(); }
  std::string text(const std::string& key, const std::string& def) const {
    return has(key) ? (*this)[key].text() : def;
  }

  std::vector<double> numbers() const {
    if (node.IsScalar()) return {number()};
    if (!node.IsSequence()) fail("expected a number or a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < node.size(); ++i) out.push_back(at(i).number());
    return out;
  }

  int sign(const std::string& key) const {
    const double s = number(key, 1.0);
    if (s != 1.0 && s != -1.0) (*this)[key].fail("sign must be +1 or -1");
    return static_cast<int>(s);
  }
};

// Re-raise library errors against the field that produced them.
template <class F>
auto guarded(const Field& f, F&& make) -> decltype(make()) {
  try {
    return make();
  } catch (const DomainError& e) {
    f.fail(e.what());
  } catch (const NumericError& e) {
    f.fail(e.what());
  }
}

LevyMeasure1D read_tabulated(const std::filesystem::path& dir, const std::string& name, const Field& f) {
  const auto file = dir / (name + ".csv");
  std::ifstream in(file);
  if (dir.empty() || !in) f.fail("tabulated density '" + name + "' not found (looked for " + file.string() + ")");
  std::vector<double> xs;
  std::vector<double> fs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double x = 0.0;
    double d = 0.0;
    if (!(ls >> x >> d)) {
      if (xs.empty()) continue;  // header
      f.fail(file.string() + ":" + std::to_string(lineno) + ": expected 'x,density'");
    }
    xs.push_back(x);
    fs.push_back(d);
  }
  return guarded(f, [&] { return measures::tabulated(xs, fs); });
}

LevyMeasure1D jump_law(const Field& f, double rate) {
  f.allow({"law", "size", "a", "b", "theta", "sign"});
  const std::string law = f.text("law");
  return guarded(f, [&]() -> LevyMeasure1D {
    if (law == "point") return measures::point(f.number("size"), rate);
    if (law == "uniform") return measures::uniform_jumps(f.number("a"), f.number("b"), rate);
    if (law == "exponential") return measures::exponential_jumps(f.positive("theta"), rate, f.sign("sign"));
    f["law"].fail("unknown jump law '" + law + "' (point, uniform, exponential)");
  });
}

// Jump part of one catalogue entry.
LevyMeasure1D jump_component(const Field& f, const std::string& type, const ParseContext& ctx) {
  if (type == "cpp") {
    return jump_law(f.required("jumps"), f.positive("rate"));
  }
  if (type == "stable_tail_alpha") {
    const double alpha = f.number("alpha");
    return guarded(f, [&] { return measures::stable_tail(alpha, f.positive("c", 1.0), f.sign("sign")); });
  }
  if (type.rfind("tabulated:", 0) == 0) return read_tabulated(ctx.user_dir, type.substr(10), f);
  f["type"].fail("unknown jump component '" + type + "'");
}

LevyTriplet1D build_process(const Field& f, const ParseContext& ctx, nlohmann::json& desc) {
  const std::string type = f.text("type");
  desc["type"] = type;
  double sigma2 = f.number("sigma2", 0.0);
  LevyMeasure1D m;
  if (type == "drift") {
    f.allow({"type", "drift", "gamma"});
    sigma2 = 0.0;
  } else if (type == "brownian_drift") {
    f.allow({"type", "sigma2", "mu"});
    sigma2 = f.positive("sigma2");
  } else if (type == "cpp") {
    f.allow({"type", "rate", "jumps", "drift", "gamma", "sigma2"});
    m = jump_component(f, type, ctx);
  } else if (type == "stable_tail_alpha") {
    f.allow({"type", "alpha", "c", "sign", "drift", "gamma", "sigma2"});
    m = jump_component(f, type, ctx);
  } else if (type.rfind("tabulated:", 0) == 0) {
    f.allow({"type", "drift", "gamma", "sigma2"});
    m = jump_component(f, type, ctx);
  } else if (type == "levy") {
    f.allow({"type", "components", "drift", "gamma", "sigma2"});
    if (f.has("components")) {
      const Field comps = f["components"];
      if (!comps.node.IsSequence()) comps.fail("expected a list of jump components");
      for (std::size_t i = 0; i < comps.node.size(); ++i) {
        const Field c = comps.at(i);
        const std::string ct = c.text("type");
        if (ct == "cpp") {
          c.allow({"type", "rate", "jumps"});
        } else if (ct == "stable_tail_alpha") {
          c.allow({"type", "alpha", "c", "sign"});
        } else {
          c.allow({"type"});
        }
        m = m + jump_component(c, ct, ctx);
      }
    }
  } else {
    f["type"].fail("unknown process '" + type +
                   "' (drift, brownian_drift, cpp, stable_tail_alpha, levy, tabulated:<name>)");
  }
  if (sigma2 < 0.0) f["sigma2"].fail("must be non-negative");

  double gamma = 0.0;
  if (f.has("gamma") && f.has("drift")) f["gamma"].fail("give either gamma or drift, not both");
  if (f.has("gamma")) {
    gamma = f.number("gamma");
  } else {
    const double drift = type == "brownian_drift" ? f.number("mu") : f.number("drift", 0.0);
    const bool fv = m.empty() || m.small_jump_variation() == Variation::FiniteVariation;
    if (!fv && f.has("drift")) {
      f["drift"].fail("drift is undefined for jumps of infinite variation; give gamma instead");
    }
    gamma = drift + guarded(f, [&] {
              return m.integrate([](double x) { return x; }, Region::abs_at_most(1.0));
            });
  }
  desc["gamma"] = gamma;
  desc["sigma2"] = sigma2;
  return guarded(f, [&] { return LevyTriplet1D(gamma, sigma2, m); });
}

LevyTriplet2D build_pair(const Field& f, const ParseContext& ctx, nlohmann::json& desc) {
  const std::string type = f.text("type");
  desc["type"] = type;
  if (type == "independent") {
    f.allow({"type", "xi", "eta", "rho"});
    const LevyTriplet1D xi = build_process(f.required("xi"), ctx, desc["xi"]);
    const LevyTriplet1D eta = build_process(f.required("eta"), ctx, desc["eta"]);
    const double rho = f.number("rho", 0.0);
    if (std::abs(rho) > 1.0) f["rho"].fail("correlation must lie in [-1, 1]");
    const Covariance2 cov{xi.sigma2(), rho * std::sqrt(xi.sigma2() * eta.sigma2()), eta.sigma2()};
    // jumps on the axes: the Euclidean cutoff equals each marginal cutoff
    return guarded(f, [&] {
      return LevyTriplet2D(xi.gamma(), eta.gamma(), cov,
                           LevyMeasure2D(ProductIndependent{xi.measure(), eta.measure()}));
    });
  }
  if (type == "curve_degenerate") {
    f.allow({"type", "eta", "k"});
    const LevyTriplet1D eta = build_process(f.required("eta"), ctx, desc["eta"]);
    const double k = f.number("k");
    desc["k"] = k;
    return guarded(f, [&] { return doleans_xi_from_eta(eta, k); });
  }
  if (type == "joint") {
    f.allow({"type", "gamma1", "gamma2", "sigma", "atoms"});
    Covariance2 cov;
    if (f.has("sigma")) {
      const auto s = f["sigma"].numbers();
      if (s.size() != 3) f["sigma"].fail("expected [s11, s12, s22]");
      cov = {s[0], s[1], s[2]};
    }
    std::vector<JointAtom> atoms;
    if (f.has("atoms")) {
      const Field a = f["atoms"];
      if (!a.node.IsSequence()) a.fail("expected a list of [x, y, mass]");
      for (std::size_t i = 0; i < a.node.size(); ++i) {
        const auto v = a.at(i).numbers();
        if (v.size() != 3) a.at(i).fail("expected [x, y, mass]");
        atoms.push_back({v[0], v[1], v[2]});
      }
    }
    return guarded(f, [&] {
      return LevyTriplet2D(f.number("gamma1", 0.0), f.number("gamma2", 0.0), cov,
                           atoms.empty() ? LevyMeasure2D() : LevyMeasure2D(JointAtoms{atoms}));
    });
  }
  f["type"].fail("unknown pair '" + type + "' (independent, curve_degenerate, joint)");
}

GDescriptor build_g(const Field& f, nlohmann::json& desc) {
  f.allow({"name", "a", "b", "centre", "radius", "s", "c", "scale", "flags"});
  const std::string name = f.text("name");
  GDescriptor g = guarded(f, [&]() -> GDescriptor {
    if (name == "indicator") return gfun::indicator(f.number("a"), f.number("b"));
    if (name == "bump") return gfun::bump(f.number("centre", 0.0), f.positive("radius", 1.0));
    if (name == "ramp") return gfun::ramp(f.number("a"), f.number("b"));
    if (name == "gaussian") return gfun::gaussian(f.positive("s", 1.0));
    if (name == "constant") return gfun::constant(f.number("c"));
    if (name == "zero") return gfun::zero();
    f["name"].fail("unknown g '" + name + "' (indicator, bump, ramp, gaussian, constant, zero)");
  });
  if (f.has("scale")) {
    const double c = f.positive("scale");
    g = g.scaled(c);
  }
  if (f.has("flags")) {
    const Field fl = f["flags"];
    fl.allow({"nonneg", "support_interior_contains_0", "positive_on_interior", "boundary_countable",
              "boundary_finite", "g0_nonzero", "positive_near_0", "countable_discontinuities",
              "strictly_monotone_near_0", "compact_support", "level_set_nondegenerate",
              "level_set_nondegenerate_near_0"});
    auto flag = [&](const char* key, bool& target) { target = fl.boolean(key, target); };
    flag("nonneg", g.nonneg);
    flag("support_interior_contains_0", g.support_interior_contains_0);
    flag("positive_on_interior", g.positive_on_interior);
    flag("boundary_countable", g.boundary_countable);
    flag("boundary_finite", g.boundary_finite);
    flag("g0_nonzero", g.g0_nonzero);
    flag("positive_near_0", g.positive_near_0);
    flag("countable_discontinuities", g.countable_discontinuities);
    flag("strictly_monotone_near_0", g.strictly_monotone_near_0);
    if (fl.has("compact_support")) {
      const auto s = fl["compact_support"].numbers();
      if (s.size() != 2) fl["compact_support"].fail("expected [a, b]");
      g.compact_support = std::pair{s[0], s[1]};
    }
    if (fl.has("level_set_nondegenerate")) {
      const Field w = fl["level_set_nondegenerate"];
      w.allow({"j_lo", "j_hi", "t0"});
      g.level_set_nondegenerate = LevelSetWindow{w.number("j_lo"), w.number("j_hi"), w.number("t0")};
    }
    if (fl.has("level_set_nondegenerate_near_0")) {
      g.level_set_nondegenerate_near_0 = fl.positive("level_set_nondegenerate_near_0");
    }
  }
  guarded(f, [&] {
    validate_g_flags(g);
    return 0;
  });
  desc["name"] = g.name;
  return g;
}

YProcessSpec build_y(const Field& f, const ParseContext& ctx, nlohmann::json& desc) {
  const std::string kind = f.text("kind", "identity");
  desc["kind"] = kind;
  if (kind == "identity") {
    f.allow({"kind"});
    return YProcessSpec::identity();
  }
  if (kind == "subordinator") {
    f.allow({"kind", "process"});
    const LevyTriplet1D t = build_process(f.required("process"), ctx, desc["process"]);
    return guarded(f, [&] { return YProcessSpec::make_subordinator(t); });
  }
  if (kind == "deterministic") {
    f.allow({"kind", "law", "c", "p"});
    const std::string law = f.text("law", "linear");
    if (law == "linear") {
      const double c = f.positive("c", 1.0);
      return YProcessSpec::deterministic([c](double) { return c; }, "deterministic:" + std::to_string(c) + "t");
    }
    if (law == "power") {
      const double p = f.positive("p");
      auto y = YProcessSpec::deterministic(
          [p](double s) { return s > 0.0 ? p * std::pow(s, p - 1.0) : (p < 1.0 ? kInf : (p == 1.0 ? 1.0 : 0.0)); },
          "deterministic:t^" + std::to_string(p));
      return y;
    }
    f["law"].fail("unknown deterministic law '" + law + "' (linear, power)");
  }
  f["kind"].fail("unknown Y kind '" + kind + "' (identity, subordinator, deterministic)");
}

KsAnalysis build_ks(const Field& f) {
  f.allow({"oracle", "sigma2", "mu", "rate", "upper", "a", "b", "mean", "sd", "below"});
  KsAnalysis ks;
  ks.oracle = f.text("oracle");
  ks.cdf = guarded(f, [&]() -> std::function<double(double)> {
    if (ks.oracle == "dufresne") {
      ks.params = {{"sigma2", f.number("sigma2")}, {"mu", f.number("mu")}};
      return oracle::dufresne(f.number("sigma2"), f.number("mu"));
    }
    if (ks.oracle == "truncated_exponential") {
      ks.params = {{"rate", f.number("rate")}, {"upper", f.number("upper")}};
      return oracle::truncated_exponential(f.positive("rate"), f.positive("upper"));
    }
    if (ks.oracle == "exponential") {
      ks.params = {{"rate", f.number("rate")}};
      return oracle::exponential(f.positive("rate"));
    }
    if (ks.oracle == "uniform") {
      ks.params = {{"a", f.number("a")}, {"b", f.number("b")}};
      return oracle::uniform(f.number("a"), f.number("b"));
    }
    if (ks.oracle == "normal") {
      ks.params = {{"mean", f.number("mean")}, {"sd", f.number("sd")}};
      return oracle::normal(f.number("mean"), f.positive("sd"));
    }
    f["oracle"].fail("unknown oracle '" + ks.oracle +
                     "' (dufresne, truncated_exponential, exponential, uniform, normal)");
  });
  if (f.has("below")) ks.below = f.number("below");
  return ks;
}

void read_sampler(const Field& f, Experiment& e) {
  f.allow({"n", "seed", "epsilon", "tail_tolerance", "min_horizon", "max_horizon", "max_step",
           "margin_factor", "extra_time", "gaussian_proxy", "force"});
  e.n = f.count("n", e.n);
  e.seed = f.count("seed", e.seed);
  HorizonPolicy& p = e.policy;
  p.epsilon = f.positive("epsilon", p.epsilon);
  p.tail_tolerance = f.positive("tail_tolerance", p.tail_tolerance);
  p.min_horizon = f.number("min_horizon", p.min_horizon);
  p.max_horizon = f.positive("max_horizon", p.max_horizon);
  p.max_step = f.positive("max_step", p.max_step);
  p.margin_factor = f.positive("margin_factor", p.margin_factor);
  p.extra_time = f.number("extra_time", p.extra_time);
  p.gaussian_proxy = f.boolean("gaussian_proxy", p.gaussian_proxy);
  e.force = f.boolean("force", false);
}

void read_analyses(const Field& f, Experiment& e) {
  f.allow({"classify", "atoms", "ks", "fixed_point"});
  e.classify = f.boolean("classify", true);
  if (f.has("atoms")) {
    const Field a = f["atoms"];
    if (a.node.IsScalar()) {
      e.atoms = a.boolean();
    } else {
      a.allow({"resolution"});
      e.resolution = a.positive("resolution");
    }
  }
  if (f.has("ks")) e.ks = build_ks(f["ks"]);
  if (f.has("fixed_point")) {
    const Field fp = f["fixed_point"];
    fp.allow({"t", "n"});
    FixedPointAnalysis a;
    a.times = fp.required("t").numbers();
    for (double t : a.times) {
      if (!(t >= 0.0)) fp["t"].fail("times must be non-negative");
    }
    a.n = fp.count("n", a.n);
    e.fixed_point = a;
  }
}

}  // namespace

Experiment load_experiment(const std::filesystem::path& file, const ParseContext& ctx) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(file.string());
  } catch (const YAML::BadFile&) {
    throw SchemaError(0, "", "cannot read " + file.string());
  } catch (const YAML::ParserException& e) {
    throw SchemaError(e.mark.line + 1, "", e.msg);
  }
  const Field top{root, "", 1};
  if (!root.IsMap()) top.fail("an experiment file is a table at the top level");
  top.allow({"name", "functional", "pair", "xi", "g", "y", "sampler", "analyses", "output", "description"});

  Experiment e;
  e.name = top.text("name", file.stem().string());
  e.functional = top.text("functional");
  e.description["name"] = e.name;
  e.description["functional"] = e.functional;
  if (e.functional == "exponential") {
    e.pair = build_pair(top.required("pair"), ctx, e.description["pair"]);
    if (top.has("xi") || top.has("g") || top.has("y")) top.fail("xi, g and y belong to g_integral experiments");
  } else if (e.functional == "g_integral") {
    e.xi = build_process(top.required("xi"), ctx, e.description["xi"]);
    e.g = build_g(top.required("g"), e.description["g"]);
    e.y = top.has("y") ? build_y(top["y"], ctx, e.description["y"]) : YProcessSpec::identity();
    if (!top.has("y")) e.description["y"]["kind"] = "identity";
    if (top.has("pair")) top["pair"].fail("pair belongs to exponential experiments");
  } else {
    top["functional"].fail("expected 'exponential' or 'g_integral'");
  }
  if (top.has("sampler")) read_sampler(top["sampler"], e);
  if (top.has("analyses")) read_analyses(top["analyses"], e);
  if (top.has("output")) {
    const Field o = top["output"];
    o.allow({"dir"});
    e.output_dir = o.text("dir", "");
  }
  if (e.output_dir.empty()) e.output_dir = "out/" + e.name;
  return e;
}

std::vector<std::string> user_densities(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  std::error_code ec;
  if (dir.empty() || !std::filesystem::is_directory(dir, ec)) return names;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") {
      names.push_back(entry.path().stem().string());
    }
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::string catalogue_listing(const std::filesystem::path& user_dir) {
  std::ostringstream os;
  os << "processes:\n"
        "  drift              deterministic drift (drift)\n"
        "  brownian_drift     sigma B_t + mu t (sigma2, mu)\n"
        "  cpp                compound Poisson (rate, jumps: point|uniform|exponential)\n"
        "  stable_tail_alpha  density c x^{-1-alpha} on one half-line (alpha, c, sign)\n"
        "  levy               sum of jump components with gamma or drift and sigma2\n";
  for (const auto& name : user_densities(user_dir)) {
    os << "  tabulated:" << name << "  user density from " << (user_dir / (name + ".csv")).string() << '\n';
  }
  os << "pairs:\n"
        "  independent        xi and eta with independent jumps (xi, eta, rho)\n"
        "  curve_degenerate   xi built from eta so that I is constant (eta, k)\n"
        "  joint              explicit joint atoms (gamma1, gamma2, sigma, atoms)\n"
        "g functions:\n"
        "  indicator          1 on [a, b]\n"
        "  bump               smooth bump (centre, radius)\n"
        "  ramp               (x - a)/(b - a) on [a, b]\n"
        "  gaussian           exp(-x^2 / 2 s^2)\n"
        "  constant           c\n"
        "  zero               0\n"
        "Y processes:\n"
        "  identity           Y_t = t\n"
        "  subordinator       independent subordinator (process)\n"
        "  deterministic      c t (law: linear) or t^p (law: power)\n"
        "oracles:\n"
        "  dufresne           law of int exp(-(sigma B_s + mu s)) ds (sigma2, mu)\n"
        "  truncated_exponential  Exp(rate) conditioned below upper\n"
        "  exponential        Exp(rate)\n"
        "  uniform            U(a, b)\n"
        "  normal             N(mean, sd^2)\n";
  return os.str();
}

}  // namespace lexfun::cli
