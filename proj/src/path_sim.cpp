#include "lexfun/path_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <ostream>
#include <sstream>

#include "lexfun/errors.hpp"

namespace lexfun {

std::mt19937_64 RngStream::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream_id),
                    static_cast<std::uint32_t>(stream_id >> 32), 0x6c657866u};
  return std::mt19937_64(seq);
}

RngStream RngStream::derived(std::uint64_t salt) const {
  return RngStream{seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1)), stream_id};
}

namespace {

double uniform01(std::mt19937_64& eng) { return std::generate_canonical<double, 53>(eng); }

// Outer-mass inversion for a density piece without a closed form. Works in
// |x| coordinates: `near` is the end closer to the origin.
class OuterMassTable {
 public:
  OuterMassTable(RealFn abs_density, double near, double far, double total)
      : density_(std::move(abs_density)), far_(far) {
    constexpr int kCells = 128;
    const double end = std::isinf(far) ? finite_end(near, total) : far;
    const bool geometric = near > 0.0 && end / near > 50.0;
    for (int j = 0; j <= kCells; ++j) {
      const double s = static_cast<double>(j) / kCells;
      grid_.push_back(geometric ? near * std::pow(end / near, s) : near + s * (end - near));
    }
    grid_.back() = end;
    outer_.assign(grid_.size(), 0.0);
    const double tail = std::isinf(far) ? integrate_positive_half_line(density_, end, far) : 0.0;
    outer_.back() = tail;
    for (int j = kCells - 1; j >= 0; --j) {
      outer_[j] = outer_[j + 1] + integrate_finite(density_, grid_[j], grid_[j + 1]);
    }
  }

  double locate(double m) const {
    if (m <= outer_.back()) {
      // Beyond the tabulated range: bracket outward and bisect on the exact tail.
      double a = grid_.back();
      double b = 2.0 * a;
      auto outer_at = [&](double u) { return integrate_positive_half_line(density_, u, far_); };
      while (outer_at(b) > m) {
        a = b;
        b *= 2.0;
      }
      return bisect([&](double u) { return outer_at(u) - m; }, a, b, 80);
    }
    // outer_ is non-increasing; find the cell with outer_[j] >= m > outer_[j+1].
    auto it = std::upper_bound(outer_.begin(), outer_.end(), m, std::greater<>());
    std::size_t j1 = static_cast<std::size_t>(it - outer_.begin());
    j1 = std::clamp<std::size_t>(j1, 1, grid_.size() - 1);
    const std::size_t j0 = j1 - 1;
    const double base = outer_[j1];
    auto g = [&](double u) { return base + gauss_legendre16(density_, u, grid_[j1]) - m; };
    double lo = grid_[j0];
    double hi = grid_[j1];
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) > 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  }

 private:
  double finite_end(double near, double total) const {
    double end = std::max(2.0 * near, 1.0);
    while (integrate_positive_half_line(density_, end, kInf) > 1e-13 * total) end *= 2.0;
    return end;
  }

  RealFn density_;
  double far_;
  std::vector<double> grid_;
  std::vector<double> outer_;
};

}  // namespace

JumpSampler::JumpSampler(const LevyMeasure1D& measure, double cut_neg, double cut_pos) {
  auto add = [&](double mass, std::function<double(double)> inv) {
    if (!(mass > 0.0)) return;
    if (!std::isfinite(mass)) {
      throw DomainError("jump sampler: retained jumps have infinite mass; raise epsilon");
    }
    pieces_.push_back({mass, std::move(inv)});
  };
  auto retained = [&](double x) { return x > cut_pos || x < -cut_neg; };

  for (const Atom& a : measure.atoms()) {
    if (retained(a.location)) add(a.mass, [x = a.location](double) { return x; });
  }
  for (const DensitySegment& s : measure.segments()) {
    const bool pos = s.positive_side();
    const double lo = pos ? std::max(s.lo, cut_pos) : s.lo;
    const double hi = pos ? s.hi : std::min(s.hi, -cut_neg);
    if (!(lo < hi)) continue;
    const double m = s.mass ? s.mass(lo, hi)
                            : measure.integrate([](double) { return 1.0; },
                                                Region::between(lo, hi));
    if (s.outer_mass_inverse) {
      add(m, s.outer_mass_inverse);
    } else if (m > 0.0 && std::isfinite(m)) {
      const double sign = pos ? 1.0 : -1.0;
      const double near = pos ? lo : -hi;
      const double far = pos ? hi : -lo;
      auto table = std::make_shared<OuterMassTable>(
          [dens = s.density, sign](double u) { return dens(sign * u); }, near, far, m);
      add(m, [table, sign](double mm) { return sign * table->locate(mm); });
    } else {
      add(m, {});
    }
  }
  for (const AtomSeries& s : measure.series()) {
    for (std::size_t n = 1; n <= 100000; ++n) {
      const double mass = s.mass(n);
      if (!(mass > 1e-300)) break;
      const double l = s.log_abs_location(n);
      if (!(l < 709.0)) break;
      const double x = s.sign * std::exp(l);
      if (retained(x)) add(mass, [x](double) { return x; });
    }
  }
  double c = 0.0;
  for (const Piece& p : pieces_) {
    c += p.mass;
    cumulative_.push_back(c);
  }
  total_ = c;
}

double JumpSampler::draw(std::mt19937_64& rng) const {
  const double target = (1.0 - uniform01(rng)) * total_;
  auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t i = static_cast<std::size_t>(it - cumulative_.begin());
  if (i >= pieces_.size()) i = pieces_.size() - 1;
  const double before = i == 0 ? 0.0 : cumulative_[i - 1];
  const double m = std::clamp(target - before, std::numeric_limits<double>::min(), pieces_[i].mass);
  return pieces_[i].from_outer_mass(m);
}

// ---------------------------------------------------------------------------
// PathModel

namespace {

void symmetric_sqrt(PathModel& model) {
  const Covariance2& c = model.cov;
  const double det = std::max(0.0, c.s11 * c.s22 - c.s12 * c.s12);
  const double s = std::sqrt(det);
  const double t = std::sqrt(c.s11 + c.s22 + 2.0 * s);
  if (t == 0.0) return;
  model.r11 = (c.s11 + s) / t;
  model.r12 = c.s12 / t;
  model.r22 = (c.s22 + s) / t;
}

double effective_cut(const LevyMeasure1D& m, double epsilon) {
  if (m.activity() == Activity::Finite) return 0.0;
  if (!(epsilon > 0.0)) {
    throw DomainError("infinite-activity jumps need a positive epsilon cutoff");
  }
  return epsilon;
}

void add_source(PathModel& model, JumpSampler sampler,
                std::function<std::pair<double, double>(double)> to_joint) {
  if (!(sampler.rate() > 0.0)) return;
  const double rate = sampler.rate();
  model.sources.push_back(
      {rate, [s = std::move(sampler), f = std::move(to_joint)](std::mt19937_64& eng) {
         return f(s.draw(eng));
       }});
  model.total_rate += rate;
}

}  // namespace

PathModel PathModel::univariate(const LevyTriplet1D& triplet, double epsilon,
                                const SimulationOptions& opts) {
  PathModel model;
  const LevyMeasure1D& m = triplet.measure();
  const double cut = effective_cut(m, epsilon);
  model.epsilon = cut;
  model.max_step = opts.max_step;
  model.b1 = triplet.cutoff_drift(cut);
  model.cov.s11 = triplet.sigma2();
  if (opts.gaussian_proxy && cut > 0.0) {
    model.cov.s11 += m.integrate([](double x) { return x * x; }, Region::abs_at_most(cut));
  }
  add_source(model, JumpSampler(m, cut, cut), [](double x) { return std::pair{x, 0.0}; });
  symmetric_sqrt(model);
  return model;
}

PathModel PathModel::bivariate(const LevyTriplet2D& triplet, double epsilon,
                               const SimulationOptions& opts) {
  PathModel model;
  model.has_eta = true;
  model.max_step = opts.max_step;
  model.cov = triplet.sigma();
  const LevyMeasure2D& lm = triplet.measure();
  const auto& rep = lm.representation();

  if (const auto* p = std::get_if<ProductIndependent>(&rep)) {
    const double cx = effective_cut(p->xi, epsilon);
    const double cy = effective_cut(p->eta, epsilon);
    model.epsilon = std::max(cx, cy);
    model.b1 = cutoff_drift(triplet.gamma1(), p->xi, cx);
    model.b2 = cutoff_drift(triplet.gamma2(), p->eta, cy);
    if (opts.gaussian_proxy) {
      auto sq = [](double x) { return x * x; };
      if (cx > 0.0) model.cov.s11 += p->xi.integrate(sq, Region::abs_at_most(cx));
      if (cy > 0.0) model.cov.s22 += p->eta.integrate(sq, Region::abs_at_most(cy));
    }
    add_source(model, JumpSampler(p->xi, cx, cx), [](double x) { return std::pair{x, 0.0}; });
    add_source(model, JumpSampler(p->eta, cy, cy), [](double y) { return std::pair{0.0, y}; });
  } else {
    double cut = 0.0;
    if (const auto* c = std::get_if<CurveSupported>(&rep)) {
      cut = effective_cut(c->base, epsilon);
      const JumpCurve curve = JumpCurve::exponential(c->k);
      const double cut_pos = curve.threshold(JumpNorm::Max, 1, cut);
      const double cut_neg = curve.threshold(JumpNorm::Max, -1, cut);
      add_source(model, JumpSampler(c->base, cut_neg, cut_pos), curve.at);
    } else {
      const auto& j = std::get<JointAtoms>(rep);
      std::vector<Atom> idx;
      for (std::size_t i = 0; i < j.atoms.size(); ++i) {
        idx.push_back({static_cast<double>(i + 1), j.atoms[i].mass});
      }
      if (!idx.empty()) {
        auto atoms = j.atoms;
        add_source(model, JumpSampler(LevyMeasure1D(std::move(idx)), 0.0, 0.0),
                   [atoms](double i) {
                     const JointAtom& a = atoms[static_cast<std::size_t>(i) - 1];
                     return std::pair{a.x, a.y};
                   });
      }
    }
    model.epsilon = cut;
    const JointBand kept_small{{JumpNorm::Max, cut, kInf}, {JumpNorm::Euclid, -kInf, 1.0}};
    const JointBand dropped_big{{JumpNorm::Max, -kInf, cut}, {JumpNorm::Euclid, 1.0, kInf}};
    auto fx = [](double x, double) { return x; };
    auto fy = [](double, double y) { return y; };
    model.b1 = triplet.gamma1() - lm.integrate(fx, kept_small);
    model.b2 = triplet.gamma2() - lm.integrate(fy, kept_small);
    if (cut > 0.0) {
      model.b1 += lm.integrate(fx, dropped_big);
      model.b2 += lm.integrate(fy, dropped_big);
      if (opts.gaussian_proxy) {
        const JointBand dropped{{JumpNorm::Max, -kInf, cut}};
        model.cov.s11 += lm.integrate([](double x, double) { return x * x; }, dropped);
        model.cov.s12 += lm.integrate([](double x, double y) { return x * y; }, dropped);
        model.cov.s22 += lm.integrate([](double, double y) { return y * y; }, dropped);
      }
    }
  }
  symmetric_sqrt(model);
  return model;
}

// ---------------------------------------------------------------------------
// PathStepper

PathStepper::PathStepper(const PathModel& model, const RngStream& rng)
    : model_(&model), eng_(rng.engine()) {
  if (model.total_rate > 0.0) {
    next_jump_ = std::exponential_distribution<double>(model.total_rate)(eng_);
  }
}

PathStep PathStepper::advance(double t_stop) {
  const PathModel& m = *model_;
  PathStep s;
  s.t0 = t_;
  s.xi0 = xi_;
  s.eta0 = eta_;
  const double grid_next = t_ + m.max_step;
  if (next_jump_ <= t_stop && next_jump_ <= grid_next) {
    s.t1 = next_jump_;
    s.jump = true;
  } else {
    s.t1 = std::min(grid_next, t_stop);
  }
  const double h = s.t1 - s.t0;
  if (m.r11 != 0.0 || m.r12 != 0.0 || m.r22 != 0.0) {
    std::normal_distribution<double> normal;
    const double rh = std::sqrt(h);
    const double z1 = normal(eng_);
    const double z2 = (m.r12 != 0.0 || m.r22 != 0.0) ? normal(eng_) : 0.0;
    s.g1 = rh * (m.r11 * z1 + m.r12 * z2);
    s.g2 = rh * (m.r12 * z1 + m.r22 * z2);
  }
  s.dxi_c = m.b1 * h + s.g1;
  s.deta_c = m.b2 * h + s.g2;
  xi_ += s.dxi_c;
  eta_ += s.deta_c;
  if (s.jump) {
    double pick = uniform01(eng_) * m.total_rate;
    std::size_t i = 0;
    while (i + 1 < m.sources.size() && pick >= m.sources[i].rate) {
      pick -= m.sources[i].rate;
      ++i;
    }
    const auto [jx, jy] = m.sources[i].draw(eng_);
    s.jx = jx;
    s.jy = jy;
    xi_ += jx;
    eta_ += jy;
    next_jump_ = s.t1 + std::exponential_distribution<double>(m.total_rate)(eng_);
  }
  t_ = s.t1;
  return s;
}

// ---------------------------------------------------------------------------
// PathGrid

PathGrid simulate_model(const PathModel& model, double horizon, const RngStream& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("path horizon must be positive and finite");
  }
  PathGrid g;
  g.meta = {rng.seed, rng.stream_id, model.epsilon, horizon, model.b1, model.b2, model.cov};
  PathStepper stepper(model, rng);
  while (stepper.time() < horizon) {
    const PathStep s = stepper.advance(horizon);
    g.times.push_back(s.t1);
    g.xi_left.push_back(s.xi_left());
    g.xi.push_back(stepper.xi());
    if (model.has_eta) {
      g.eta_left.push_back(s.eta_left());
      g.eta.push_back(stepper.eta());
    }
    if (s.jump) {
      g.marks.emplace_back(JumpMark{s.jx, s.jy});
    } else {
      g.marks.emplace_back(std::nullopt);
    }
  }
  return g;
}

PathGrid simulate_path(const LevyTriplet1D& triplet, double horizon, double epsilon,
                       const RngStream& rng, const SimulationOptions& opts) {
  return simulate_model(PathModel::univariate(triplet, epsilon, opts), horizon, rng);
}

PathGrid simulate_bivariate(const LevyTriplet2D& triplet, double horizon, double epsilon,
                            const RngStream& rng, const SimulationOptions& opts) {
  return simulate_model(PathModel::bivariate(triplet, epsilon, opts), horizon, rng);
}

namespace {

void put(std::ostream& os, double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  os.write(buf, r.ptr - buf);
}

}  // namespace

void PathGrid::write_csv(std::ostream& os) const {
  os << "time,xi_left,xi,eta_left,eta,dxi,deta\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    put(os, times[i]);
    os << ',';
    put(os, xi_left[i]);
    os << ',';
    put(os, xi[i]);
    os << ',';
    if (has_eta()) put(os, eta_left[i]);
    os << ',';
    if (has_eta()) put(os, eta[i]);
    os << ',';
    if (marks[i]) put(os, marks[i]->dxi);
    os << ',';
    if (marks[i]) put(os, marks[i]->deta);
    os << '\n';
  }
}

}  // namespace lexfun
