#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lexfun/levy_measure.hpp"

namespace lexfun {

/// (gamma, sigma^2, Pi) with the truncation 1{|z| <= 1}.
class LevyTriplet1D {
 public:
  LevyTriplet1D(double gamma, double sigma2, LevyMeasure1D measure);

  double gamma() const { return gamma_; }
  double sigma2() const { return sigma2_; }
  const LevyMeasure1D& measure() const { return measure_; }
  /// gamma - int_{|z|<=1} z Pi(dz); only for finite variation small jumps.
  const std::optional<double>& drift_bv() const { return drift_bv_; }

  /// Drift left after removing jumps with |z| > eps and replacing the rest
  /// by their mean.
  double cutoff_drift(double eps) const;

 private:
  double gamma_;
  double sigma2_;
  LevyMeasure1D measure_;
  std::optional<double> drift_bv_;
};

/// gamma - int_{eps<|z|<=1} z Pi(dz) (or + int_{1<|z|<=eps} for eps > 1).
double cutoff_drift(double gamma, const LevyMeasure1D& measure, double eps);

struct Covariance2 {
  double s11 = 0.0;
  double s12 = 0.0;
  double s22 = 0.0;
};

/// Jump norms used to carve out bands of the plane.
enum class JumpNorm { AbsX, AbsY, Euclid, Max };

/// lo < norm(x, y) <= hi. lo < 0 means "no lower bound".
struct BandCondition {
  JumpNorm norm = JumpNorm::Euclid;
  double lo = -kInf;
  double hi = kInf;
};
using JointBand = std::vector<BandCondition>;

double jump_norm(JumpNorm norm, double x, double y);

/// A one-parameter family of joint jumps u -> (x(u), y(u)) with both |x| and
/// |y| non-decreasing in |u| on each side of 0.
struct JumpCurve {
  std::function<std::pair<double, double>(double)> at;

  static JumpCurve x_axis();
  static JumpCurve y_axis();
  /// u -> (u, k(1 - e^{-u})).
  static JumpCurve exponential(double k);

  /// sup{ u >= 0 : norm(at(side * u)) <= c }, possibly inf.
  double threshold(JumpNorm norm, int side, double c) const;
  /// Region of u whose image lies in the band.
  Region band_region(const JointBand& band) const;
  bool in_band(double u, const JointBand& band) const;
};

struct ProductIndependent {
  LevyMeasure1D xi;
  LevyMeasure1D eta;
};
struct JointAtom {
  double x = 0.0;
  double y = 0.0;
  double mass = 0.0;
};
struct JointAtoms {
  std::vector<JointAtom> atoms;
};
struct CurveSupported {
  double k = 1.0;
  LevyMeasure1D base;
};

/// Bivariate Levy measure in one of three structured forms.
class LevyMeasure2D {
 public:
  using Representation = std::variant<ProductIndependent, JointAtoms, CurveSupported>;

  LevyMeasure2D();
  explicit LevyMeasure2D(Representation rep);

  const Representation& representation() const { return rep_; }
  const LevyMeasure1D& xi_marginal() const { return xi_marginal_; }
  const LevyMeasure1D& eta_marginal() const { return eta_marginal_; }
  bool empty() const { return xi_marginal_.empty() && eta_marginal_.empty(); }

  double integrate(const std::function<double(double, double)>& f, const JointBand& band,
                   const QuadratureOptions& opts = {}) const;
  double mass(const JointBand& band) const;

  /// Representative joint support points.
  std::vector<std::pair<double, double>> probe_points() const;

 private:
  Representation rep_;
  LevyMeasure1D xi_marginal_;
  LevyMeasure1D eta_marginal_;
};

/// Bivariate triplet with the Euclidean truncation 1{|(x, y)| <= 1}.
class LevyTriplet2D {
 public:
  LevyTriplet2D(double gamma1, double gamma2, Covariance2 sigma, LevyMeasure2D measure);

  double gamma1() const { return gamma1_; }
  double gamma2() const { return gamma2_; }
  const Covariance2& sigma() const { return sigma_; }
  const LevyMeasure2D& measure() const { return measure_; }

  LevyTriplet1D marginal_xi() const;
  LevyTriplet1D marginal_eta() const;

 private:
  double gamma1_;
  double gamma2_;
  Covariance2 sigma_;
  LevyMeasure2D measure_;
};

/// 1 + int_1^y Pi_xi((z, inf)) dz.
double a_xi(const LevyTriplet1D& triplet, double y);

std::pair<LevyMeasure1D, LevyMeasure1D> marginal_tails(const LevyMeasure2D& measure);

/// Map y -> -log(1 - y / k) and its inverse x -> k (1 - e^{-x}).
MonotoneMap doleans_jump_map(double k);

/// int_{|(x,y)| <= 1} (e^{-x} - 1 + x) over the joint measure.
double doleans_claim_integral(const LevyMeasure2D& measure);

/// Bivariate triplet of (xi, eta) with e^{-xi} = E(-eta / k).
LevyTriplet2D doleans_xi_from_eta(const LevyTriplet1D& eta, double k);

}  // namespace lexfun
