#pragma once

// Sufficient conditions for finite-time explosion of the eps-CEV (r, y)
// diffusion with gamma in (1/2, 1], the explicit Lyapunov function
//   V(r, y) = C1 - C2 (1 + y)^-d1 - C3 (1 + r)^-d2,   (1 + d1)(1 + d2) = 2 gamma,
// that certifies them on the exterior of D = (0, R)^2, and the r0 threshold
// above which explosion is almost sure.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "qghjm/model.hpp"
#include "qghjm/parallel.hpp"

namespace qghjm {

/// Exponents of V tied by (1 + delta1)(1 + delta2) = 2 gamma.
struct DeltaPair {
  double delta1 = 0.0;
  double delta2 = 0.0;
  double gamma = 1.0;

  /// delta1 = 2 gamma / (1 + delta2) - 1. DomainError unless both are > 0.
  static DeltaPair from_delta2(double delta2, double gamma);
};

enum class Condition { I, II };

/// Standard uses 2 beta in the growth coefficient; Widened uses
/// max{2 d1, d2} beta, which can only enlarge the admissible region.
enum class CoefficientMode { Standard, Widened };

/// 2 beta + sigma^2 d2 (d2 + 1) / 2, or its widened form.
double growth_coefficient(const ModelParams& p, const DeltaPair& d,
                          CoefficientMode mode = CoefficientMode::Standard);

struct ScanSpec {
  std::size_t n_delta2 = 400;
  double delta2_min = 1e-4;
  std::size_t n_radius = 400;
  double radius_max = 1e4;
  CoefficientMode mode = CoefficientMode::Standard;
};

/// Log-uniform delta2 points strictly inside (delta2_min, 2 gamma - 1).
std::vector<double> delta2_scan_grid(double gamma, const ScanSpec& scan);

struct ConditionReport {
  Condition condition = Condition::II;
  bool satisfied = false;
  double witness_R = 0.0;
  DeltaPair witness_deltas;
  /// Largest value found of F (condition I) or G - coefficient (II).
  double sup_value = 0.0;
  CoefficientMode mode = CoefficientMode::Standard;
};

double condition_F(double R, const ModelParams& p, const DeltaPair& d,
                   CoefficientMode mode = CoefficientMode::Standard);

/// G(R) = d2 R / (1 + R)^(d2 + 1), maximal at R = 1/d2.
double condition_G(double R, const DeltaPair& d);

/// Scans delta2 (and R for condition I, using R = 1/delta2 for II).
/// Condition I requires sup F > 0, condition II sup (G - coefficient) >= 0.
/// Throws GammaOutOfRange for gamma <= 1/2.
ConditionReport check_condition(const ModelParams& p, Condition which, const ScanSpec& scan = {});

struct Delta2Star {
  double delta2_star = 0.0;
  double objective = 0.0;
};

/// argmax over [0, 2 gamma - 1] of G(1/d2) - sigma^2 d2 (d2 + 1) / 2, ties
/// resolved toward the larger delta2.
Delta2Star delta2_star(double sigma, double gamma);

/// Largest beta allowed by condition II, max{0, objective(delta2_star) / 2}.
double beta_max(double sigma, double gamma);

struct RegionPoint {
  double sigma = 0.0;
  double beta_max = 0.0;
  double delta2_star = 0.0;
};

struct RegionCurve {
  double gamma = 1.0;
  std::vector<RegionPoint> points;
};

RegionCurve region_curve(double gamma, std::span<const double> sigma_grid,
                         Execution ex = Execution::Parallel);

/// (d1 + 2)(d1 + 1)^(-(d1 + 1)/(d1 + 2)).
double kappa_delta(double delta1);

/// Closed-form infimum over x > 0 of a x^(d1 + 1) + b / x.
double min_F_hat(double a, double b, double delta1);

struct Kappas {
  double kappa1 = 0.0;
  double kappa2 = 0.0;
};

Kappas kappas(double R, const ModelParams& p, const DeltaPair& d,
              CoefficientMode mode = CoefficientMode::Standard);

/// Interval of admissible slopes b/a.
struct SlopeInterval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Cones of (a, b) in which the scaled Lyapunov inequality
///   k1 a + k2 b <= min{kd a^e1 b^e2, a R^(2g-d1-1), b R^-d2}
/// holds. Region 1: b/a in [R^(d2(d1+2)), (R^(2g-d1-1) - k1)/k2].
/// Region 2: b/a in [k1/(R^-d2 - k2), R^(d2(d1+2))] when R^-d2 > k2; the
/// linear bound from k1 a + k2 b <= b R^-d2 is a lower bound on b/a. Both
/// regions are non-empty exactly when F(R) >= 0, and then they share the
/// dividing slope, so their union is one interval.
/// `kind` reports Region1 whenever it is non-empty, even if both are.
struct Wedge {
  enum class Kind { Empty, Region1, Region2 };
  Kind kind = Kind::Empty;
  std::optional<SlopeInterval> region1;
  std::optional<SlopeInterval> region2;

  bool empty() const { return kind == Kind::Empty; }
  /// True iff b/a lies in one of the regions.
  bool contains(double slope) const;
};

Wedge wedge_feasible_slopes(double R, const ModelParams& p, const DeltaPair& d,
                            CoefficientMode mode = CoefficientMode::Standard);

struct LyapunovSpec {
  /// Wedge: (a, b) from wedge_feasible_slopes. Search: maximin of the grid
  /// slack over (d2, R, C3/C2), used when the wedge at the witness is empty.
  enum class Construction { Wedge, Search };

  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  DeltaPair deltas;
  double R = 0.0;
  double C = 0.0;
  /// Slope b/a picked inside the wedge (a = 1).
  double slope = 0.0;
  Construction construction = Construction::Wedge;

  double value(double r, double y) const;
  FieldPartials partials(double r, double y) const;
  /// sup of V on the boundary of D.
  double k2() const;
  /// inf of V on [2R, inf)^2.
  double k3() const;
};

/// Turns a satisfied report into explicit constants. If the wedge at the
/// witness is non-empty, (a, b) = (1, s) with s the geometric midpoint of its
/// slope interval; otherwise (d2, R, C3/C2) maximize the smallest normalized
/// slack (L V - C V)/C1 on a coarse exterior grid. C1 = C2 + C3 and
/// C = max{2 d1, d2} beta + sigma^2 d2 (d2 + 1) / 2 in both cases.
/// Throws InfeasibleWedge if neither route gives a positive slack.
LyapunovSpec build_lyapunov(const ModelParams& p, const ConditionReport& report);

struct VerifyGrid {
  std::size_t n = 200;            ///< log-spaced points per axis
  double extent_factor = 10.0;    ///< grid covers (0, extent_factor * R]^2
  double lower_factor = 1e-8;     ///< smallest coordinate, relative to R
  std::size_t n_face = 100;       ///< extra points along each face of D
  double face_offset = 1e-6;      ///< relative distance of those points from D
  double tolerance = 1e-12;       ///< slack below -tolerance is a violation
};

struct SlackReport {
  double min_slack = 0.0;
  double min_r = 0.0;  ///< location of the minimum (lowest index on ties)
  double min_y = 0.0;
  std::size_t violations = 0;
  std::size_t n_points = 0;
};

/// Grid points of the exterior of D = (0, R)^2 used by the verifier.
std::vector<State> exterior_grid(double R, const VerifyGrid& grid);

/// Evaluates L V - C V on exterior_grid(spec.R, grid).
SlackReport verify_generator_inequality(const LyapunovSpec& spec, const ModelParams& p,
                                        const VerifyGrid& grid = {},
                                        Execution ex = Execution::Parallel);

/// Closed-form lower bound of L V - C V on [R, inf)^2:
/// kappa_delta a^(1/(d1+2)) b^((d1+1)/(d1+2)) - C C1.
double corner_slack_bound(const LyapunovSpec& spec, const ModelParams& p);

/// inf of V on the exterior of D.
double k0(const LyapunovSpec& spec);

struct R0Threshold {
  double log_value = 0.0;
  double value = 0.0;  ///< +inf when overflow is set
  bool overflow = false;
};

/// max{ (e/beta)(4 beta R + beta + sigma^2),
///      (sigma^2/beta) exp(e^(2R)/sigma^2 (4 beta R + beta + sigma^2) - 2R - 1) },
/// evaluated in log space. DomainError for beta == 0.
R0Threshold as_explosion_r0_threshold(double R, const ModelParams& p);

struct A5Report {
  double max_value = 0.0;
  double max_r = 0.0;
  double max_y = 0.0;
  std::size_t violations = 0;  ///< points with L V0 >= 0
  std::size_t n_points = 0;
  bool negative() const { return violations == 0; }
};

/// Evaluates L V0 for V0 = exp(-r) + exp(-y) on a log grid over
/// {0 < r < 2R or 0 < y < 2R} truncated at extent_factor * 2R, with
/// r0 = p.lambda0.
A5Report verify_a5_function(const ModelParams& p, double R, const VerifyGrid& grid = {},
                            Execution ex = Execution::Parallel);

}  // namespace qghjm
