#pragma once

#include <cstddef>
#include <vector>

#include "qghjm/forward_curve.hpp"
#include "qghjm/model.hpp"

namespace qghjm {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  /// r level at which the solution is declared exploded.
  double blowup_level = 1e10;
  /// Lower crossing level used with blowup_level to extrapolate t_exp.
  double check_level = 1e8;
  /// Adaptive step below collapse_factor * horizon also counts as blow-up.
  double collapse_factor = 1e-12;
  std::size_t trace_points = 1000;
};

struct OdeResult {
  bool exploded = false;
  /// Extrapolated blow-up time, +inf if the solution stays finite.
  double t_exp = 0.0;
  /// Times at which r crossed check_level and blowup_level (+inf if not).
  double t_check = 0.0;
  double t_blowup = 0.0;
  bool step_collapsed = false;
  State terminal;  ///< state at the horizon if not exploded
  std::vector<State> trace;
};

/// Small-noise limit of the log-normal model,
///   r' = y - beta r + beta lambda(t) + lambda'(t),  y' = sigma^2 r^2 - 2 beta y,
/// from (lambda(0), 0). Near blow-up r ~ c (t_exp - t)^-2, so the crossing
/// time of level X behaves as t_exp - k X^(-1/2); t_exp is extrapolated from
/// the two crossings.
///
/// Throws UnsupportedGamma unless gamma == 1.
OdeResult ode_integrate(const ModelParams& p, const ForwardCurve& curve, double horizon,
                        const OdeOptions& opts = {});

OdeResult ode_integrate(const ModelParams& p, const ForwardCurve& curve, double horizon,
                        double tol);

/// sigma sqrt(2 lambda0): the flat-curve limit explodes iff beta < beta_C.
double beta_critical(const ModelParams& p);

/// Long-run short rate (beta^2/sigma^2)(1 - sqrt(1 - 2 sigma^2 lambda0 / beta^2))
/// for beta >= beta_C. DomainError below beta_C.
double fixed_point_r(const ModelParams& p);

/// Matching stationary y = sigma^2 r^2 / (2 beta).
double fixed_point_y(const ModelParams& p);

}  // namespace qghjm
