#pragma once

#include "qghjm/forward_curve.hpp"
#include "qghjm/model.hpp"
#include "qghjm/parallel.hpp"
#include "qghjm/sde_engine.hpp"

namespace qghjm {

/// Initial discount curve P(0, T) = exp(-int_0^T lambda(s) ds).
class DiscountCurve {
 public:
  explicit DiscountCurve(ForwardCurve curve) : curve_(std::move(curve)) {}

  double operator()(double T) const;
  const ForwardCurve& forward() const { return curve_; }

 private:
  ForwardCurve curve_;
};

/// G(t, T) = (1 - exp(-beta (T - t))) / beta, and T - t at beta = 0.
double g_factor(double t, double T, double beta);

/// Bond price from the state, x = r - lambda(t):
///   P(0,T)/P(0,t) exp(-G x - G^2 y / 2).
/// Returns exactly 0 once the exponent drops below -745.
double zcb_price(double t, double T, double x, double y, const ModelParams& p,
                 const DiscountCurve& dc);

/// Simple-compounding rate (1/zcb - 1)/(T2 - t). CollapsedBond for zcb == 0.
double libor(double t, double T2, double zcb);

/// Monte Carlo estimate of E[1/P(T, T + delta)], simulated to T. Any path
/// exploding before T sets `diverged`.
McEstimate eurodollar_futures(const ModelParams& p, const ForwardCurve& curve,
                              const SimConfig& cfg, double T, double delta,
                              Execution ex = Execution::Parallel);

/// Monte Carlo mean of exp(-sum_k r_k h_k) up to T (left Riemann sum).
/// Exploded paths contribute 0 and are counted in n_exploded.
McEstimate discount_consistency_check(const ModelParams& p, const ForwardCurve& curve,
                                      const SimConfig& cfg, double T,
                                      Execution ex = Execution::Parallel);

}  // namespace qghjm
