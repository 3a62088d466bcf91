#include "qghjm/pricing.hpp"

#include <cmath>
#include <vector>

#include "qghjm/errors.hpp"

namespace qghjm {

namespace {

constexpr double kUnderflowExponent = -745.0;

}  // namespace

double DiscountCurve::operator()(double T) const { return std::exp(-curve_.integral(T)); }

double g_factor(double t, double T, double beta) {
  const double tau = T - t;
  if (beta == 0.0) return tau;
  return -std::expm1(-beta * tau) / beta;
}

double zcb_price(double t, double T, double x, double y, const ModelParams& p,
                 const DiscountCurve& dc) {
  const double g = g_factor(t, T, p.beta);
  const auto& fc = dc.forward();
  const double exponent = -(fc.integral(T) - fc.integral(t)) - g * x - 0.5 * g * g * y;
  if (exponent < kUnderflowExponent) return 0.0;
  return std::exp(exponent);
}

double libor(double t, double T2, double zcb) {
  if (!(zcb > 0.0)) throw CollapsedBond("bond price collapsed to zero; LIBOR is unbounded");
  if (!(T2 > t)) throw DomainError("libor needs T2 > t");
  return (1.0 / zcb - 1.0) / (T2 - t);
}

McEstimate eurodollar_futures(const ModelParams& p, const ForwardCurve& curve,
                              const SimConfig& cfg, double T, double delta, Execution ex) {
  if (!(delta > 0.0) || !(T > 0.0)) throw ConfigError("futures need T > 0 and delta > 0");
  if (T + delta > cfg.horizon * (1.0 + 1e-12)) {
    throw ConfigError("futures need T + delta <= horizon");
  }
  SimConfig to_T = cfg;
  to_T.horizon = T;
  const DiscountCurve dc(curve);
  const double ratio = dc(T) / dc(T + delta);
  const double g = g_factor(T, T + delta, p.beta);
  const double lambda_T = curve.value(T);
  const Payoff payoff = [=](const State& s) {
    return ratio * std::exp(g * (s.r - lambda_T) + 0.5 * g * g * s.y);
  };
  return expectation_functional(p, curve, to_T, payoff, OnExplosion::Diverge, ex);
}

McEstimate discount_consistency_check(const ModelParams& p, const ForwardCurve& curve,
                                      const SimConfig& cfg, double T, Execution ex) {
  if (T < 0.0 || T > cfg.horizon * (1.0 + 1e-12)) {
    throw ConfigError("discount check needs 0 <= T <= horizon");
  }
  if (T == 0.0) return {1.0, 0.0, cfg.n_paths, 0, false};
  SimConfig to_T = cfg;
  to_T.horizon = T;
  to_T.validate(p);
  const PathKernel kernel(p, curve, to_T);

  std::vector<double> values(to_T.n_paths);
  std::vector<char> exploded(to_T.n_paths, 0);
  for_each_index(to_T.n_paths, ex, [&](std::size_t i) {
    double integral = 0.0;
    double r_prev = 0.0;
    double t_prev = 0.0;
    const auto out = kernel.run(i, [&](std::size_t k, const State& s) {
      if (k > 0) integral += r_prev * (s.t - t_prev);
      r_prev = s.r;
      t_prev = s.t;
    });
    exploded[i] = out.exploded ? 1 : 0;
    values[i] = out.exploded ? 0.0 : std::exp(-integral);
  });
  const std::vector<char> all(values.size(), 1);
  McEstimate est = summarize(values, all);
  for (const char e : exploded) est.n_exploded += static_cast<std::size_t>(e);
  return est;
}

}  // namespace qghjm
