#pragma once

#include <concepts>
#include <optional>

#include "qghjm/forward_curve.hpp"

namespace qghjm {

/// Constants of the one-factor quasi-Gaussian model with eps-CEV short-rate
/// volatility sigma_r(x) = sigma x min(x^(gamma-1), eps^(gamma-1)).
///
/// Units: time in years, rates as decimals (0.1 = 10%).
struct ModelParams {
  double sigma = 0.2;
  double beta = 0.0;     ///< mean reversion, 1/year
  double gamma = 1.0;    ///< CEV exponent in (0, 1]
  double epsilon = 0.01; ///< CEV cutoff level
  double lambda0 = 0.1;  ///< initial (flat) forward rate r0 = lambda(0)
  double displacement = 0.0;
  std::optional<double> vol_cap;

  /// Throws ConfigError naming the first violated invariant.
  void validate() const;
};

/// Simulated Markov state. `y` is the convexity state, always >= 0.
struct State {
  double r = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Short-rate volatility with cached eps^(gamma-1). Evaluated on the
/// displaced argument x + a; returns 0 for x + a <= 0 (full truncation) and
/// applies the optional cap as min{max{0, v}, c}.
class EpsCevVolatility {
 public:
  explicit EpsCevVolatility(const ModelParams& p);
  double operator()(double x) const;

 private:
  double sigma_;
  double gamma_;
  double eps_;
  double eps_pow_;  // eps^(gamma - 1)
  double shift_;
  double cap_;
  bool lognormal_;
};

double sigma_r(double x, const ModelParams& p);

struct Drift {
  double dr_dt = 0.0;
  double dy_dt = 0.0;
};

/// dr/dt = y - beta r + beta lambda(t) + lambda'(t), dy/dt = sigma_r(r)^2 - 2 beta y.
Drift drift(const State& s, const ModelParams& p, const ForwardCurve& curve);

/// Diffusion coefficient of r; y carries no noise.
double diffusion(const State& s, const ModelParams& p);

/// Analytic first/second partials of a scalar field V(r, y).
struct FieldPartials {
  double d_r = 0.0;
  double d_rr = 0.0;
  double d_y = 0.0;
};

template <class F>
concept ScalarField = requires(const F& f, double r, double y) {
  { f.partials(r, y) } -> std::convertible_to<FieldPartials>;
};

/// Infinitesimal generator of the time-homogeneous (flat curve, r0 = lambda0)
/// diffusion applied to V through its partials:
///   (sigma_r^2 - 2 beta y) V_y + (y - beta r + beta r0) V_r + 1/2 sigma_r^2 V_rr.
double generator_apply(const FieldPartials& v, const State& s, const ModelParams& p);

template <ScalarField F>
double generator_apply(const F& field, const State& s, const ModelParams& p) {
  return generator_apply(field.partials(s.r, s.y), s, p);
}

}  // namespace qghjm
