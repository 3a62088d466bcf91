#include "qghjm/ode_limit.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <boost/numeric/odeint.hpp>

#include "qghjm/errors.hpp"

namespace qghjm {

namespace odeint = boost::numeric::odeint;

namespace {

using OdeState = std::array<double, 2>;

void check_inputs(const ModelParams& p, double horizon, const OdeOptions& opts) {
  if (p.gamma != 1.0) {
    throw UnsupportedGamma("the deterministic limit is only defined for gamma = 1");
  }
  if (!(p.sigma >= 0.0) || !(p.beta >= 0.0) || !(p.lambda0 > 0.0)) {
    throw ConfigError("ode_integrate needs sigma >= 0, beta >= 0, lambda0 > 0");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("ode horizon must be finite and > 0");
  }
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0)) {
    throw ConfigError("ode tolerances must be > 0");
  }
  if (!(opts.check_level < opts.blowup_level)) {
    throw ConfigError("check_level must be below blowup_level");
  }
}

}  // namespace

OdeResult ode_integrate(const ModelParams& p, const ForwardCurve& curve, double horizon,
                        double tol) {
  OdeOptions opts;
  opts.rel_tol = tol;
  return ode_integrate(p, curve, horizon, opts);
}

OdeResult ode_integrate(const ModelParams& p, const ForwardCurve& curve, double horizon,
                        const OdeOptions& opts) {
  check_inputs(p, horizon, opts);
  const double sigma2 = p.sigma * p.sigma;
  const double beta = p.beta;
  auto rhs = [&](const OdeState& x, OdeState& dxdt, double t) {
    dxdt[0] = x[1] - beta * x[0] + beta * curve.value(t) + curve.slope(t);
    dxdt[1] = sigma2 * x[0] * x[0] - 2.0 * beta * x[1];
  };

  constexpr double inf = std::numeric_limits<double>::infinity();
  OdeResult out;
  out.t_exp = inf;
  out.t_check = inf;
  out.t_blowup = inf;

  auto stepper =
      odeint::make_dense_output(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<OdeState>());
  const OdeState x0{curve.value(0.0), 0.0};
  stepper.initialize(x0, 0.0, std::min(1e-3, horizon * 1e-3));

  const std::size_t n_trace = std::max<std::size_t>(opts.trace_points, 1);
  const double trace_dt = horizon / static_cast<double>(n_trace);
  std::size_t next_trace = 0;
  OdeState tmp;

  auto record_until = [&](double t_end) {
    while (next_trace <= n_trace) {
      const double tt = std::min(static_cast<double>(next_trace) * trace_dt, horizon);
      if (tt > t_end) break;
      stepper.calc_state(tt, tmp);
      out.trace.push_back({tmp[0], tmp[1], tt});
      ++next_trace;
    }
  };

  // first time in [t0, t1] where r reaches level, given r(t0) < level <= r(t1)
  auto locate = [&](double t0, double t1, double level) {
    for (int i = 0; i < 200 && t1 - t0 > 1e-15 * t1; ++i) {
      const double mid = 0.5 * (t0 + t1);
      stepper.calc_state(mid, tmp);
      (tmp[0] >= level ? t1 : t0) = mid;
    }
    return t1;
  };

  double r_prev = x0[0];
  while (stepper.current_time() < horizon) {
    const auto [t0, t1] = stepper.do_step(rhs);
    const OdeState& x = stepper.current_state();
    const bool finite = std::isfinite(x[0]) && std::isfinite(x[1]);

    if (finite && r_prev < opts.check_level && x[0] >= opts.check_level) {
      out.t_check = locate(t0, t1, opts.check_level);
    }
    if (finite && x[0] >= opts.blowup_level) {
      out.t_blowup = locate(t0, t1, opts.blowup_level);
      if (!std::isfinite(out.t_check)) out.t_check = locate(t0, t1, opts.check_level);
      record_until(out.t_blowup);
      if (out.t_blowup <= horizon) out.exploded = true;
      break;
    }
    if (!finite || stepper.current_time_step() < opts.collapse_factor * horizon) {
      out.step_collapsed = true;
      out.exploded = t0 <= horizon;
      out.t_exp = t0;
      record_until(t0);
      break;
    }
    record_until(std::min(t1, horizon));
    r_prev = x[0];
  }

  if (out.exploded && !out.step_collapsed) {
    // t_X = t_exp - k X^(-1/2)
    const double s1 = std::sqrt(opts.check_level);
    const double s2 = std::sqrt(opts.blowup_level);
    out.t_exp = (out.t_blowup * s2 - out.t_check * s1) / (s2 - s1);
  }
  if (!out.exploded) {
    stepper.calc_state(horizon, tmp);
    out.terminal = {tmp[0], tmp[1], horizon};
    out.t_exp = inf;
  } else {
    out.terminal = out.trace.empty() ? State{x0[0], x0[1], 0.0} : out.trace.back();
  }
  return out;
}

double beta_critical(const ModelParams& p) { return p.sigma * std::sqrt(2.0 * p.lambda0); }

double fixed_point_r(const ModelParams& p) {
  if (p.sigma == 0.0) return p.lambda0;
  const double bc = beta_critical(p);
  if (p.beta < bc) {
    throw DomainError("no fixed point for beta below beta_C = sigma sqrt(2 lambda0)");
  }
  // (b^2/s^2)(1 - sqrt(1-u)) rewritten as 2 lambda0 / (1 + sqrt(1-u)), u = 2 s^2 l0 / b^2
  const double u = 2.0 * p.sigma * p.sigma * p.lambda0 / (p.beta * p.beta);
  const double root = std::sqrt(std::max(0.0, 1.0 - u));
  return 2.0 * p.lambda0 / (1.0 + root);
}

double fixed_point_y(const ModelParams& p) {
  const double r = fixed_point_r(p);
  if (p.beta == 0.0) return 0.0;
  return p.sigma * p.sigma * r * r / (2.0 * p.beta);
}

}  // namespace qghjm
