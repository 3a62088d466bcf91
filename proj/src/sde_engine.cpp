#include "qghjm/sde_engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qghjm/errors.hpp"

namespace qghjm {

void SimConfig::validate(const ModelParams& p) const {
  std::ostringstream os;
  if (!(std::isfinite(dt) && dt > 0.0)) {
    os << "dt must be > 0 (got " << dt << ")";
  } else if (!(std::isfinite(horizon) && horizon >= dt)) {
    os << "horizon must be >= dt (got " << horizon << ")";
  } else if (n_paths < 1) {
    os << "n_paths must be >= 1";
  } else if (!(explosion_threshold >= 10.0 * p.lambda0)) {
    os << "explosion_threshold must be >= 10 * lambda0 (got " << explosion_threshold << ")";
  }
  if (!os.str().empty()) throw ConfigError(os.str());
}

std::size_t SimConfig::n_steps() const {
  const double q = horizon / dt;
  const double nearest = std::round(q);
  if (std::abs(q - nearest) <= 1e-9 * std::max(1.0, q)) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(q));
}

double SimConfig::time_at(std::size_t k) const {
  const std::size_t n = n_steps();
  if (k >= n) return horizon;
  return static_cast<double>(k) * dt;
}

PathKernel::PathKernel(const ModelParams& p, const ForwardCurve& curve, const SimConfig& cfg)
    : p_(p), curve_(curve), cfg_(cfg), vol_(p), n_steps_(cfg.n_steps()) {}

PathResult simulate_path(const ModelParams& p, const ForwardCurve& curve, const SimConfig& cfg,
                         std::size_t path_index) {
  p.validate();
  cfg.validate(p);
  const PathKernel kernel(p, curve, cfg);
  PathResult out;
  out.path_index = path_index;
  const std::size_t stride = cfg.record_stride;
  const std::size_t last = kernel.n_steps();
  const auto outcome = kernel.run(path_index, [&](std::size_t k, const State& s) {
    if (stride > 0 && (k % stride == 0 || k == last)) out.samples.push_back(s);
  });
  out.exploded = outcome.exploded;
  out.tau_hat = outcome.tau_hat;
  out.terminal = outcome.terminal;
  return out;
}

std::vector<PathResult> simulate_batch(const ModelParams& p, const ForwardCurve& curve,
                                       const SimConfig& cfg, Execution ex) {
  p.validate();
  cfg.validate(p);
  std::vector<PathResult> out(cfg.n_paths);
  for_each_index(cfg.n_paths, ex,
                 [&](std::size_t i) { out[i] = simulate_path(p, curve, cfg, i); });
  return out;
}

namespace {

McEstimate fraction_estimate(std::size_t hits, std::size_t n) {
  McEstimate e;
  e.n = n;
  e.n_exploded = hits;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  return e;
}

std::vector<double> explosion_times(const ModelParams& p, const ForwardCurve& curve,
                                    const SimConfig& cfg, Execution ex) {
  const PathKernel kernel(p, curve, cfg);
  std::vector<double> tau(cfg.n_paths);
  for_each_index(cfg.n_paths, ex, [&](std::size_t i) {
    tau[i] = kernel.run(i, [](std::size_t, const State&) {}).tau_hat;
  });
  return tau;
}

}  // namespace

McEstimate explosion_probability(const ModelParams& p, const ForwardCurve& curve,
                                 const SimConfig& cfg, double T, Execution ex) {
  const double checkpoint[] = {T};
  return explosion_curve(p, curve, cfg, checkpoint, ex).front();
}

std::vector<McEstimate> explosion_curve(const ModelParams& p, const ForwardCurve& curve,
                                        const SimConfig& cfg, std::span<const double> checkpoints,
                                        Execution ex) {
  p.validate();
  cfg.validate(p);
  if (checkpoints.empty()) return {};
  const double t_max = *std::max_element(checkpoints.begin(), checkpoints.end());
  if (!(t_max <= cfg.horizon) || !(t_max > 0.0)) {
    throw ConfigError("explosion checkpoints must lie in (0, horizon]");
  }
  SimConfig run = cfg;
  run.horizon = std::max(t_max, cfg.dt);
  const auto tau = explosion_times(p, curve, run, ex);
  std::vector<McEstimate> out;
  out.reserve(checkpoints.size());
  for (const double T : checkpoints) {
    const auto hits = static_cast<std::size_t>(
        std::count_if(tau.begin(), tau.end(), [T](double t) { return t <= T; }));
    out.push_back(fraction_estimate(hits, tau.size()));
  }
  return out;
}

std::vector<McEstimate> explosion_curve(std::span<const PathResult> paths,
                                        std::span<const double> checkpoints) {
  std::vector<McEstimate> out;
  for (const double T : checkpoints) {
    const auto hits = static_cast<std::size_t>(std::count_if(
        paths.begin(), paths.end(), [T](const PathResult& r) { return r.tau_hat <= T; }));
    out.push_back(fraction_estimate(hits, paths.size()));
  }
  return out;
}

McEstimate summarize(std::span<const double> values, std::span<const char> survived) {
  McEstimate e;
  e.n = values.size();
  double sum = 0.0;
  std::size_t used = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (survived[i] && std::isfinite(values[i])) {
      sum += values[i];
      ++used;
    } else {
      ++e.n_exploded;
    }
  }
  if (used == 0) {
    e.mean = std::numeric_limits<double>::quiet_NaN();
    e.std_error = std::numeric_limits<double>::quiet_NaN();
    return e;
  }
  e.mean = sum / static_cast<double>(used);
  double ss = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (survived[i] && std::isfinite(values[i])) {
      const double d = values[i] - e.mean;
      ss += d * d;
    }
  }
  e.std_error = used > 1 ? std::sqrt(ss / static_cast<double>(used - 1) / static_cast<double>(used))
                         : 0.0;
  return e;
}

McEstimate expectation_functional(const ModelParams& p, const ForwardCurve& curve,
                                  const SimConfig& cfg, const Payoff& payoff, OnExplosion mode,
                                  Execution ex) {
  p.validate();
  cfg.validate(p);
  const PathKernel kernel(p, curve, cfg);
  std::vector<double> values(cfg.n_paths, 0.0);
  std::vector<char> survived(cfg.n_paths, 0);
  for_each_index(cfg.n_paths, ex, [&](std::size_t i) {
    const auto outcome = kernel.run(i, [](std::size_t, const State&) {});
    if (!outcome.exploded) {
      values[i] = payoff(outcome.terminal);
      survived[i] = 1;
    }
  });
  McEstimate e = summarize(values, survived);
  if (mode == OnExplosion::Diverge) {
    e.diverged = e.n_exploded > 0;
  } else if (e.n_exploded == e.n) {
    throw EmptySample("every path exploded before the horizon");
  }
  return e;
}

}  // namespace qghjm
