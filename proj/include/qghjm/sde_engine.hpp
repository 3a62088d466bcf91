#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "qghjm/forward_curve.hpp"
#include "qghjm/model.hpp"
#include "qghjm/parallel.hpp"
#include "qghjm/philox.hpp"

namespace qghjm {

struct SimConfig {
  double dt = 0.01;
  double horizon = 1.0;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  double explosion_threshold = 1e6;
  /// Record every k-th grid state of each path; 0 disables recording.
  std::size_t record_stride = 0;

  void validate(const ModelParams& p) const;

  /// Number of Euler steps; the last one is shortened if horizon/dt is not
  /// an integer.
  std::size_t n_steps() const;
  double time_at(std::size_t k) const;
};

inline constexpr double kNotExploded = std::numeric_limits<double>::infinity();

struct PathResult {
  std::size_t path_index = 0;
  bool exploded = false;
  /// Left edge of the first step whose end state is non-finite or at/above
  /// the threshold; kNotExploded otherwise.
  double tau_hat = kNotExploded;
  /// Last finite state: at the horizon, or at tau_hat for exploded paths.
  State terminal;
  std::vector<State> samples;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::size_t n_exploded = 0;
  bool diverged = false;
};

/// Explicit Euler-Maruyama stepper for one path with full truncation of the
/// volatility and y clamped at zero. Noise for step k of path i is normal
/// number k of Philox stream (seed, i), so paths can run in any order and
/// parameter sweeps share random numbers.
class PathKernel {
 public:
  PathKernel(const ModelParams& p, const ForwardCurve& curve, const SimConfig& cfg);

  struct Outcome {
    bool exploded = false;
    double tau_hat = kNotExploded;
    State terminal;
  };

  /// on_state(k, state) sees every finite grid state k = 0..n_steps in order.
  template <class OnState>
  Outcome run(std::size_t path_index, OnState&& on_state) const {
    NormalStream noise(cfg_.seed, path_index);
    State s{curve_.value(0.0), 0.0, 0.0};
    on_state(std::size_t{0}, s);
    for (std::size_t k = 0; k < n_steps_; ++k) {
      const double t_next = cfg_.time_at(k + 1);
      const double h = t_next - s.t;
      const double vol = vol_(s.r);
      const double mu_r =
          s.y - p_.beta * s.r + p_.beta * curve_.value(s.t) + curve_.slope(s.t);
      const double mu_y = vol * vol - 2.0 * p_.beta * s.y;
      const double r_next = s.r + mu_r * h + vol * std::sqrt(h) * noise(k);
      double y_next = s.y + mu_y * h;
      if (y_next < 0.0) y_next = 0.0;
      if (!std::isfinite(r_next) || !std::isfinite(y_next) ||
          r_next >= cfg_.explosion_threshold || y_next >= cfg_.explosion_threshold) {
        return {true, s.t, s};
      }
      s = {r_next, y_next, t_next};
      on_state(k + 1, s);
    }
    return {false, kNotExploded, s};
  }

  std::size_t n_steps() const { return n_steps_; }

 private:
  ModelParams p_;
  const ForwardCurve& curve_;
  SimConfig cfg_;
  EpsCevVolatility vol_;
  std::size_t n_steps_;
};

PathResult simulate_path(const ModelParams& p, const ForwardCurve& curve, const SimConfig& cfg,
                         std::size_t path_index);

std::vector<PathResult> simulate_batch(const ModelParams& p, const ForwardCurve& curve,
                                       const SimConfig& cfg,
                                       Execution ex = Execution::Parallel);

/// Fraction of paths with tau_hat <= T, simulated up to T.
McEstimate explosion_probability(const ModelParams& p, const ForwardCurve& curve,
                                 const SimConfig& cfg, double T,
                                 Execution ex = Execution::Parallel);

/// Cumulative explosion fractions at several checkpoints from one batch
/// simulated to the largest checkpoint.
std::vector<McEstimate> explosion_curve(const ModelParams& p, const ForwardCurve& curve,
                                        const SimConfig& cfg, std::span<const double> checkpoints,
                                        Execution ex = Execution::Parallel);

/// Same, from already simulated paths.
std::vector<McEstimate> explosion_curve(std::span<const PathResult> paths,
                                        std::span<const double> checkpoints);

enum class OnExplosion { Diverge, Exclude };

using Payoff = std::function<double(const State&)>;

/// Mean of payoff(terminal state at cfg.horizon).
///
/// Diverge: any exploded path (or non-finite payoff) sets diverged; the mean
/// is then the partial mean over the surviving paths. Exclude: mean over the
/// surviving paths only, EmptySample if there are none.
McEstimate expectation_functional(const ModelParams& p, const ForwardCurve& curve,
                                  const SimConfig& cfg, const Payoff& payoff,
                                  OnExplosion mode, Execution ex = Execution::Parallel);

/// Sample mean and standard error of the finite entries of `values`, summed
/// in index order.
McEstimate summarize(std::span<const double> values, std::span<const char> survived);

}  // namespace qghjm
