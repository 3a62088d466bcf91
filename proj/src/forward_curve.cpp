#include "qghjm/forward_curve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qghjm/errors.hpp"

namespace qghjm {

ForwardCurve::ForwardCurve(Kind kind, std::vector<Knot> knots)
    : kind_(kind), knots_(std::move(knots)) {}

ForwardCurve ForwardCurve::flat(double lambda0) {
  if (!(lambda0 > 0.0) || !std::isfinite(lambda0)) {
    throw ConfigError("flat forward curve requires lambda0 > 0");
  }
  return ForwardCurve(Kind::Flat, {{0.0, lambda0}});
}

ForwardCurve ForwardCurve::tabulated(std::vector<Knot> knots) {
  if (knots.empty()) throw ConfigError("tabulated curve needs at least one knot");
  if (knots.front().first != 0.0) {
    throw ConfigError("tabulated curve must start at t = 0");
  }
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const auto [t, v] = knots[i];
    if (!std::isfinite(t) || !std::isfinite(v)) {
      throw ConfigError("tabulated curve knot " + std::to_string(i) + " is not finite");
    }
    if (!(v > 0.0)) {
      throw ConfigError("tabulated curve knot " + std::to_string(i) + " has lambda <= 0");
    }
    if (i > 0 && !(t > knots[i - 1].first)) {
      throw ConfigError("tabulated curve times must be strictly increasing");
    }
  }
  return ForwardCurve(Kind::Tabulated, std::move(knots));
}

std::size_t ForwardCurve::segment(double t) const {
  // index of the last knot with knot.t <= t
  auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                             [](double x, const Knot& k) { return x < k.first; });
  if (it == knots_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(knots_.begin(), it)) - 1;
}

double ForwardCurve::value(double t) const {
  if (kind_ == Kind::Flat || t <= 0.0) return knots_.front().second;
  const std::size_t i = segment(t);
  if (i + 1 >= knots_.size()) return knots_.back().second;
  const auto [t0, v0] = knots_[i];
  const auto [t1, v1] = knots_[i + 1];
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double ForwardCurve::slope(double t) const {
  if (kind_ == Kind::Flat) return 0.0;
  const std::size_t i = segment(std::max(t, 0.0));
  if (i + 1 >= knots_.size()) return 0.0;
  const auto [t0, v0] = knots_[i];
  const auto [t1, v1] = knots_[i + 1];
  return (v1 - v0) / (t1 - t0);
}

double ForwardCurve::integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (kind_ == Kind::Flat) return knots_.front().second * t;
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    const auto [t0, v0] = knots_[i];
    const auto [t1, v1] = knots_[i + 1];
    if (t <= t0) return acc;
    const double hi = std::min(t, t1);
    const double v_hi = v0 + (v1 - v0) * (hi - t0) / (t1 - t0);
    acc += 0.5 * (v0 + v_hi) * (hi - t0);
    if (t <= t1) return acc;
  }
  return acc + knots_.back().second * (t - knots_.back().first);
}

bool ForwardCurve::satisfies_lower_bound(double beta) const {
  const double floor = beta * knots_.front().second;
  if (kind_ == Kind::Flat) return true;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    const double v = knots_[i].second;
    const double right =
        i + 1 < knots_.size()
            ? (knots_[i + 1].second - v) / (knots_[i + 1].first - knots_[i].first)
            : 0.0;
    if (right + beta * v < floor) return false;
    if (i > 0) {
      const double left = (v - knots_[i - 1].second) / (knots_[i].first - knots_[i - 1].first);
      if (left + beta * v < floor) return false;
    }
  }
  return true;
}

}  // namespace qghjm
