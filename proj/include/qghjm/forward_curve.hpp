#pragma once

#include <utility>
#include <vector>

namespace qghjm {

/// Initial instantaneous forward curve t -> lambda(t).
///
/// Either flat, or piecewise linear through knots (t_i, lambda_i) with the
/// first knot at t = 0 and flat extrapolation past the last knot. The slope
/// is right-continuous: at a knot it is the slope of the segment to its right.
class ForwardCurve {
 public:
  enum class Kind { Flat, Tabulated };
  using Knot = std::pair<double, double>;

  static ForwardCurve flat(double lambda0);
  static ForwardCurve tabulated(std::vector<Knot> knots);

  Kind kind() const { return kind_; }
  const std::vector<Knot>& knots() const { return knots_; }

  double value(double t) const;
  double slope(double t) const;
  /// Exact integral of lambda over [0, t].
  double integral(double t) const;

  /// lambda'(t) + beta lambda(t) >= beta lambda(0) on the whole curve.
  /// Checking both one-sided slopes at every knot is exact for a
  /// piecewise-linear curve.
  bool satisfies_lower_bound(double beta) const;

 private:
  ForwardCurve(Kind kind, std::vector<Knot> knots);
  std::size_t segment(double t) const;

  Kind kind_;
  std::vector<Knot> knots_;
};

}  // namespace qghjm
