#include "qghjm/explosion_criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <boost/math/tools/minima.hpp>

#include "qghjm/errors.hpp"

namespace qghjm {

namespace {

constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;

void require_explosive_gamma(double gamma) {
  if (!(gamma > 0.5 && gamma <= 1.0)) {
    throw GammaOutOfRange("gamma must lie in (1/2, 1]; for gamma <= 1/2 the process is "
                          "non-explosive");
  }
}

// log-uniform points; `open` places them at cell centres so neither end is hit
std::vector<double> log_grid(double lo, double hi, std::size_t n, bool open) {
  std::vector<double> xs(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = open ? (static_cast<double>(i) + 0.5) / static_cast<double>(n)
                          : (n == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(n - 1));
    xs[i] = std::exp(a + u * (b - a));
  }
  if (!open && n > 1) {
    xs.front() = lo;
    xs.back() = hi;
  }
  return xs;
}

// argmax of f over [lo, hi] by Brent's method on -f
template <class F>
std::pair<double, double> brent_max(F&& f, double lo, double hi) {
  if (!(hi > lo)) return {lo, f(lo)};
  auto [x, neg] = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, lo, hi,
                                                        kBrentBits);
  return {x, -neg};
}

// (1 + R)/R raised to power e, computed as exp(e log1p(1/R))
double inv_ratio_pow(double R, double e) { return std::exp(e * std::log1p(1.0 / R)); }

// 1 - (1 + x)^-d without cancellation
double one_minus_pow(double x, double d) { return -std::expm1(-d * std::log1p(x)); }

double g_at_peak(double d2) {
  if (d2 <= 0.0) return 0.0;
  return std::exp((d2 + 1.0) * std::log(d2 / (1.0 + d2)));
}

double delta2_objective(double d2, double sigma) {
  return g_at_peak(d2) - 0.5 * sigma * sigma * d2 * (d2 + 1.0);
}

}  // namespace

DeltaPair DeltaPair::from_delta2(double delta2, double gamma) {
  const double delta1 = 2.0 * gamma / (1.0 + delta2) - 1.0;
  if (!(delta2 > 0.0) || !(delta1 > 0.0)) {
    throw DomainError("delta pair needs delta1, delta2 > 0 with (1+d1)(1+d2) = 2 gamma");
  }
  return {delta1, delta2, gamma};
}

double growth_coefficient(const ModelParams& p, const DeltaPair& d, CoefficientMode mode) {
  const double beta_factor =
      mode == CoefficientMode::Standard ? 2.0 : std::max(2.0 * d.delta1, d.delta2);
  return beta_factor * p.beta + 0.5 * p.sigma * p.sigma * d.delta2 * (d.delta2 + 1.0);
}

std::vector<double> delta2_scan_grid(double gamma, const ScanSpec& scan) {
  const double hi = 2.0 * gamma - 1.0;
  const double lo = std::min(scan.delta2_min, 0.1 * hi);
  return log_grid(lo, hi, std::max<std::size_t>(scan.n_delta2, 1), true);
}

double condition_F(double R, const ModelParams& p, const DeltaPair& d, CoefficientMode mode) {
  if (!(R >= p.epsilon)) throw DomainError("condition F needs R >= epsilon");
  const double c = growth_coefficient(p, d, mode);
  const double g2 = 2.0 * d.gamma;
  const double t1 = std::pow(1.0 + R, d.delta1 + 1.0) / (d.delta1 * p.sigma * p.sigma);
  const double t2 = std::pow(R, g2 - 1.0) * std::pow(1.0 + R, d.delta2 + 1.0) / d.delta2;
  return std::pow(R, g2) - c * (t1 + t2);
}

double condition_G(double R, const DeltaPair& d) {
  return d.delta2 * R / std::pow(1.0 + R, d.delta2 + 1.0);
}

ConditionReport check_condition(const ModelParams& p, Condition which, const ScanSpec& scan) {
  require_explosive_gamma(p.gamma);
  p.validate();
  const auto grid = delta2_scan_grid(p.gamma, scan);
  const std::size_t nd = grid.size();

  ConditionReport rep;
  rep.condition = which;
  rep.mode = scan.mode;
  rep.sup_value = -std::numeric_limits<double>::infinity();
  double best_d2 = grid.front();

  auto bracket = [&](std::size_t i) {
    return std::pair{grid[i == 0 ? 0 : i - 1], grid[std::min(i + 1, nd - 1)]};
  };

  if (which == Condition::II) {
    auto margin = [&](double d2) {
      const auto d = DeltaPair::from_delta2(d2, p.gamma);
      const double R = std::max(1.0 / d2, p.epsilon);
      return condition_G(R, d) - growth_coefficient(p, d, scan.mode);
    };
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < nd; ++i) {
      const double v = margin(grid[i]);
      if (v > rep.sup_value) {
        rep.sup_value = v;
        best_i = i;
      }
    }
    best_d2 = grid[best_i];
    const auto [lo, hi] = bracket(best_i);
    const auto [x, v] = brent_max(margin, lo, hi);
    if (v > rep.sup_value) {
      rep.sup_value = v;
      best_d2 = x;
    }
    rep.witness_deltas = DeltaPair::from_delta2(best_d2, p.gamma);
    rep.witness_R = std::max(1.0 / best_d2, p.epsilon);
    rep.satisfied = rep.sup_value >= 0.0;
    return rep;
  }

  const auto radii = log_grid(p.epsilon, std::max(scan.radius_max, p.epsilon),
                              std::max<std::size_t>(scan.n_radius, 2), false);
  const std::size_t nr = radii.size();
  std::size_t bi = 0;
  std::size_t bj = 0;
  for (std::size_t i = 0; i < nd; ++i) {
    const auto d = DeltaPair::from_delta2(grid[i], p.gamma);
    for (std::size_t j = 0; j < nr; ++j) {
      const double v = condition_F(radii[j], p, d, scan.mode);
      if (v > rep.sup_value) {
        rep.sup_value = v;
        bi = i;
        bj = j;
      }
    }
  }
  best_d2 = grid[bi];
  double best_R = radii[bj];
  {
    const auto d = DeltaPair::from_delta2(best_d2, p.gamma);
    const auto [x, v] = brent_max([&](double R) { return condition_F(R, p, d, scan.mode); },
                                  radii[bj == 0 ? 0 : bj - 1], radii[std::min(bj + 1, nr - 1)]);
    if (v > rep.sup_value) {
      rep.sup_value = v;
      best_R = x;
    }
  }
  {
    const auto [lo, hi] = bracket(bi);
    const auto [x, v] = brent_max(
        [&](double d2) {
          return condition_F(best_R, p, DeltaPair::from_delta2(d2, p.gamma), scan.mode);
        },
        lo, hi);
    if (v > rep.sup_value) {
      rep.sup_value = v;
      best_d2 = x;
    }
  }
  rep.witness_deltas = DeltaPair::from_delta2(best_d2, p.gamma);
  rep.witness_R = best_R;
  rep.satisfied = rep.sup_value > 0.0;
  return rep;
}

Delta2Star delta2_star(double sigma, double gamma) {
  require_explosive_gamma(gamma);
  const double hi = 2.0 * gamma - 1.0;
  const auto grid = log_grid(std::min(1e-10, hi), hi, 400, false);
  // delta2 = 0 gives objective 0; later (larger) points win ties
  Delta2Star best{0.0, 0.0};
  std::size_t best_i = grid.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = delta2_objective(grid[i], sigma);
    if (v >= best.objective) {
      best = {grid[i], v};
      best_i = i;
    }
  }
  if (best_i == grid.size()) return best;
  const double lo = best_i == 0 ? 0.0 : grid[best_i - 1];
  const double up = grid[std::min(best_i + 1, grid.size() - 1)];
  const auto [x, v] = brent_max([&](double d2) { return delta2_objective(d2, sigma); }, lo, up);
  if (v > best.objective) best = {x, v};
  return best;
}

double beta_max(double sigma, double gamma) {
  return std::max(0.0, 0.5 * delta2_star(sigma, gamma).objective);
}

RegionCurve region_curve(double gamma, std::span<const double> sigma_grid, Execution ex) {
  require_explosive_gamma(gamma);
  RegionCurve curve;
  curve.gamma = gamma;
  curve.points.resize(sigma_grid.size());
  for_each_index(sigma_grid.size(), ex, [&](std::size_t i) {
    const auto star = delta2_star(sigma_grid[i], gamma);
    curve.points[i] = {sigma_grid[i], std::max(0.0, 0.5 * star.objective), star.delta2_star};
  });
  return curve;
}

double kappa_delta(double delta1) {
  return (delta1 + 2.0) * std::exp(-(delta1 + 1.0) / (delta1 + 2.0) * std::log1p(delta1));
}

double min_F_hat(double a, double b, double delta1) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("min_F_hat needs a, b > 0");
  const double e1 = 1.0 / (delta1 + 2.0);
  const double e2 = (delta1 + 1.0) / (delta1 + 2.0);
  return kappa_delta(delta1) * std::exp(e1 * std::log(a) + e2 * std::log(b));
}

Kappas kappas(double R, const ModelParams& p, const DeltaPair& d, CoefficientMode mode) {
  if (!(R > 0.0)) throw DomainError("kappas need R > 0");
  const double c = growth_coefficient(p, d, mode);
  return {c / (d.delta1 * p.sigma * p.sigma) * inv_ratio_pow(R, d.delta1 + 1.0),
          c / d.delta2 * inv_ratio_pow(R, d.delta2 + 1.0)};
}

bool Wedge::contains(double slope) const {
  if (!(slope > 0.0)) return false;
  if (region1 && slope >= region1->lo && slope <= region1->hi) return true;
  if (region2 && slope >= region2->lo && slope <= region2->hi) return true;
  return false;
}

Wedge wedge_feasible_slopes(double R, const ModelParams& p, const DeltaPair& d,
                            CoefficientMode mode) {
  if (!(R >= p.epsilon)) throw DomainError("wedge needs R >= epsilon");
  const auto [k1, k2] = kappas(R, p, d, mode);
  const double split = std::pow(R, d.delta2 * (d.delta1 + 2.0));
  const double a_cap = std::pow(R, 2.0 * d.gamma - d.delta1 - 1.0);
  const double b_cap = std::pow(R, -d.delta2);

  Wedge w;
  if (k2 * split <= a_cap - k1) {
    w.region1 = SlopeInterval{split, (a_cap - k1) / k2};
  }
  if (b_cap > k2 && k1 / (b_cap - k2) <= split) {
    w.region2 = SlopeInterval{k1 / (b_cap - k2), split};
  }
  w.kind = w.region1 ? Wedge::Kind::Region1
                     : (w.region2 ? Wedge::Kind::Region2 : Wedge::Kind::Empty);
  return w;
}

double LyapunovSpec::value(double r, double y) const {
  return (c1 - c2 - c3) + c2 * one_minus_pow(y, deltas.delta1) +
         c3 * one_minus_pow(r, deltas.delta2);
}

FieldPartials LyapunovSpec::partials(double r, double y) const {
  const double d1 = deltas.delta1;
  const double d2 = deltas.delta2;
  const double pr = std::pow(1.0 + r, -d2 - 1.0);
  return {d2 * c3 * pr, -d2 * (d2 + 1.0) * c3 * pr / (1.0 + r),
          d1 * c2 * std::pow(1.0 + y, -d1 - 1.0)};
}

double LyapunovSpec::k2() const { return value(R, R); }
double LyapunovSpec::k3() const { return value(2.0 * R, 2.0 * R); }

namespace {

// Coarse grid for the search route; the result is re-verified on the full grid.
constexpr std::size_t kSearchDelta2 = 24;
constexpr std::size_t kSearchRadius = 30;
constexpr double kSearchRadiusMax = 1e3;
constexpr VerifyGrid kSearchGrid{48, 10.0, 1e-8, 16, 1e-6, 0.0};

LyapunovSpec spec_from_slope(const ModelParams& p, const DeltaPair& d, double R, double slope) {
  LyapunovSpec spec;
  spec.deltas = d;
  spec.R = R;
  spec.slope = slope;
  // a = d1 C2 sigma^2 (R/(1+R))^(d1+1) = 1, b = d2 C3 (R/(1+R))^(d2+1) = slope
  spec.c2 = inv_ratio_pow(R, d.delta1 + 1.0) / (d.delta1 * p.sigma * p.sigma);
  spec.c3 = slope * inv_ratio_pow(R, d.delta2 + 1.0) / d.delta2;
  spec.c1 = spec.c2 + spec.c3;
  spec.C = growth_coefficient(p, d, CoefficientMode::Widened);
  return spec;
}

struct SearchCell {
  double score = -std::numeric_limits<double>::infinity();
  double ratio = 0.0;  // C3 / C2
};

// L V - C V is linear in (C2, C3) once C1 = C2 + C3, so on a fixed grid the
// slack is C2 A_i + C3 B_i; maximize min_i (A_i + t B_i)/(1 + t) over t > 0.
SearchCell search_cell(const ModelParams& p, const DeltaPair& d, double R) {
  LyapunovSpec unit_y;
  unit_y.deltas = d;
  unit_y.R = R;
  unit_y.C = growth_coefficient(p, d, CoefficientMode::Widened);
  unit_y.c1 = unit_y.c2 = 1.0;
  LyapunovSpec unit_r = unit_y;
  unit_r.c2 = 0.0;
  unit_r.c3 = 1.0;

  const auto pts = exterior_grid(R, kSearchGrid);
  std::vector<double> A(pts.size());
  std::vector<double> B(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const State& s = pts[i];
    A[i] = generator_apply(unit_y, s, p) - unit_y.C * unit_y.value(s.r, s.y);
    B[i] = generator_apply(unit_r, s, p) - unit_r.C * unit_r.value(s.r, s.y);
  }
  auto score = [&](double log_t) {
    const double t = std::exp(log_t);
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < A.size(); ++i) m = std::min(m, (A[i] + t * B[i]) / (1.0 + t));
    return m;
  };
  // the score is quasi-concave in t; bracket on a coarse log grid first
  constexpr int kCoarse = 41;
  constexpr double kLogLo = -25.0;
  constexpr double kLogHi = 25.0;
  int best_k = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kCoarse; ++k) {
    const double v = score(kLogLo + (kLogHi - kLogLo) * k / (kCoarse - 1));
    if (v > best) {
      best = v;
      best_k = k;
    }
  }
  const double step = (kLogHi - kLogLo) / (kCoarse - 1);
  const double centre = kLogLo + step * best_k;
  const auto [x, v] = brent_max(score, centre - step, centre + step);
  if (v > best) return {v, std::exp(x)};
  return {best, std::exp(centre)};
}

LyapunovSpec search_lyapunov(const ModelParams& p) {
  const auto d2_grid = log_grid(0.02 * (2.0 * p.gamma - 1.0), 0.98 * (2.0 * p.gamma - 1.0),
                                kSearchDelta2, false);
  const auto radii = log_grid(p.epsilon, std::max(kSearchRadiusMax, 10.0 * p.epsilon),
                              kSearchRadius, false);
  std::vector<SearchCell> cells(d2_grid.size() * radii.size());
  for_each_index(cells.size(), Execution::Parallel, [&](std::size_t k) {
    const auto d = DeltaPair::from_delta2(d2_grid[k / radii.size()], p.gamma);
    cells[k] = search_cell(p, d, radii[k % radii.size()]);
  });
  std::size_t best = 0;
  for (std::size_t k = 1; k < cells.size(); ++k) {
    if (cells[k].score > cells[best].score) best = k;
  }
  if (!(cells[best].score > 0.0)) {
    throw InfeasibleWedge("no Lyapunov constants with positive slack were found");
  }
  const auto d = DeltaPair::from_delta2(d2_grid[best / radii.size()], p.gamma);
  const double R = radii[best % radii.size()];
  // C3/C2 -> b/a
  const double slope = cells[best].ratio * d.delta2 / (d.delta1 * p.sigma * p.sigma) *
                       std::pow(R / (1.0 + R), d.delta2 - d.delta1);
  LyapunovSpec spec = spec_from_slope(p, d, R, slope);
  spec.construction = LyapunovSpec::Construction::Search;
  return spec;
}

}  // namespace

LyapunovSpec build_lyapunov(const ModelParams& p, const ConditionReport& report) {
  if (!report.satisfied) throw InfeasibleWedge("condition report is not satisfied");
  const DeltaPair d = report.witness_deltas;
  const double R = report.witness_R;
  const Wedge w = wedge_feasible_slopes(R, p, d, report.mode);
  if (w.empty()) return search_lyapunov(p);
  // the two regions meet at the dividing slope, so take the whole interval
  const double lo = w.region2 ? w.region2->lo : w.region1->lo;
  const double hi = w.region1 ? w.region1->hi : w.region2->hi;
  return spec_from_slope(p, d, R, std::sqrt(lo * hi));
}

std::vector<State> exterior_grid(double R, const VerifyGrid& grid) {
  const auto axis = log_grid(grid.lower_factor * R, grid.extent_factor * R, grid.n, false);
  std::vector<State> pts;
  pts.reserve(axis.size() * axis.size() + 2 * grid.n_face);
  for (const double r : axis) {
    for (const double y : axis) {
      if (r >= R || y >= R) pts.push_back({r, y, 0.0});
    }
  }
  if (grid.n_face > 0) {
    const double edge = R * (1.0 + grid.face_offset);
    const auto face = log_grid(grid.lower_factor * R, edge, grid.n_face, false);
    for (const double u : face) pts.push_back({edge, u, 0.0});
    for (const double u : face) pts.push_back({u, edge, 0.0});
  }
  return pts;
}

SlackReport verify_generator_inequality(const LyapunovSpec& spec, const ModelParams& p,
                                        const VerifyGrid& grid, Execution ex) {
  const auto pts = exterior_grid(spec.R, grid);
  std::vector<double> slack(pts.size());
  for_each_index(pts.size(), ex, [&](std::size_t i) {
    const State& s = pts[i];
    slack[i] = generator_apply(spec, s, p) - spec.C * spec.value(s.r, s.y);
  });
  SlackReport rep;
  rep.n_points = pts.size();
  rep.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (slack[i] < rep.min_slack) {
      rep.min_slack = slack[i];
      rep.min_r = pts[i].r;
      rep.min_y = pts[i].y;
    }
    if (!(slack[i] >= -grid.tolerance)) ++rep.violations;
  }
  return rep;
}

double corner_slack_bound(const LyapunovSpec& spec, const ModelParams& p) {
  const double d1 = spec.deltas.delta1;
  const double d2 = spec.deltas.delta2;
  const double a = d1 * spec.c2 * p.sigma * p.sigma / inv_ratio_pow(spec.R, d1 + 1.0);
  const double b = d2 * spec.c3 / inv_ratio_pow(spec.R, d2 + 1.0);
  return min_F_hat(a, b, d1) - spec.C * spec.c1;
}

double k0(const LyapunovSpec& spec) {
  const double base = spec.c1 - spec.c2 - spec.c3;
  return std::min(base + spec.c2 * one_minus_pow(spec.R, spec.deltas.delta1),
                  base + spec.c3 * one_minus_pow(spec.R, spec.deltas.delta2));
}

R0Threshold as_explosion_r0_threshold(double R, const ModelParams& p) {
  if (!(p.beta > 0.0)) throw DomainError("almost sure explosion threshold needs beta > 0");
  const double s2 = p.sigma * p.sigma;
  const double k = 4.0 * p.beta * R + p.beta + s2;
  const double log_first = 1.0 - std::log(p.beta) + std::log(k);
  const double log_second = std::log(s2 / p.beta) + std::exp(2.0 * R) * k / s2 - 2.0 * R - 1.0;
  R0Threshold out;
  out.log_value = std::max(log_first, log_second);
  out.overflow = !(out.log_value <= 700.0);
  out.value = out.overflow ? std::numeric_limits<double>::infinity() : std::exp(out.log_value);
  return out;
}

A5Report verify_a5_function(const ModelParams& p, double R, const VerifyGrid& grid,
                            Execution ex) {
  const double edge = 2.0 * R;
  const auto axis = log_grid(grid.lower_factor * R, grid.extent_factor * edge, grid.n, false);
  std::vector<State> pts;
  for (const double r : axis) {
    for (const double y : axis) {
      if (r < edge || y < edge) pts.push_back({r, y, 0.0});
    }
  }
  std::vector<double> lv(pts.size());
  for_each_index(pts.size(), ex, [&](std::size_t i) {
    const State& s = pts[i];
    const double er = std::exp(-s.r);
    lv[i] = generator_apply(FieldPartials{-er, er, -std::exp(-s.y)}, s, p);
  });
  A5Report rep;
  rep.n_points = pts.size();
  rep.max_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (lv[i] > rep.max_value) {
      rep.max_value = lv[i];
      rep.max_r = pts[i].r;
      rep.max_y = pts[i].y;
    }
    if (!(lv[i] < 0.0)) ++rep.violations;
  }
  return rep;
}

}  // namespace qghjm
