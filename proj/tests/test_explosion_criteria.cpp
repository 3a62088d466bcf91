#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "qghjm/errors.hpp"
#include "qghjm/explosion_criteria.hpp"

using namespace qghjm;
using oracle::Big;

namespace {

ModelParams params(double sigma, double beta, double gamma = 1.0) {
  ModelParams p;
  p.sigma = sigma;
  p.beta = beta;
  p.gamma = gamma;
  p.epsilon = 0.01;
  p.lambda0 = 0.1;
  return p;
}

double to_d(const Big& x) { return x.convert_to<double>(); }

double eq19p_margin(double a, double b, double R, const ModelParams& p, const DeltaPair& d) {
  return oracle::wedge_margin(a, b, R, p.sigma, p.beta, d.gamma, d.delta1, d.delta2);
}

double sup_F_bruteforce(const ModelParams& p) {
  double best = -INFINITY;
  for (int i = 1; i < 80; ++i) {
    const auto d = DeltaPair::from_delta2((2.0 * p.gamma - 1.0) * i / 80.0, p.gamma);
    for (int j = 0; j <= 120; ++j) {
      const double R = p.epsilon * std::pow(1e6, j / 120.0);
      best = std::max(best, to_d(oracle::F(R, p.sigma, p.beta, p.gamma, d.delta1, d.delta2)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("delta pair coupling") {
  for (double gamma : {0.55, 0.75, 1.0}) {
    for (int i = 1; i < 100; ++i) {
      const double d2 = (2.0 * gamma - 1.0) * i / 100.0;
      const auto d = DeltaPair::from_delta2(d2, gamma);
      CHECK(d.delta1 > 0.0);
      CHECK(d.delta1 < 1.0);
      CHECK(d.delta2 < 1.0);
      CHECK(std::abs((1.0 + d.delta1) * (1.0 + d.delta2) - 2.0 * gamma) < 1e-12);
    }
    CHECK_THROWS_AS(DeltaPair::from_delta2(2.0 * gamma - 1.0, gamma), DomainError);
    CHECK_THROWS_AS(DeltaPair::from_delta2(0.0, gamma), DomainError);
  }
}

TEST_CASE("scan grid lies strictly inside the interval") {
  const auto g = delta2_scan_grid(1.0, ScanSpec{});
  CHECK(g.size() == 400);
  CHECK(g.front() > 1e-4);
  CHECK(g.back() < 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}

TEST_CASE("condition F") {
  const double d = std::sqrt(2.0) - 1.0;
  const DeltaPair sym{d, d, 1.0};
  const auto p = params(0.2, 0.0);
  const Big D = sqrt(Big(2)) - 1;
  const double want = to_d(oracle::F(10, Big("0.2"), 0, 1, D, D));
  CHECK(condition_F(10.0, p, sym) == doctest::Approx(want).epsilon(1e-12));
  for (double R : {0.01, 1.0, 10.0, 1e3}) CHECK(condition_F(R, params(0.2, 100.0), sym) < 0.0);
  CHECK_THROWS_AS(condition_F(0.001, p, sym), DomainError);
  // exponent identity used to rewrite F
  for (double gamma : {0.6, 0.8, 1.0}) {
    const auto dp = DeltaPair::from_delta2(0.37 * (2.0 * gamma - 1.0), gamma);
    for (double R : {0.3, 7.0, 1e4}) {
      CHECK(std::pow(R, 2.0 * gamma - 1.0) ==
            doctest::Approx(std::pow(R, dp.delta1 * dp.delta2 + dp.delta1 + dp.delta2))
                .epsilon(1e-13));
    }
  }
}

TEST_CASE("condition G") {
  CHECK(condition_G(1.0, DeltaPair{1.0, 1.0, 1.0}) == 0.25);
  CHECK(condition_G(1e-12, DeltaPair{1.0, 1.0, 1.0}) < 1e-6);
  CHECK(condition_G(1e12, DeltaPair{1.0, 1.0, 1.0}) < 1e-6);
  for (double d2 : {0.05, 0.3, 0.9}) {
    const DeltaPair d{1.0 / (1.0 + d2) * 2.0 - 1.0, d2, 1.0};
    CHECK(condition_G(1e-12, d) < 1e-12);
    CHECK(condition_G(1e200, d) <= d2 * std::pow(1e200, -d2));
    CHECK(condition_G(1e6 / d2, d) < condition_G(1e3 / d2, d));
    // grid argmax over (0, 100/d2]
    const int n = 200000;
    const double h = 100.0 / d2 / n;
    double best_R = 0.0;
    double best = -1.0;
    for (int i = 1; i <= n; ++i) {
      const double v = condition_G(i * h, d);
      if (v > best) {
        best = v;
        best_R = i * h;
      }
    }
    CHECK(std::abs(best_R - 1.0 / d2) <= h);
    const double exact = -oracle::golden_min([&](double R) { return -condition_G(R, d); },
                                             0.01 / d2, 10.0 / d2);
    CHECK(std::abs(exact - std::pow(d2 / (1.0 + d2), d2 + 1.0)) < 1e-10);
    CHECK(std::abs(condition_G(1.0 / d2, d) - std::pow(d2 / (1.0 + d2), d2 + 1.0)) < 1e-15);
  }
}

TEST_CASE("condition II examples") {
  const auto rep = check_condition(params(0.2, 0.05), Condition::II);
  CHECK(rep.satisfied);
  CHECK(rep.sup_value >= 0.0);
  CHECK(rep.witness_R == doctest::Approx(1.0 / rep.witness_deltas.delta2));
  CHECK(rep.witness_deltas.delta1 > 0.0);

  const auto wide = check_condition(params(2.0, 0.0, 0.6), Condition::II);
  CHECK_FALSE(wide.satisfied);
  CHECK(wide.sup_value < 0.0);

  // 2 beta alone exceeds max G = 1/4
  CHECK_FALSE(check_condition(params(0.2, 0.13), Condition::II).satisfied);
  CHECK_THROWS_AS(check_condition(params(0.2, 0.0, 0.5), Condition::II), GammaOutOfRange);
  CHECK_THROWS_AS(check_condition(params(0.2, 0.0, 0.4), Condition::I), GammaOutOfRange);
}

TEST_CASE("condition II agrees with beta_max away from the boundary") {
  for (double gamma : {0.75, 1.0}) {
    for (double sigma : {0.1, 0.4, 0.8, 1.2}) {
      const double bm = beta_max(sigma, gamma);
      if (bm <= 0.0) continue;
      CHECK(check_condition(params(sigma, 0.9 * bm, gamma), Condition::II).satisfied);
      CHECK_FALSE(check_condition(params(sigma, 1.1 * bm, gamma), Condition::II).satisfied);
    }
  }
}

TEST_CASE("condition I matches a brute-force scan") {
  for (double beta : {0.0, 0.01, 0.02, 0.05}) {
    const auto p = params(0.2, beta);
    const auto rep = check_condition(p, Condition::I);
    const double brute = sup_F_bruteforce(p);
    CHECK(rep.satisfied == (rep.sup_value > 0.0));
    CHECK(rep.satisfied == (brute > 0.0));
    CHECK(rep.sup_value >= brute - 1e-9 * std::abs(brute));
    if (rep.satisfied) {
      CHECK(condition_F(rep.witness_R, p, rep.witness_deltas) == doctest::Approx(rep.sup_value));
    }
  }
}

TEST_CASE("widened coefficient never shrinks the satisfied set") {
  for (double sigma : {0.1, 0.3, 0.6, 1.0}) {
    for (double beta : {0.0, 0.005, 0.02, 0.05, 0.1, 0.12}) {
      for (auto which : {Condition::I, Condition::II}) {
        ScanSpec std_scan;
        ScanSpec wide_scan;
        wide_scan.mode = CoefficientMode::Widened;
        const auto p = params(sigma, beta);
        const auto a = check_condition(p, which, std_scan);
        const auto b = check_condition(p, which, wide_scan);
        if (a.satisfied) CHECK(b.satisfied);
        CHECK(b.sup_value >= a.sup_value - 1e-12);
      }
    }
  }
}

TEST_CASE("delta2 star and beta_max") {
  const auto s = delta2_star(0.2, 1.0);
  CHECK(s.delta2_star == 1.0);
  CHECK(beta_max(0.2, 1.0) == doctest::Approx(0.105).epsilon(1e-14));
  CHECK(delta2_star(0.3, 0.75).delta2_star == 0.5);
  CHECK(delta2_star(1.41, 1.0).delta2_star < 0.01);
  CHECK(delta2_star(1.41, 0.6).delta2_star < 0.01);
  CHECK(beta_max(1.40, 1.0) > 0.0);
  for (double gamma : {0.6, 1.0}) {
    CHECK(beta_max(std::sqrt(2.0) + 0.01, gamma) == 0.0);
    CHECK(beta_max(3.0, gamma) == 0.0);
    CHECK(delta2_star(3.0, gamma).delta2_star == 0.0);
  }
  CHECK_THROWS_AS(delta2_star(0.2, 0.5), GammaOutOfRange);
}

TEST_CASE("delta2 star against golden-section oracle") {
  for (double gamma : {0.6, 0.8, 1.0}) {
    for (double sigma : {0.1, 0.5, 0.9, 1.1, 1.3, 1.39}) {
      auto h = [&](double d) {
        return std::pow(d / (1.0 + d), d + 1.0) - 0.5 * sigma * sigma * d * (d + 1.0);
      };
      const double hi = 2.0 * gamma - 1.0;
      const double best = std::max({0.0, h(hi), -oracle::golden_min([&](double d) { return -h(d); },
                                                                   1e-12, hi)});
      const auto s = delta2_star(sigma, gamma);
      CHECK(s.objective == doctest::Approx(best).epsilon(1e-12));
      CHECK(s.delta2_star >= 0.0);
      CHECK(s.delta2_star <= hi);
    }
  }
}

TEST_CASE("interior delta2 star does not depend on gamma") {
  for (double sigma : {0.8, 1.0, 1.2, 1.3}) {
    const auto a = delta2_star(sigma, 0.6);
    const auto b = delta2_star(sigma, 1.0);
    REQUIRE(a.delta2_star < 0.2);
    CHECK(a.delta2_star == doctest::Approx(b.delta2_star).epsilon(1e-5));
    CHECK(std::abs(beta_max(sigma, 0.6) - beta_max(sigma, 1.0)) < 1e-10);
  }
}

TEST_CASE("region curves") {
  std::vector<double> sigmas;
  for (int i = 0; i <= 130; ++i) sigmas.push_back(0.1 + 0.01 * i);
  for (double gamma : {0.6, 0.75, 0.9, 1.0}) {
    const auto par = region_curve(gamma, sigmas, Execution::Parallel);
    const auto ser = region_curve(gamma, sigmas, Execution::Serial);
    REQUIRE(par.points.size() == sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
      CHECK(par.points[i].beta_max == ser.points[i].beta_max);
      CHECK(par.points[i].beta_max == beta_max(sigmas[i], gamma));
      CHECK(par.points[i].beta_max >= 0.0);
      CHECK(par.points[i].delta2_star >= 0.0);
      CHECK(par.points[i].delta2_star <= 2.0 * gamma - 1.0);
      if (i > 0) CHECK(par.points[i].beta_max <= par.points[i - 1].beta_max);
    }
  }
  // the region shrinks away as gamma approaches 1/2
  double prev = INFINITY;
  for (double gamma : {0.75, 0.6, 0.55, 0.51, 0.5001}) {
    const auto c = region_curve(gamma, sigmas);
    double top = 0.0;
    for (const auto& pt : c.points) top = std::max(top, pt.beta_max);
    CHECK(top < prev);
    prev = top;
  }
  CHECK(prev < 2.0 * 0.0001);
}

TEST_CASE("kappa delta and the closed-form infimum") {
  CHECK(kappa_delta(0.0) == 2.0);
  CHECK(std::abs(kappa_delta(1.0) - 3.0 * std::pow(2.0, -2.0 / 3.0)) < 1e-12);
  for (int i = 1; i <= 100; ++i) {
    CHECK(kappa_delta(i / 100.0) < kappa_delta((i - 1) / 100.0));
    CHECK(kappa_delta(i / 100.0) > 1.0);
  }
  CHECK(min_F_hat(1.0, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-15));
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lg(-3.0, 3.0);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double a = std::pow(10.0, lg(rng));
    const double b = std::pow(10.0, lg(rng));
    const double d1 = un(rng);
    const double brute = oracle::golden_min(
        [&](double u) { return a * std::exp((d1 + 1.0) * u) + b * std::exp(-u); }, -40.0, 40.0);
    CHECK(min_F_hat(a, b, d1) == doctest::Approx(brute).epsilon(1e-8));
    CHECK(min_F_hat(7.5 * a, 7.5 * b, d1) == doctest::Approx(7.5 * min_F_hat(a, b, d1)));
  }
  CHECK_THROWS_AS(min_F_hat(0.0, 1.0, 0.5), DomainError);
}

TEST_CASE("kappas") {
  const auto p = params(0.3, 0.02);
  const auto d = DeltaPair::from_delta2(0.4, 1.0);
  const auto k = kappas(2.5, p, d);
  CHECK(k.kappa1 == doctest::Approx(to_d(oracle::kappa1(Big("2.5"), Big("0.3"), Big("0.02"),
                                                        d.delta1, d.delta2)))
                        .epsilon(1e-13));
  CHECK(k.kappa2 == doctest::Approx(to_d(oracle::kappa2(Big("2.5"), Big("0.3"), Big("0.02"),
                                                        d.delta2)))
                        .epsilon(1e-13));
  const double c = growth_coefficient(p, d);
  CHECK(kappas(1e12, p, d).kappa1 == doctest::Approx(c / (d.delta1 * 0.09)).epsilon(1e-10));
  const double s = std::sqrt(2.0) - 1.0;
  const DeltaPair sym{s, s, 1.0};
  const auto ks = kappas(3.0, params(0.3, 0.0), sym);
  CHECK(ks.kappa2 / ks.kappa1 == doctest::Approx(0.09).epsilon(1e-13));
}

TEST_CASE("wedge soundness") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> un(0.0, 1.0);
  int tested = 0;
  for (int trial = 0; trial < 3000 && tested < 60; ++trial) {
    auto p = params(0.05 + 1.0 * un(rng), 0.03 * un(rng) * un(rng), 0.55 + 0.45 * un(rng));
    const auto d = DeltaPair::from_delta2((0.05 + 0.9 * un(rng)) * (2.0 * p.gamma - 1.0), p.gamma);
    const double R = std::pow(10.0, -1.0 + 4.0 * un(rng));
    const auto w = wedge_feasible_slopes(R, p, d);
    if (w.empty()) continue;
    ++tested;
    REQUIRE(w.region1);
    REQUIRE(w.region2);
    CHECK(w.region2->hi == doctest::Approx(w.region1->lo));
    const double lo = w.region2->lo;
    const double hi = w.region1->hi;
    for (int k = 0; k < 10; ++k) {
      const double slope = lo * std::pow(hi / lo, (k + 0.5) / 10.0);
      CHECK(w.contains(slope));
      CHECK(eq19p_margin(1.0, slope, R, p, d) >= -1e-12 * std::max(1.0, slope));
    }
    CHECK(eq19p_margin(1.0, 0.99 * lo, R, p, d) < 0.0);
    CHECK(eq19p_margin(1.0, 1.01 * hi, R, p, d) < 0.0);
    CHECK_FALSE(w.contains(0.99 * lo));
    CHECK_FALSE(w.contains(1.01 * hi));
  }
  CHECK(tested == 60);
}

TEST_CASE("wedge is non-empty exactly when F(R) >= 0") {
  for (double beta : {0.0, 0.01, 0.03, 0.05}) {
    const auto p = params(0.2, beta);
    for (double d2 : {0.1, 0.5, 0.9}) {
      const auto d = DeltaPair::from_delta2(d2, 1.0);
      for (int j = 0; j <= 40; ++j) {
        const double R = 0.01 * std::pow(10.0, j / 10.0);
        const double F = condition_F(R, p, d);
        if (std::abs(F) < 1e-9 * R * R) continue;
        CHECK(wedge_feasible_slopes(R, p, d).empty() == (F < 0.0));
      }
    }
  }
  CHECK(wedge_feasible_slopes(1.0, params(0.2, 100.0), DeltaPair::from_delta2(0.5, 1.0)).empty());
}

TEST_CASE("slopes under the printed region-2 line break the inequality") {
  // sigma = 0.2, beta = 0.05: condition II holds at R = 1/d2 but F < 0, and
  // slopes in (0, min{R^(d2(d1+2)), k1/(R^-d2 - k2)}] violate the inequality
  const auto p = params(0.2, 0.05);
  const auto d = DeltaPair::from_delta2(0.9, 1.0);
  const double R = 1.0 / d.delta2;
  CHECK(condition_G(R, d) >= growth_coefficient(p, d));
  CHECK(condition_F(R, p, d) < 0.0);
  const auto k = kappas(R, p, d);
  const double top = std::min(std::pow(R, d.delta2 * (d.delta1 + 2.0)),
                              k.kappa1 / (std::pow(R, -d.delta2) - k.kappa2));
  for (double f : {0.01, 0.5, 1.0}) CHECK(eq19p_margin(1.0, f * top, R, p, d) < 0.0);
  CHECK(wedge_feasible_slopes(R, p, d).empty());
}

TEST_CASE("Lyapunov construction from a non-empty wedge") {
  const auto p = params(0.2, 0.01);
  const auto rep = check_condition(p, Condition::I);
  REQUIRE(rep.satisfied);
  const auto spec = build_lyapunov(p, rep);
  CHECK(spec.construction == LyapunovSpec::Construction::Wedge);
  const auto w = wedge_feasible_slopes(spec.R, p, spec.deltas);
  CHECK(w.contains(spec.slope));
  CHECK(spec.c1 >= spec.c2 + spec.c3);
  CHECK(spec.R >= p.epsilon);
  CHECK(spec.C >= growth_coefficient(p, spec.deltas, CoefficientMode::Widened) - 1e-15);
  CHECK(spec.k2() < spec.k3());
  CHECK(k0(spec) > 0.0);
  const auto slack = verify_generator_inequality(spec, p);
  CHECK(slack.violations == 0);
  CHECK(corner_slack_bound(spec, p) >= 0.0);
}

TEST_CASE("Lyapunov construction by search when the wedge is empty") {
  const auto p = params(0.2, 0.05);
  const auto rep = check_condition(p, Condition::II);
  REQUIRE(rep.satisfied);
  REQUIRE(wedge_feasible_slopes(rep.witness_R, p, rep.witness_deltas).empty());
  const auto spec = build_lyapunov(p, rep);
  CHECK(spec.construction == LyapunovSpec::Construction::Search);
  CHECK(spec.c1 >= spec.c2 + spec.c3);
  CHECK(spec.k2() < spec.k3());
  CHECK(k0(spec) > 0.0);
  const auto slack = verify_generator_inequality(spec, p);
  CHECK(slack.violations == 0);
  CHECK(slack.min_slack > 0.0);

  ConditionReport bad = rep;
  bad.satisfied = false;
  CHECK_THROWS_AS(build_lyapunov(p, bad), InfeasibleWedge);
  CHECK_THROWS_AS(build_lyapunov(params(0.2, 0.2), check_condition(params(0.2, 0.2),
                                                                   Condition::II)),
                  InfeasibleWedge);
}

TEST_CASE("generator verification") {
  const auto p = params(0.2, 0.05);
  auto spec = build_lyapunov(p, check_condition(p, Condition::II));

  SUBCASE("grid excludes D and hugs its faces") {
    const VerifyGrid g;
    const auto pts = exterior_grid(spec.R, g);
    CHECK(pts.size() > 2 * g.n_face);
    for (const auto& s : pts) CHECK((s.r >= spec.R || s.y >= spec.R));
    std::size_t near = 0;
    for (const auto& s : pts) {
      if (s.r == spec.R * (1.0 + g.face_offset) || s.y == spec.R * (1.0 + g.face_offset)) ++near;
    }
    CHECK(near >= 2 * g.n_face);
  }

  SUBCASE("serial and parallel agree") {
    const auto a = verify_generator_inequality(spec, p, {}, Execution::Serial);
    const auto b = verify_generator_inequality(spec, p, {}, Execution::Parallel);
    CHECK(a.min_slack == b.min_slack);
    CHECK(a.min_r == b.min_r);
    CHECK(a.min_y == b.min_y);
    CHECK(a.violations == b.violations);
  }

  SUBCASE("corner slack dominates the closed-form bound") {
    const double bound = corner_slack_bound(spec, p);
    for (const auto& s : exterior_grid(spec.R, {})) {
      if (s.r < 2.0 * spec.R || s.y < 2.0 * spec.R) continue;
      const double slack = generator_apply(spec, s, p) - spec.C * spec.value(s.r, s.y);
      CHECK(slack >= bound - 1e-10);
    }
  }

  SUBCASE("corrupted constants are caught") {
    spec.c3 *= 100.0;
    spec.c1 = spec.c2 + spec.c3;
    CHECK(verify_generator_inequality(spec, p).violations > 0);
  }
}

TEST_CASE("Lyapunov value and partials") {
  LyapunovSpec s;
  s.deltas = DeltaPair::from_delta2(0.4, 1.0);
  s.c2 = 2.0;
  s.c3 = 3.0;
  s.c1 = 5.5;
  s.R = 1.5;
  const double d1 = s.deltas.delta1;
  const double d2 = s.deltas.delta2;
  for (auto [r, y] : {std::pair{0.3, 4.0}, std::pair{1e-9, 1e-9}, std::pair{50.0, 2.0}}) {
    const double naive = 5.5 - 2.0 * std::pow(1.0 + y, -d1) - 3.0 * std::pow(1.0 + r, -d2);
    CHECK(s.value(r, y) == doctest::Approx(naive).epsilon(1e-13));
    const auto pd = s.partials(r, y);
    const double h = 1e-6 * (1.0 + r);
    CHECK(pd.d_r ==
          doctest::Approx((s.value(r + h, y) - s.value(r - h, y)) / (2.0 * h)).epsilon(1e-6));
    CHECK(pd.d_y == doctest::Approx(2.0 * d1 * std::pow(1.0 + y, -d1 - 1.0)).epsilon(1e-14));
    CHECK(pd.d_rr ==
          doctest::Approx(-3.0 * d2 * (d2 + 1.0) * std::pow(1.0 + r, -d2 - 2.0)).epsilon(1e-14));
  }
  CHECK(s.k2() == doctest::Approx(5.5 - 2.0 * std::pow(2.5, -d1) - 3.0 * std::pow(2.5, -d2)));
  CHECK(s.k3() == doctest::Approx(5.5 - 2.0 * std::pow(4.0, -d1) - 3.0 * std::pow(4.0, -d2)));
}

TEST_CASE("K0") {
  LyapunovSpec s;
  s.deltas = DeltaPair::from_delta2(0.5, 1.0);
  s.c2 = 1.0;
  s.c3 = 2.0;
  s.c1 = 3.0;
  s.R = 2.0;
  const double d1 = s.deltas.delta1;
  const double d2 = s.deltas.delta2;
  CHECK(k0(s) == doctest::Approx(std::min(3.0 - std::pow(3.0, -d1) - 2.0,
                                          3.0 - 1.0 - 2.0 * std::pow(3.0, -d2))));
  CHECK(k0(s) > 0.0);
  s.R = 1e300;
  CHECK(k0(s) == doctest::Approx(3.0 - 2.0).epsilon(1e-6));
  const double sq = std::sqrt(2.0) - 1.0;
  LyapunovSpec sym;
  sym.deltas = DeltaPair{sq, sq, 1.0};
  sym.c2 = sym.c3 = 1.5;
  sym.c1 = 4.0;
  sym.R = 3.0;
  CHECK(k0(sym) == doctest::Approx(4.0 - 1.5 * (1.0 + std::pow(4.0, -sq))).epsilon(1e-14));
}

TEST_CASE("almost-sure explosion threshold") {
  const auto p = params(0.2, 0.05);
  const auto th = as_explosion_r0_threshold(1.0, p);
  Big lf;
  Big ls;
  oracle::r0_threshold_logs(1, Big("0.2"), Big("0.05"), lf, ls);
  CHECK(std::exp(to_d(lf)) == doctest::Approx(15.77).epsilon(1e-3));
  CHECK(th.log_value == doctest::Approx(to_d(ls)).epsilon(1e-13));
  CHECK(th.log_value > to_d(lf));
  CHECK_FALSE(th.overflow);
  CHECK(th.value == doctest::Approx(std::exp(to_d(ls))).epsilon(1e-12));

  double prev = -INFINITY;
  for (double R : {0.1, 0.5, 1.0, 2.0, 3.0}) {
    const double v = as_explosion_r0_threshold(R, p).log_value;
    CHECK(v > prev);
    prev = v;
  }
  const auto big_beta = params(0.2, 1e4);
  for (double R : {0.2, 1.0}) {
    oracle::r0_threshold_logs(R, Big("0.2"), Big(10000), lf, ls);
    const double want = std::max(to_d(lf), to_d(ls));
    CHECK(as_explosion_r0_threshold(R, big_beta).log_value == doctest::Approx(want).epsilon(1e-12));
  }
  const auto huge = as_explosion_r0_threshold(137.0, p);
  CHECK(huge.overflow);
  CHECK(std::isinf(huge.value));
  CHECK_THROWS_AS(as_explosion_r0_threshold(1.0, params(0.2, 0.0)), DomainError);
}

TEST_CASE("A5 function") {
  auto p = params(0.2, 0.05);
  const double R = 1.0;
  p.lambda0 = as_explosion_r0_threshold(R, p).value;
  const auto ok = verify_a5_function(p, R);
  CHECK(ok.negative());
  CHECK(ok.max_value < 0.0);
  CHECK(ok.n_points > 0);
  const auto ser = verify_a5_function(p, R, {}, Execution::Serial);
  CHECK(ser.max_value == ok.max_value);

  const auto low = verify_a5_function(params(0.2, 0.05), R);
  CHECK_FALSE(low.negative());
  CHECK(low.violations > 0);
}
