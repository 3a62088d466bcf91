#include "qghjm/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qghjm/errors.hpp"

namespace qghjm {

namespace {

void require(bool ok, const char* what, double value) {
  if (!ok) {
    std::ostringstream os;
    os << what << " (got " << value << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  require(std::isfinite(sigma) && sigma > 0.0, "sigma must be > 0", sigma);
  require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0", beta);
  require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0, 1]", gamma);
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0", epsilon);
  require(std::isfinite(lambda0) && lambda0 > epsilon, "lambda0 must exceed epsilon", lambda0);
  require(std::isfinite(displacement) && displacement >= 0.0, "displacement must be >= 0",
          displacement);
  if (vol_cap) require(*vol_cap > 0.0, "vol_cap must be > 0", *vol_cap);
}

EpsCevVolatility::EpsCevVolatility(const ModelParams& p)
    : sigma_(p.sigma),
      gamma_(p.gamma),
      eps_(p.epsilon),
      eps_pow_(std::pow(p.epsilon, p.gamma - 1.0)),
      shift_(p.displacement),
      cap_(p.vol_cap.value_or(std::numeric_limits<double>::infinity())),
      lognormal_(p.gamma == 1.0) {}

double EpsCevVolatility::operator()(double x) const {
  const double u = x + shift_;
  if (!(u > 0.0)) return 0.0;
  double v;
  if (lognormal_) {
    v = sigma_ * u;
  } else {
    // gamma - 1 < 0, so the power branch is the smaller one above eps
    const double factor = u > eps_ ? std::pow(u, gamma_ - 1.0) : eps_pow_;
    v = sigma_ * u * factor;
  }
  return std::min(v, cap_);
}

double sigma_r(double x, const ModelParams& p) { return EpsCevVolatility(p)(x); }

Drift drift(const State& s, const ModelParams& p, const ForwardCurve& curve) {
  const double vol = sigma_r(s.r, p);
  return {s.y - p.beta * s.r + p.beta * curve.value(s.t) + curve.slope(s.t),
          vol * vol - 2.0 * p.beta * s.y};
}

double diffusion(const State& s, const ModelParams& p) { return sigma_r(s.r, p); }

double generator_apply(const FieldPartials& v, const State& s, const ModelParams& p) {
  const double vol = sigma_r(s.r, p);
  const double var = vol * vol;
  return (var - 2.0 * p.beta * s.y) * v.d_y + (s.y - p.beta * s.r + p.beta * p.lambda0) * v.d_r +
         0.5 * var * v.d_rr;
}

}  // namespace qghjm
