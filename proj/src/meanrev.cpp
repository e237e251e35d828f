#include "stochcal/meanrev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/numeric.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::meanrev {

namespace {

constexpr const char* kModule = "meanrev";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_vasicek(const VasicekParams& p, double dt) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.theta) ||
      !(p.sigma >= 0.0) || !std::isfinite(p.sigma)) {
    fail(ErrorCode::InvalidParam, kModule, "Vasicek needs alpha > 0 and sigma >= 0");
  }
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
}

void check_cir(const CirParams& p, double dt) {
  if (!(p.alpha > 0.0) || !(p.theta > 0.0) || !(p.sigma > 0.0) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.theta) || !std::isfinite(p.sigma)) {
    fail(ErrorCode::InvalidParam, kModule, "CIR needs positive alpha, theta, sigma");
  }
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
}

struct Regression {
  double c;
  double b;
  double delta2;
};

// Least squares of x_i on (1, x_{i-1}).
Regression ols(std::span<const double> x) {
  const std::size_t n = x.size() - 1;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sx += x[i - 1];
    sy += x[i];
  }
  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  for (std::size_t i = 1; i <= n; ++i) {
    const double dx = x[i - 1] - mx;
    sxx += dx * dx;
    sxy += dx * (x[i] - my);
  }
  if (!(sxx > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "lagged levels have zero variance");
  Regression r;
  r.b = sxy / sxx;
  r.c = my - r.b * mx;
  double ss = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double e = x[i] - r.c - r.b * x[i - 1];
    ss += e * e;
  }
  r.delta2 = ss / static_cast<double>(n);
  return r;
}

void need_points(std::span<const double> x, std::size_t n, const char* what) {
  if (x.size() < n) {
    fail(ErrorCode::InsufficientData, kModule,
         std::string(what) + " needs at least " + std::to_string(n) + " observations");
  }
}

CalibrationResult<VasicekParams> finish_vasicek(const ArCoefficients& ar, std::span<const double> x,
                                                double dt) {
  CalibrationResult<VasicekParams> out;
  out.params = from_ar(ar, dt);
  out.initial_guess = out.params;
  out.log_likelihood = vasicek_log_likelihood(out.params, x, dt);
  out.initial_log_likelihood = out.log_likelihood;
  out.converged = true;
  return out;
}

double unchecked_cir_log_pdf(double x_next, double x_prev, const CirParams& p, double dt) {
  if (!(x_next > 0.0) || !(x_prev > 0.0)) return -kInf;
  const double decay = std::exp(-p.alpha * dt);
  const double c = 2.0 * p.alpha / (p.sigma * p.sigma * -std::expm1(-p.alpha * dt));
  const double u = c * x_prev * decay;
  const double v = c * x_next;
  const double q = 2.0 * p.alpha * p.theta / (p.sigma * p.sigma) - 1.0;
  const double z = 2.0 * std::sqrt(u * v);
  return std::log(c) - u - v + 0.5 * q * (std::log(v) - std::log(u)) +
         specfun::log_bessel_i(q, z);
}

}  // namespace

ArCoefficients to_ar(const VasicekParams& p, double dt) {
  check_vasicek(p, dt);
  ArCoefficients ar;
  ar.b = std::exp(-p.alpha * dt);
  ar.c = -p.theta * std::expm1(-p.alpha * dt);
  ar.delta = p.sigma * std::sqrt(-std::expm1(-2.0 * p.alpha * dt) / (2.0 * p.alpha));
  return ar;
}

VasicekParams from_ar(const ArCoefficients& ar, double dt) {
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  if (!(ar.b > 0.0 && ar.b < 1.0)) {
    fail(ErrorCode::NonStationaryEstimate, kModule,
         "AR(1) slope " + std::to_string(ar.b) + " outside (0,1): no mean reversion detected");
  }
  const double lb = std::log(ar.b);
  VasicekParams p;
  p.alpha = -lb / dt;
  p.theta = ar.c / (1.0 - ar.b);
  p.sigma = ar.delta / std::sqrt((ar.b * ar.b - 1.0) * dt / (2.0 * lb));
  return p;
}

double vasicek_mean(const VasicekParams& p, double x0, double t) {
  return p.theta + (x0 - p.theta) * std::exp(-p.alpha * t);
}

double vasicek_variance(const VasicekParams& p, double t) {
  return p.sigma * p.sigma * -std::expm1(-2.0 * p.alpha * t) / (2.0 * p.alpha);
}

PathSet vasicek_simulate(const VasicekParams& params, double x0, std::size_t n_steps,
                         std::size_t n_paths, double dt, const RngStream& rng) {
  const auto ar = to_ar(params, dt);
  if (!std::isfinite(x0)) fail(ErrorCode::InvalidParam, kModule, "x0 must be finite");
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  for (std::size_t p = 0; p < n_paths; ++p) {
    RngStream z = rng.child(p).child(0);
    auto row = out.path(p);
    row[0] = x0;
    for (std::size_t i = 1; i <= n_steps; ++i) row[i] = ar.c + ar.b * row[i - 1] + ar.delta * z.normal();
  }
  return out;
}

double vasicek_log_likelihood(const VasicekParams& params, std::span<const double> x, double dt) {
  const auto ar = to_ar(params, dt);
  const double v = ar.delta * ar.delta;
  double ll = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double e = x[i] - ar.c - ar.b * x[i - 1];
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * v) + e * e / v);
  }
  return ll;
}

CalibrationResult<VasicekParams> vasicek_calibrate_ols(std::span<const double> x, double dt) {
  need_points(x, 10, "Vasicek calibration");
  const auto r = ols(x);
  if (!(r.delta2 > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "regression fits exactly");
  return finish_vasicek({r.c, r.b, std::sqrt(r.delta2)}, x, dt);
}

CalibrationResult<VasicekParams> vasicek_calibrate_mle(std::span<const double> x, double dt) {
  need_points(x, 10, "Vasicek calibration");
  const std::size_t n = x.size() - 1;
  const double nn = static_cast<double>(n);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    sx += x[i - 1];
    sy += x[i];
    sxx += x[i - 1] * x[i - 1];
    sxy += x[i - 1] * x[i];
  }
  const double den = nn * sxx - sx * sx;
  if (!(den > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "lagged levels have zero variance");
  const double b = (nn * sxy - sx * sy) / den;
  if (!(b > 0.0 && b < 1.0)) {
    fail(ErrorCode::NonStationaryEstimate, kModule,
         "AR(1) slope " + std::to_string(b) + " outside (0,1): no mean reversion detected");
  }
  const double theta = (sy - b * sx) / (nn * (1.0 - b));
  double ss = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double e = x[i] - b * x[i - 1] - theta * (1.0 - b);
    ss += e * e;
  }
  const double delta2 = ss / nn;
  if (!(delta2 > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "regression fits exactly");
  return finish_vasicek({theta * (1.0 - b), b, std::sqrt(delta2)}, x, dt);
}

ExpVasicekFit exp_vasicek_calibrate(std::span<const double> x, double dt) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) fail(ErrorCode::NonPositiveLevel, kModule, "levels must be positive");
    y[i] = std::log(x[i]);
  }
  ExpVasicekFit out{vasicek_calibrate_ols(y, dt), 0.0};
  const auto& p = out.log_fit.params;
  out.m = p.theta + p.sigma * p.sigma / (2.0 * p.alpha);
  return out;
}

PathSet exp_vasicek_simulate(const VasicekParams& params, double x0, std::size_t n_steps,
                             std::size_t n_paths, double dt, const RngStream& rng) {
  if (!(x0 > 0.0)) fail(ErrorCode::InvalidParam, kModule, "x0 must be positive");
  PathSet out = vasicek_simulate(params, std::log(x0), n_steps, n_paths, dt, rng);
  for (auto& v : out.values) v = std::exp(v);
  return out;
}

bool feller_satisfied(const CirParams& p) { return p.sigma * p.sigma <= 2.0 * p.alpha * p.theta; }

double cir_mean(const CirParams& p, double x0, double t) {
  return p.theta + (x0 - p.theta) * std::exp(-p.alpha * t);
}

double cir_variance(const CirParams& p, double x0, double t) {
  const double e1 = std::exp(-p.alpha * t);
  const double s2 = p.sigma * p.sigma;
  return x0 * s2 / p.alpha * (e1 - e1 * e1) + p.theta * s2 / (2.0 * p.alpha) * (1.0 - e1) * (1.0 - e1);
}

PathSet cir_simulate(const CirParams& params, double x0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng, Scheme scheme) {
  check_cir(params, dt);
  if (!(x0 > 0.0)) fail(ErrorCode::InvalidParam, kModule, "x0 must be positive");
  if (scheme == Scheme::Euler && !(params.alpha * dt < 1.0)) {
    fail(ErrorCode::InvalidParam, kModule, "Euler scheme needs alpha dt < 1");
  }
  PathSet out(n_paths, n_steps, dt, rng.seed(), scheme);
  const double decay = std::exp(-params.alpha * dt);
  const double c = 2.0 * params.alpha / (params.sigma * params.sigma * -std::expm1(-params.alpha * dt));
  const double q = 2.0 * params.alpha * params.theta / (params.sigma * params.sigma) - 1.0;
  const double vol = params.sigma * std::sqrt(dt);
  for (std::size_t p = 0; p < n_paths; ++p) {
    RngStream z = rng.child(p).child(0);
    auto row = out.path(p);
    row[0] = x0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
      const double prev = row[i - 1];
      if (scheme == Scheme::Exact) {
        const double u = c * prev * decay;
        const auto n = sample_poisson(z, u);
        row[i] = sample_gamma(z, q + 1.0 + static_cast<double>(n), 1.0) / c;
      } else {
        row[i] = params.alpha * params.theta * dt + (1.0 - params.alpha * dt) * prev +
                 vol * std::sqrt(std::max(prev, 0.0)) * z.normal();
      }
    }
  }
  return out;
}

double cir_log_transition_pdf(double x_next, double x_prev, const CirParams& params, double dt) {
  check_cir(params, dt);
  if (!(x_prev > 0.0)) fail(ErrorCode::InvalidParam, kModule, "x_prev must be positive");
  if (!(x_next >= 0.0)) fail(ErrorCode::InvalidParam, kModule, "x_next must be nonnegative");
  return unchecked_cir_log_pdf(x_next, x_prev, params, dt);
}

double cir_transition_pdf(double x_next, double x_prev, const CirParams& params, double dt) {
  return std::exp(cir_log_transition_pdf(x_next, x_prev, params, dt));
}

double cir_log_likelihood(const CirParams& params, std::span<const double> x, double dt) {
  check_cir(params, dt);
  double ll = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) ll += unchecked_cir_log_pdf(x[i], x[i - 1], params, dt);
  return ll;
}

CirParams cir_initial_guess(std::span<const double> x, double dt) {
  need_points(x, 10, "CIR initial guess");
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  const auto r = ols(x);
  const double b = std::clamp(r.b, 1e-3, 0.999);
  const double n = static_cast<double>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= n;
  CirParams p;
  p.alpha = -std::log(b) / dt;
  p.theta = mean;
  p.sigma = std::sqrt(2.0 * p.alpha * var / mean);
  return p;
}

CirFit cir_calibrate(std::span<const double> x, double dt) {
  need_points(x, 50, "CIR calibration");
  for (double v : x) {
    if (!(v > 0.0)) fail(ErrorCode::NonPositiveLevel, kModule, "CIR levels must be positive");
  }
  const CirParams guess = cir_initial_guess(x, dt);
  if (!(guess.sigma > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "levels have zero variance");

  auto decode = [](std::span<const double> z) {
    return CirParams{std::exp(z[0]), std::exp(z[1]), std::exp(z[2])};
  };
  auto objective = [&](std::span<const double> z) {
    const CirParams p = decode(z);
    double ll = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) ll += unchecked_cir_log_pdf(x[i], x[i - 1], p, dt);
    return -ll;
  };
  numeric::MinimizeOptions opts;
  opts.max_evaluations = 4000;
  const auto res = numeric::minimize(
      objective, {std::log(guess.alpha), std::log(guess.theta), std::log(guess.sigma)},
      {0.5, 0.1, 0.2}, opts);

  CirFit out;
  auto& r = out.result;
  r.initial_guess = guess;
  r.initial_log_likelihood = cir_log_likelihood(guess, x, dt);
  r.params = decode(res.x);
  r.log_likelihood = -res.value;
  r.iterations = res.iterations;
  r.converged = res.converged;
  if (r.initial_log_likelihood > r.log_likelihood) {
    r.params = guess;
    r.log_likelihood = r.initial_log_likelihood;
  }
  out.feller_satisfied = feller_satisfied(r.params);
  return out;
}

}  // namespace stochcal::meanrev
