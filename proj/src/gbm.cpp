#include "stochcal/gbm.hpp"

#include <cmath>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::gbm {

namespace {

constexpr const char* kModule = "gbm";

void check_params(const GbmParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || p.sigma < 0.0) {
    fail(ErrorCode::InvalidParam, kModule, "need finite mu and sigma >= 0");
  }
}

struct Moments {
  double m;
  double v;
};

// Shifted by the first value, so constant data give exactly zero variance.
Moments sample_moments(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double k = x.front();
  double d = 0.0;
  for (double v : x) d += v - k;
  d /= n;
  double s = 0.0;
  for (double v : x) s += (v - k - d) * (v - k - d);
  return {k + d, s / n};
}

double gaussian_ll(const std::vector<double>& x, double m, double v) {
  double ss = 0.0;
  for (double xi : x) ss += (xi - m) * (xi - m);
  const double n = static_cast<double>(x.size());
  return -0.5 * n * std::log(2.0 * std::numbers::pi * v) - 0.5 * ss / v;
}

}  // namespace

PathSet simulate(const GbmParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                 double dt, const RngStream& rng) {
  check_params(params);
  if (!(s0 > 0.0) || !(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "need s0 > 0 and dt > 0");
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
  const double vol = params.sigma * std::sqrt(dt);
  for (std::size_t p = 0; p < n_paths; ++p) {
    RngStream z = rng.child(p).child(0);
    auto row = out.path(p);
    row[0] = s0;
    double log_s = std::log(s0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
      log_s += drift + vol * z.normal();
      row[i] = std::exp(log_s);
    }
  }
  return out;
}

double log_likelihood(const GbmParams& params, const LogReturns& x) {
  check_params(params);
  const double m = (params.mu - 0.5 * params.sigma * params.sigma) * x.dt;
  const double v = params.sigma * params.sigma * x.dt;
  return gaussian_ll(x.values, m, v);
}

CalibrationResult<GbmParams> calibrate(const LogReturns& x) {
  if (x.size() < 2) fail(ErrorCode::InsufficientData, kModule, "need at least two returns");
  if (!(x.dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  const auto [m, v] = sample_moments(x.values);
  if (!(v > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "returns have zero variance");
  GbmParams p;
  p.sigma = std::sqrt(v / x.dt);
  p.mu = m / x.dt + 0.5 * p.sigma * p.sigma;

  CalibrationResult<GbmParams> out;
  out.params = p;
  out.initial_guess = p;
  out.log_likelihood = gaussian_ll(x.values, m, v);
  out.initial_log_likelihood = out.log_likelihood;
  out.converged = true;
  const double n = static_cast<double>(x.size());
  // Delta method on se(m) = sqrt(v/n), se(v) = v sqrt(2/n).
  const double se_sigma = p.sigma / std::sqrt(2.0 * n);
  const double se_mu = std::sqrt(v / n) / x.dt;
  out.stderr_estimates = std::vector<double>{se_mu, se_sigma};
  return out;
}

Interval ci_mean(const LogReturns& x, double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidParam, kModule, "level must lie in (0,1)");
  if (x.size() < 2) fail(ErrorCode::InsufficientData, kModule, "need at least two returns");
  const auto [m, v] = sample_moments(x.values);
  const double z = specfun::normal_quantile(0.5 * (1.0 + level));
  const double half = z * std::sqrt(v / static_cast<double>(x.size()));
  return {m - half, m + half};
}

Interval ci_variance(const LogReturns& x, double level) {
  if (!(level > 0.0 && level < 1.0)) fail(ErrorCode::InvalidParam, kModule, "level must lie in (0,1)");
  if (x.size() < 2) fail(ErrorCode::InsufficientData, kModule, "need at least two returns");
  const auto [m, v] = sample_moments(x.values);
  if (!(v > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "returns have zero variance");
  const double n = static_cast<double>(x.size());
  const double q_lo = specfun::chi2_quantile(0.5 * (1.0 - level), n);
  const double q_hi = specfun::chi2_quantile(0.5 * (1.0 + level), n);
  return {n * v / q_hi, n * v / q_lo};
}

std::vector<MomentSample> bootstrap_params(const GbmParams& params, std::size_t n_obs, double dt,
                                           std::size_t n_boot, const RngStream& rng) {
  check_params(params);
  if (n_boot < 1 || n_obs < 1 || !(dt > 0.0)) {
    fail(ErrorCode::InvalidParam, kModule, "need n_boot >= 1, n_obs >= 1 and dt > 0");
  }
  const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
  const double vol = params.sigma * std::sqrt(dt);
  std::vector<MomentSample> out(n_boot);
  std::vector<double> x(n_obs);
  for (std::size_t r = 0; r < n_boot; ++r) {
    RngStream z = rng.child(r);
    for (auto& xi : x) xi = drift + vol * z.normal();
    const auto [m, v] = sample_moments(x);
    out[r] = {m, v};
  }
  return out;
}

double horizon_percentile(const GbmParams& params, double s0, double horizon, double p) {
  check_params(params);
  if (!(s0 > 0.0) || !(horizon > 0.0) || !(p > 0.0 && p < 1.0)) {
    fail(ErrorCode::InvalidParam, kModule, "need s0 > 0, horizon > 0 and p in (0,1)");
  }
  const double z = params.sigma == 0.0 ? 0.0 : specfun::normal_quantile(p);
  return s0 * std::exp((params.mu - 0.5 * params.sigma * params.sigma) * horizon +
                       params.sigma * std::sqrt(horizon) * z);
}

double terminal_mean(const GbmParams& params, double s0, double horizon) {
  return s0 * std::exp(params.mu * horizon);
}

double terminal_variance(const GbmParams& params, double s0, double horizon) {
  return s0 * s0 * std::exp(2.0 * params.mu * horizon) *
         std::expm1(params.sigma * params.sigma * horizon);
}

}  // namespace stochcal::gbm
