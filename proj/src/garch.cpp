#include "stochcal/garch.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/numeric.hpp"

namespace stochcal::garch {

namespace {

constexpr const char* kModule = "garch";

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// z = (mu, log omega, logit persistence, logit alpha share, gamma).
NgarchParams from_free(std::span<const double> z, double sigma0_sq) {
  NgarchParams p;
  p.mu = z[0];
  p.omega = std::exp(z[1]);
  p.gamma = z[4];
  const double s = logistic(z[2]);
  const double w = logistic(z[3]);
  p.alpha = s * w;
  p.beta = s * (1.0 - w) / (1.0 + p.gamma * p.gamma);
  p.sigma0_sq = sigma0_sq;
  return p;
}

std::vector<double> to_free(const NgarchParams& p) {
  const double s = persistence(p);
  return {p.mu, std::log(p.omega), logit(s), logit(p.alpha / s), p.gamma};
}

double unchecked_ll(const NgarchParams& p, std::span<const double> x, double dt) {
  const double m = p.mu * dt;
  double var = p.sigma0_sq;
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(var > 0.0) || !std::isfinite(var)) return -std::numeric_limits<double>::infinity();
    const double e = x[i] - m;
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * var) + e * e / var);
    var = next_variance(p, var, e);
  }
  return ll;
}

}  // namespace

double persistence(const NgarchParams& p) { return p.alpha + p.beta * (1.0 + p.gamma * p.gamma); }

double stationary_variance(const NgarchParams& p) { return p.omega / (1.0 - persistence(p)); }

void validate(const NgarchParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.omega) || !std::isfinite(p.alpha) ||
      !std::isfinite(p.beta) || !std::isfinite(p.gamma) || !std::isfinite(p.sigma0_sq)) {
    fail(ErrorCode::InvalidParam, kModule, "parameters must be finite");
  }
  if (!(p.omega > 0.0) || p.alpha < 0.0 || p.beta < 0.0 || !(p.sigma0_sq > 0.0)) {
    fail(ErrorCode::InvalidParam, kModule, "need omega > 0, alpha >= 0, beta >= 0, sigma0_sq > 0");
  }
  if (!(persistence(p) < 1.0)) {
    fail(ErrorCode::StationarityViolated, kModule, "alpha + beta (1 + gamma^2) must be below 1");
  }
}

double next_variance(const NgarchParams& p, double variance, double shock) {
  const double d = shock - p.gamma * std::sqrt(variance);
  return p.omega + p.alpha * variance + p.beta * d * d;
}

std::vector<double> conditional_variances(const NgarchParams& p, std::span<const double> shocks) {
  validate(p);
  std::vector<double> out(shocks.size());
  double var = p.sigma0_sq;
  for (std::size_t i = 0; i < shocks.size(); ++i) {
    out[i] = var;
    var = next_variance(p, var, shocks[i]);
  }
  return out;
}

NgarchPaths simulate(const NgarchParams& params, double s0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng) {
  validate(params);
  if (!(s0 > 0.0) || !(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "need s0 > 0 and dt > 0");
  NgarchPaths out{PathSet(n_paths, n_steps, dt, rng.seed(), Scheme::Exact),
                  std::vector<double>(n_paths * n_steps)};
  const double drift = params.mu * dt;
  for (std::size_t p = 0; p < n_paths; ++p) {
    RngStream z = rng.child(p).child(0);
    auto row = out.levels.path(p);
    row[0] = s0;
    double var = params.sigma0_sq;
    for (std::size_t i = 1; i <= n_steps; ++i) {
      out.variances[p * n_steps + i - 1] = var;
      const double e = std::sqrt(var) * z.normal();
      row[i] = row[i - 1] * (1.0 + drift + e);
      var = next_variance(params, var, e);
    }
  }
  return out;
}

double log_likelihood(const NgarchParams& params, std::span<const double> returns, double dt) {
  validate(params);
  return unchecked_ll(params, returns, dt);
}

CalibrationResult<NgarchParams> calibrate(std::span<const double> x, double dt) {
  const std::size_t n = x.size();
  if (n < 50) fail(ErrorCode::InsufficientData, kModule, "NGARCH calibration needs n >= 50");
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  double shift = 0.0;
  for (double v : x) shift += v - x[0];
  shift /= static_cast<double>(n);
  const double mean = x[0] + shift;
  double var = 0.0;
  for (double v : x) var += (v - x[0] - shift) * (v - x[0] - shift);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "returns have zero variance");

  NgarchParams guess;
  guess.mu = mean / dt;
  guess.alpha = 0.85;
  guess.beta = 0.05;
  guess.gamma = 0.0;
  guess.omega = var * (1.0 - persistence(guess));
  guess.sigma0_sq = var;
  validate(guess);

  NgarchParams flat;
  flat.mu = mean / dt;
  flat.omega = var;
  flat.sigma0_sq = var;

  auto objective = [&](std::span<const double> z) {
    return -unchecked_ll(from_free(z, var), x, dt);
  };
  numeric::MinimizeOptions opts;
  opts.max_evaluations = 6000;
  const double mu_step = std::max(std::sqrt(var / static_cast<double>(n)) / dt, 1e-8);
  const auto res = numeric::minimize(objective, to_free(guess), {mu_step, 0.5, 0.5, 0.5, 0.3}, opts);

  CalibrationResult<NgarchParams> out;
  out.initial_guess = guess;
  out.initial_log_likelihood = unchecked_ll(guess, x, dt);
  out.params = from_free(res.x, var);
  out.log_likelihood = -res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;
  const double flat_ll = unchecked_ll(flat, x, dt);
  if (flat_ll > out.log_likelihood) {
    out.params = flat;
    out.log_likelihood = flat_ll;
  }
  if (!std::isfinite(out.log_likelihood)) {
    fail(ErrorCode::OptimizerFailed, kModule, "likelihood is not finite at the optimum");
  }
  return out;
}

}  // namespace stochcal::garch
