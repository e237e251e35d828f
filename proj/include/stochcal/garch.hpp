#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::garch {

/// NGARCH(1,1) on per-step returns x_i = mu dt + e_i, e_i = sigma_i Z_i, with
///   sigma_i^2 = omega + alpha sigma_{i-1}^2 + beta (e_{i-1} - gamma sigma_{i-1})^2.
/// Variances are per step. gamma = 0 gives GARCH(1,1).
struct NgarchParams {
  double mu = 0.0;  // drift per year
  double omega = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double sigma0_sq = 0.0;  // conditional variance of the first return
};

/// alpha + beta (1 + gamma^2).
double persistence(const NgarchParams& p);
/// omega / (1 - persistence).
double stationary_variance(const NgarchParams& p);

/// Throws InvalidParam for omega <= 0, negative alpha or beta, sigma0_sq <= 0
/// or non-finite values; StationarityViolated if persistence >= 1.
void validate(const NgarchParams& p);

/// sigma_i^2 for i = 0 .. n-1 given the shocks e_0 .. e_{n-1}.
std::vector<double> conditional_variances(const NgarchParams& p, std::span<const double> shocks);

/// Next-step variance from the current state and shock.
double next_variance(const NgarchParams& p, double variance, double shock);

struct NgarchPaths {
  PathSet levels;
  std::vector<double> variances;  // n_paths x n_steps, row-major
};

/// S_i = S_{i-1} (1 + mu dt + e_i). Path p draws from rng.child(p).child(0).
NgarchPaths simulate(const NgarchParams& params, double s0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng);

/// Full Gaussian log-likelihood of the returns, constants included.
double log_likelihood(const NgarchParams& params, std::span<const double> returns, double dt);

/// MLE over (mu, omega, alpha, beta, gamma) with sigma0_sq fixed at the
/// sample variance. The constant-variance model is evaluated as a nested
/// candidate, so the fit never falls below it.
CalibrationResult<NgarchParams> calibrate(std::span<const double> returns, double dt);

}  // namespace stochcal::garch
