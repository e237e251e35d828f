#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::jumps {

/// dS = mu S dt + sigma S dW + S dJ with Poisson(lambda) arrivals and
/// log jump sizes N(mu_y, sigma_y^2).
struct JumpGbmParams {
  double mu = 0.0;
  double sigma = 0.0;
  double lambda = 0.0;
  double mu_y = 0.0;
  double sigma_y = 0.0;
};

/// Drift of the compensated log-return form, mu* = mu + lambda mu_y - sigma^2/2.
double compensated_drift(const JumpGbmParams& p);
/// Inverse of compensated_drift: returns params with mu chosen so that mu* matches.
JumpGbmParams from_compensated_drift(double mu_star, double sigma, double lambda, double mu_y,
                                     double sigma_y);

/// One-step draws split into their parts:
///   returns = mu* dt + sigma sqrt(dt) Z + jumps,
///   jumps   = sum of n_t log-jumps - lambda dt mu_y.
struct Increments {
  std::vector<double> returns;
  std::vector<double> jumps;
  std::vector<std::uint64_t> counts;
};

/// Draw k uses rng.child(k); diffusion from child(0), jumps from child(1).
Increments simulate_increments(const JumpGbmParams& params, std::size_t n, double dt,
                               const RngStream& rng);

/// Levels from exponentiated cumulative returns. Path p uses rng.child(p) with
/// the diffusion on child(0) (matching gbm::simulate) and jumps on child(1).
PathSet simulate(const JumpGbmParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                 double dt, const RngStream& rng);

/// Poisson-weighted Gaussian mixture density of a one-step log-return. The
/// sum stops once the Poisson mass reaches 1 - 1e-12, or after 200 terms.
double mixture_density(double x, const JumpGbmParams& params, double dt);
double log_mixture_density(double x, const JumpGbmParams& params, double dt);

double log_likelihood(const JumpGbmParams& params, const LogReturns& x);

/// Multi-start MLE; starts at lambda in {0.1, 1, 5, 10, 25} per year plus the
/// jump-free GBM fit as a nested candidate, which is returned unless the jump
/// fit improves the likelihood significantly (LR test at 5%).
CalibrationResult<JumpGbmParams> calibrate(const LogReturns& x);

}  // namespace stochcal::jumps
