#pragma once

#include <cstddef>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::gbm {

/// dS = mu S dt + sigma S dW.
struct GbmParams {
  double mu = 0.0;
  double sigma = 0.0;
};

/// Exact scheme S_{i+1} = S_i exp((mu - sigma^2/2) dt + sigma sqrt(dt) Z).
/// Path p draws from rng.child(p).child(0).
PathSet simulate(const GbmParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                 double dt, const RngStream& rng);

/// Gaussian log-likelihood of log-returns under params.
double log_likelihood(const GbmParams& params, const LogReturns& x);

/// Closed-form MLE: m = mean, v = biased variance, sigma = sqrt(v/dt),
/// mu = m/dt + sigma^2/2.
CalibrationResult<GbmParams> calibrate(const LogReturns& x);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// m +- z sqrt(v/n), z = normal_quantile((1 + level)/2).
Interval ci_mean(const LogReturns& x, double level);
/// (n v / q_U, n v / q_L) with chi-squared quantiles on n degrees of freedom.
Interval ci_variance(const LogReturns& x, double level);

struct MomentSample {
  double m = 0.0;
  double v = 0.0;
};

/// Replication r simulates n_obs returns from rng.child(r) and re-estimates (m, v).
std::vector<MomentSample> bootstrap_params(const GbmParams& params, std::size_t n_obs, double dt,
                                           std::size_t n_boot, const RngStream& rng);

/// Lognormal quantile s0 exp((mu - sigma^2/2) T + sigma sqrt(T) normal_quantile(p)).
double horizon_percentile(const GbmParams& params, double s0, double horizon, double p);

/// E[S(T)] and Var[S(T)].
double terminal_mean(const GbmParams& params, double s0, double horizon);
double terminal_variance(const GbmParams& params, double s0, double horizon);

}  // namespace stochcal::gbm
