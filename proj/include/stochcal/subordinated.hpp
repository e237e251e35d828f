#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::subordinated {

/// Variance Gamma: X(dt) = mu_bar dt + theta_bar g + sigma_bar sqrt(g) Z with
/// g ~ Gamma(dt/nu, nu).
struct VgParams {
  double mu_bar = 0.0;
  double theta_bar = 0.0;
  double sigma_bar = 0.0;
  double nu = 0.0;
};

/// Normal inverse Gaussian with alpha >= |beta|, delta > 0. Over a step dt
/// the scale and location become delta dt and mu dt.
struct NigParams {
  double alpha = 0.0;
  double beta = 0.0;
  double delta = 0.0;
  double mu = 0.0;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // raw, 3 for the normal law
};

// Variance Gamma

/// Closed-form increment density with Bessel order dt/nu - 1/2, assembled in
/// log space. At x = mu_bar dt the deviation is nudged by 1e-12 max(1, |mu_bar dt|).
double vg_density(double x, const VgParams& params, double dt);
double vg_log_density(double x, const VgParams& params, double dt);

/// Distribution function by adaptive quadrature of vg_density.
double vg_cdf(double x, const VgParams& params, double dt);

Moments vg_moments(const VgParams& params, double dt);

/// Moment-matched start: sigma = sqrt(V/dt), nu = (K/3 - 1) dt,
/// theta = S sigma sqrt(dt) / (3 nu), mu = M/dt - theta. When nu falls to the
/// floor 1e-4 dt, theta is set to 0.
VgParams vg_initial_guess(const LogReturns& x);

double vg_log_likelihood(const VgParams& params, const LogReturns& x);

CalibrationResult<VgParams> vg_calibrate(const LogReturns& x);

/// Path p uses rng.child(p): subordinator on child(1), Gaussian on child(0).
PathSet vg_simulate(const VgParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                    double dt, const RngStream& rng);

struct VgIncrements {
  std::vector<double> increments;
  std::vector<double> clock;  // subordinator increments g
};
/// Independent one-step draws; draw k uses rng.child(k).
VgIncrements vg_sample_increments(const VgParams& params, std::size_t n, double dt,
                                  const RngStream& rng);

/// Quantiles of the increment over each horizon by numeric CDF inversion.
/// Row h holds the quantiles for horizons[h], one per entry of probs.
std::vector<std::vector<double>> vg_percentiles(const VgParams& params,
                                                std::span<const double> horizons,
                                                std::span<const double> probs);

// Normal inverse Gaussian

double nig_density(double x, const NigParams& params, double dt);
double nig_log_density(double x, const NigParams& params, double dt);
double nig_cdf(double x, const NigParams& params, double dt);

Moments nig_moments(const NigParams& params, double dt);

/// Inverts the four moment equations for (alpha, beta, delta, mu). Excess
/// kurtosis is floored so that the inversion stays well defined.
NigParams nig_moment_match(const Moments& m, double dt);

double nig_log_likelihood(const NigParams& params, const LogReturns& x);

/// MLE over alpha = e^a, beta = alpha tanh(b), delta = e^c, mu, starting from
/// the moment match of the sample.
CalibrationResult<NigParams> nig_calibrate(const LogReturns& x);

/// xi ~ IG(delta dt / gamma0, (delta dt)^2), X = mu dt + beta xi + sqrt(xi) Z.
/// Path p uses rng.child(p): mixing on child(1), Gaussian on child(0).
PathSet nig_simulate(const NigParams& params, double s0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng);

/// Independent one-step increments; draw k uses rng.child(k).
std::vector<double> nig_sample_increments(const NigParams& params, std::size_t n, double dt,
                                          const RngStream& rng);

}  // namespace stochcal::subordinated
