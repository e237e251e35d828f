#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::meanrev {

/// dx = alpha (theta - x) dt + sigma dW.
struct VasicekParams {
  double alpha = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
};

/// Exact AR(1) form x_i = c + b x_{i-1} + delta eps.
struct ArCoefficients {
  double c = 0.0;
  double b = 0.0;
  double delta = 0.0;
};

/// c = theta (1 - e^{-alpha dt}), b = e^{-alpha dt},
/// delta = sigma sqrt((1 - e^{-2 alpha dt}) / (2 alpha)).
ArCoefficients to_ar(const VasicekParams& p, double dt);
/// alpha = -ln(b)/dt, theta = c/(1-b), sigma = delta / sqrt((b^2 - 1) dt / (2 ln b)).
/// Throws NonStationaryEstimate unless 0 < b < 1.
VasicekParams from_ar(const ArCoefficients& ar, double dt);

/// Conditional moments of x(t) given x(0) = x0.
double vasicek_mean(const VasicekParams& p, double x0, double t);
double vasicek_variance(const VasicekParams& p, double t);

/// Path p draws from rng.child(p).child(0).
PathSet vasicek_simulate(const VasicekParams& params, double x0, std::size_t n_steps,
                         std::size_t n_paths, double dt, const RngStream& rng);

/// Exact Gaussian transition log-likelihood of the observed path.
double vasicek_log_likelihood(const VasicekParams& params, std::span<const double> x, double dt);

/// Least squares of x_i on x_{i-1}; delta^2 is the mean squared residual.
/// Needs n >= 10. Throws NonStationaryEstimate unless 0 < b < 1.
CalibrationResult<VasicekParams> vasicek_calibrate_ols(std::span<const double> x, double dt);
/// Closed-form maximum likelihood estimators for (b, theta, delta^2).
CalibrationResult<VasicekParams> vasicek_calibrate_mle(std::span<const double> x, double dt);

struct ExpVasicekFit {
  CalibrationResult<VasicekParams> log_fit;  // parameters of y = log x
  double m = 0.0;                             // theta + sigma^2 / (2 alpha)
};

/// Vasicek on log-levels. Throws NonPositiveLevel for levels <= 0.
ExpVasicekFit exp_vasicek_calibrate(std::span<const double> x, double dt);
/// Simulates y with vasicek_simulate from log(x0) and returns e^y.
PathSet exp_vasicek_simulate(const VasicekParams& params, double x0, std::size_t n_steps,
                             std::size_t n_paths, double dt, const RngStream& rng);

/// dx = alpha (theta - x) dt + sigma sqrt(x) dW.
struct CirParams {
  double alpha = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
};

/// sigma^2 <= 2 alpha theta.
bool feller_satisfied(const CirParams& p);

/// Conditional mean theta + (x0 - theta) e^{-alpha t} and variance
/// x0 sigma^2/alpha (e^{-a t} - e^{-2 a t}) + theta sigma^2/(2 alpha) (1 - e^{-a t})^2.
double cir_mean(const CirParams& p, double x0, double t);
double cir_variance(const CirParams& p, double x0, double t);

/// Exact: with c = 2 alpha / (sigma^2 (1 - e^{-alpha dt})), u = c x_prev e^{-alpha dt}
/// and q = 2 alpha theta / sigma^2 - 1, x_next = Gamma(q + 1 + N, 1) / c with
/// N ~ Poisson(u). Euler: full truncation, requires alpha dt < 1.
/// Path p draws from rng.child(p).child(0).
PathSet cir_simulate(const CirParams& params, double x0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng, Scheme scheme);

/// f(x_next | x_prev) = c e^{-u-v} (v/u)^{q/2} I_q(2 sqrt(uv)) with
/// u = c x_prev e^{-alpha dt} and v = c x_next.
double cir_transition_pdf(double x_next, double x_prev, const CirParams& params, double dt);
double cir_log_transition_pdf(double x_next, double x_prev, const CirParams& params, double dt);

double cir_log_likelihood(const CirParams& params, std::span<const double> x, double dt);

/// alpha0 from the AR(1) slope, theta0 = mean, sigma0 = sqrt(2 alpha0 V / theta0).
CirParams cir_initial_guess(std::span<const double> x, double dt);

struct CirFit {
  CalibrationResult<CirParams> result;
  bool feller_satisfied = false;
};

/// Exact-transition MLE over log-transformed parameters. Needs n >= 50 and
/// positive levels.
CirFit cir_calibrate(std::span<const double> x, double dt);

}  // namespace stochcal::meanrev
