#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stochcal/core.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::evt {

/// Generalized Pareto: G(y) = 1 - (1 + xi y / beta)^{-1/xi}, and
/// 1 - e^{-y/beta} at xi = 0.
struct GpdParams {
  double xi = 0.0;
  double beta = 1.0;
};

/// Throws OutOfSupport for y < 0 or beyond -beta/xi when xi < 0. The
/// exponential branch is used for |xi| < 1e-8.
double gpd_cdf(double y, const GpdParams& params);
double gpd_pdf(double y, const GpdParams& params);
double gpd_log_likelihood(const GpdParams& params, std::span<const double> excesses);

/// MLE over (xi, log beta) with xi > -1 and 1 + xi y / beta > 0 for every
/// excess. The exponential model is a nested candidate. Needs >= 30 excesses.
CalibrationResult<GpdParams> gpd_fit(std::span<const double> excesses);

/// Threshold context shared by the tail estimators.
struct TailFit {
  GpdParams gpd;
  double u = 0.0;
  std::size_t n = 0;
  std::size_t n_exceed = 0;
};

/// F(x) = 1 - (N_u / n)(1 + xi (x - u) / beta)^{-1/xi} for x >= u.
double tail_cdf(double x, const TailFit& fit);

/// VaR_p = u + (beta / xi)(((n / N_u) p)^{-xi} - 1), p the tail probability;
/// u + beta ln(N_u / (n p)) at xi = 0. Needs 0 < p < N_u / n.
double var_estimate(double p, const TailFit& fit);
/// ES_p = (VaR_p + beta - xi u) / (1 - xi); ShapeTooHeavy when xi >= 1.
double es_estimate(double p, const TailFit& fit);
/// The level-q quantile, var_estimate(1 - q).
double quantile_estimate(double q, const TailFit& fit);

struct QuantilePolicy {
  double q = 0.9;
};
struct ExplicitThreshold {
  double u = 0.0;
};
using ThresholdPolicy = std::variant<QuantilePolicy, ExplicitThreshold>;

/// Threshold for a quantile policy: the sorted value with round((1 - q) n)
/// observations strictly above it.
double select_threshold(std::span<const double> losses, const ThresholdPolicy& policy);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TailReport {
  double u = 0.0;
  std::size_t n = 0;
  std::size_t n_exceed = 0;
  GpdParams gpd;
  double log_likelihood = 0.0;
  std::vector<double> p_levels;
  std::vector<double> var_p;
  std::vector<double> es_p;
  /// Percentile bootstrap intervals (95%) from resampled excesses, when requested.
  std::vector<Interval> var_ci;
  std::vector<Interval> es_ci;
  std::size_t n_bootstrap = 0;
};

struct PotOptions {
  ThresholdPolicy policy = QuantilePolicy{0.9};
  std::size_t n_bootstrap = 0;
  std::uint64_t seed = 0;
};

/// Choose u, fit the GPD to the excesses over u, then evaluate VaR and ES at
/// every tail probability. Throws TooFewExceedances below 30 excesses.
TailReport pot_pipeline(std::span<const double> losses, std::span<const double> p_levels,
                        const PotOptions& options = {});

}  // namespace stochcal::evt
