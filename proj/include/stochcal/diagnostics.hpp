#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "stochcal/core.hpp"

namespace stochcal::diagnostics {

enum class VarianceConvention { Biased, Unbiased };

struct MomentSummary {
  double mean = 0.0;
  double variance = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::size_t n = 0;
};

/// Sample moments. Skewness and kurtosis are standardized by the biased
/// variance whatever `convention` says; it only affects `variance`.
MomentSummary moment_summary(std::span<const double> x,
                             VarianceConvention convention = VarianceConvention::Biased);

/// ACF(k) = sum_{i<n-k} (x_i - m)(x_{i+k} - m) / ((n - k) v), v biased.
/// Element k holds lag k, so element 0 is 1.
std::vector<double> acf(std::span<const double> x, std::size_t max_lag);

/// Partial autocorrelations by the Durbin-Levinson recursion on acf().
/// Element k holds lag k; element 0 is 1.
std::vector<double> pacf(std::span<const double> x, std::size_t max_lag);

/// Augmented Dickey-Fuller regression with intercept and no trend:
///   dx_t = a + g x_{t-1} + sum_j phi_j dx_{t-j} + e_t.
struct AdfReport {
  double statistic = 0.0;  // t-ratio of g
  double coefficient = 0.0;
  std::size_t lags = 0;
  std::size_t n_obs = 0;
  bool reject_1pct = false;
  bool reject_5pct = false;
  double critical_1pct = -3.44;
  double critical_5pct = -2.87;
};

/// Throws InsufficientData unless n > 10 (lags + 2), and SingularRegression
/// for rank-deficient designs or an exact fit (e.g. a deterministic line).
AdfReport adf_test(std::span<const double> x, std::size_t lags);

/// Drops observations whose innovation from the last kept level departs from
/// the mean innovation by more than three innovation standard deviations.
/// The retained levels are re-spaced at the original dt.
TimeSeries clean_outliers(const TimeSeries& series);

struct NormalReference {
  double mean = 0.0;
  double sd = 1.0;
};
struct EmpiricalReference {
  std::vector<double> sample;
};
using QqReference = std::variant<NormalReference, EmpiricalReference>;

struct QqPoint {
  double theoretical = 0.0;
  double sample = 0.0;
};

/// Sorted sample against reference quantiles at plotting positions (i - 0.5)/n.
std::vector<QqPoint> qq_data(std::span<const double> x, const QqReference& reference);

/// Mean excess e(u) = mean(x - u | x > u) per threshold; NaN when nothing exceeds.
std::vector<double> mean_excess(std::span<const double> x, std::span<const double> thresholds);

}  // namespace stochcal::diagnostics
