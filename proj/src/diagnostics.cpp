#include "stochcal/diagnostics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stochcal/errors.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::diagnostics {

namespace {

constexpr const char* kModule = "diagnostics";

struct MeanVar {
  double mean;
  double var;
};

MeanVar biased_mean_var(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, s / n};
}

}  // namespace

MomentSummary moment_summary(std::span<const double> x, VarianceConvention convention) {
  if (x.size() < 2) fail(ErrorCode::InsufficientData, kModule, "moments need n >= 2");
  const auto [m, v] = biased_mean_var(x);
  double m3 = 0.0;
  double m4 = 0.0;
  for (double xi : x) {
    const double d = xi - m;
    const double d2 = d * d;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  const double n = static_cast<double>(x.size());
  m3 /= n;
  m4 /= n;
  MomentSummary out;
  out.n = x.size();
  out.mean = m;
  out.variance = convention == VarianceConvention::Biased ? v : v * n / (n - 1.0);
  if (v > 0.0) {
    out.skewness = m3 / std::pow(v, 1.5);
    out.excess_kurtosis = m4 / (v * v) - 3.0;
  }
  return out;
}

std::vector<double> acf(std::span<const double> x, std::size_t max_lag) {
  const std::size_t n = x.size();
  if (max_lag >= n) fail(ErrorCode::InvalidParam, kModule, "acf requires max_lag < n");
  const auto [m, v] = biased_mean_var(x);
  if (!(v > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "series has zero variance");
  std::vector<double> out(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) s += (x[i] - m) * (x[i + k] - m);
    out[k] = s / (static_cast<double>(n - k) * v);
  }
  return out;
}

std::vector<double> pacf(std::span<const double> x, std::size_t max_lag) {
  if (2 * max_lag >= x.size()) fail(ErrorCode::InvalidParam, kModule, "pacf requires max_lag < n/2");
  const auto r = acf(x, max_lag);
  std::vector<double> out(max_lag + 1, 0.0);
  out[0] = 1.0;
  if (max_lag == 0) return out;
  std::vector<double> phi(max_lag + 1, 0.0);
  std::vector<double> prev(max_lag + 1, 0.0);
  phi[1] = r[1];
  out[1] = r[1];
  for (std::size_t k = 2; k <= max_lag; ++k) {
    prev = phi;
    double num = r[k];
    double den = 1.0;
    for (std::size_t j = 1; j < k; ++j) {
      num -= prev[j] * r[k - j];
      den -= prev[j] * r[j];
    }
    if (!(std::fabs(den) > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "pacf recursion broke down");
    phi[k] = num / den;
    for (std::size_t j = 1; j < k; ++j) phi[j] = prev[j] - phi[k] * prev[k - j];
    out[k] = phi[k];
  }
  return out;
}

AdfReport adf_test(std::span<const double> x, std::size_t lags) {
  const std::size_t n = x.size();
  if (n <= 10 * (lags + 2)) {
    fail(ErrorCode::InsufficientData, kModule,
         "adf_test needs more than 10 (lags + 2) observations");
  }
  std::vector<double> dx(n - 1);
  for (std::size_t i = 1; i < n; ++i) dx[i - 1] = x[i] - x[i - 1];

  // Rows t = lags .. n-2 of dx; regressors [1, x_t, dx_{t-1}, ..., dx_{t-lags}].
  const std::size_t rows = dx.size() - lags;
  const std::size_t k = 2 + lags;
  Eigen::MatrixXd design(rows, k);
  Eigen::VectorXd y(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t t = r + lags;
    y(r) = dx[t];
    design(r, 0) = 1.0;
    design(r, 1) = x[t];
    for (std::size_t j = 1; j <= lags; ++j) design(r, 1 + j) = dx[t - j];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < static_cast<Eigen::Index>(k)) {
    fail(ErrorCode::SingularRegression, kModule, "ADF design matrix is rank deficient");
  }
  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd resid = y - design * beta;
  const double dof = static_cast<double>(rows - k);
  const double s2 = resid.squaredNorm() / dof;
  if (!(s2 > 1e-24 * std::max(1.0, y.squaredNorm() / static_cast<double>(rows)))) {
    fail(ErrorCode::SingularRegression, kModule, "ADF regression fits exactly; no residual variance");
  }
  const Eigen::MatrixXd xtx = design.transpose() * design;
  Eigen::VectorXd unit = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  unit(1) = 1.0;
  const Eigen::VectorXd col = xtx.ldlt().solve(unit);
  const double se = std::sqrt(s2 * col(1));

  AdfReport out;
  out.coefficient = beta(1);
  out.statistic = beta(1) / se;
  out.lags = lags;
  out.n_obs = rows;
  out.reject_1pct = out.statistic < out.critical_1pct;
  out.reject_5pct = out.statistic < out.critical_5pct;
  return out;
}

TimeSeries clean_outliers(const TimeSeries& series) {
  const auto x = series.values();
  const std::size_t n = x.size();
  if (n < 10) fail(ErrorCode::InsufficientData, kModule, "clean_outliers needs n >= 10");
  std::vector<double> innovations(n - 1);
  for (std::size_t i = 1; i < n; ++i) innovations[i - 1] = x[i] - x[i - 1];
  const auto [m, v] = biased_mean_var(innovations);
  const double limit = 3.0 * std::sqrt(v);

  std::vector<double> kept;
  kept.reserve(n);
  kept.push_back(x[0]);
  // A point goes when both its own innovation and the re-linked one (from the
  // last kept point) break the band: the far side of a spike survives, and a
  // genuine level shift costs one point only.
  for (std::size_t i = 1; i < n; ++i) {
    const bool own = std::fabs(x[i] - x[i - 1] - m) > limit;
    const bool relinked = std::fabs(x[i] - kept.back() - m) > limit;
    if (own && relinked) continue;
    kept.push_back(x[i]);
  }
  if (kept.size() == n) return series;
  return TimeSeries(std::move(kept), series.dt(), series.times().front());
}

std::vector<QqPoint> qq_data(std::span<const double> x, const QqReference& reference) {
  const std::size_t n = x.size();
  if (n < 3) fail(ErrorCode::InsufficientData, kModule, "qq_data needs n >= 3");
  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());

  std::vector<double> ref_sorted;
  if (const auto* emp = std::get_if<EmpiricalReference>(&reference)) {
    if (emp->sample.empty()) fail(ErrorCode::InvalidParam, kModule, "empty empirical reference");
    ref_sorted = emp->sample;
    std::sort(ref_sorted.begin(), ref_sorted.end());
  }

  std::vector<QqPoint> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    double q = 0.0;
    if (const auto* normal = std::get_if<NormalReference>(&reference)) {
      q = normal->mean + normal->sd * specfun::normal_quantile(p);
    } else {
      // Piecewise-linear inverse of the reference ECDF through the same
      // plotting positions, so a sample compared with itself is the identity.
      // h = p m - 1/2 = ((2i + 1) m - n) / (2n), kept in integers so that
      // matching positions land exactly on order statistics.
      const std::size_t m = ref_sorted.size();
      const std::size_t num = (2 * i + 1) * m;
      if (num <= n) {
        q = ref_sorted.front();
      } else {
        const std::size_t lo = (num - n) / (2 * n);
        const std::size_t rem = (num - n) % (2 * n);
        if (lo >= m - 1) {
          q = ref_sorted.back();
        } else {
          const double w = static_cast<double>(rem) / static_cast<double>(2 * n);
          q = rem == 0 ? ref_sorted[lo] : ref_sorted[lo] + w * (ref_sorted[lo + 1] - ref_sorted[lo]);
        }
      }
    }
    out[i] = {q, sorted[i]};
  }
  return out;
}

std::vector<double> mean_excess(std::span<const double> x, std::span<const double> thresholds) {
  std::vector<double> out;
  out.reserve(thresholds.size());
  for (double u : thresholds) {
    double s = 0.0;
    std::size_t count = 0;
    for (double v : x) {
      if (v > u) {
        s += v - u;
        ++count;
      }
    }
    out.push_back(count ? s / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN());
  }
  return out;
}

}  // namespace stochcal::diagnostics
