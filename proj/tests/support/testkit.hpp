#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace testkit {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

inline Estimate mean_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return {m, std::sqrt(s / (n - 1.0) / n)};
}

// Unbiased sample variance with the asymptotic SE sqrt((m4 - v^2) / n).
inline Estimate variance_of(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  return {m2 * n / (n - 1.0), std::sqrt(std::max(m4 - m2 * m2, 0.0) / n)};
}

inline double raw_kurtosis(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : x) {
    const double d2 = (v - m) * (v - m);
    m2 += d2;
    m4 += d2 * d2;
  }
  return (m4 / n) / ((m2 / n) * (m2 / n));
}

inline bool within_se(const Estimate& e, double target, double k = 3.0) {
  return std::fabs(e.value - target) <= k * e.se;
}

inline double ks_statistic(std::vector<double> x, const std::function<double(double)>& cdf) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

// Asymptotic Kolmogorov tail with Stephens' finite-n correction.
inline double ks_pvalue(double d, std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 0.2) return 1.0;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    p += (k % 2 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(p, 0.0, 1.0);
}

// Integral over [a, b] by tanh-sinh.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> q(15);
  return q.integrate(f, a, b, 1e-13);
}

// Integral over [a, inf) by exp-sinh, after rescaling by `scale`.
inline double integrate_upper(const std::function<double(double)>& f, double a, double scale) {
  boost::math::quadrature::exp_sinh<double> q(12);
  auto g = [&](double t) { return scale * f(a + scale * t); };
  return q.integrate(g, 1e-13);
}

// Integral over the real line split at `center`.
inline double integrate_line(const std::function<double(double)>& f, double center, double scale) {
  const double right = integrate_upper(f, center, scale);
  const double left = integrate_upper([&](double t) { return f(2.0 * center - t); }, center, scale);
  return left + right;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return out;
}

inline double rel_diff(double a, double b) {
  return std::fabs(a - b) / std::max(std::fabs(b), std::numeric_limits<double>::min());
}

}  // namespace testkit
