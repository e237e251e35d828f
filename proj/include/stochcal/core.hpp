#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace stochcal {

/// Step conventions in years.
inline constexpr double kDailyDt = 1.0 / 252.0;
inline constexpr double kWeeklyDt = 1.0 / 52.0;

/// Equally spaced observations of a level process. Times are in years,
/// t_i = t_0 + i * dt; calendar dates stay with the caller.
class TimeSeries {
 public:
  /// Throws InvalidParam unless dt > 0, at least two finite values, and times
  /// (if given) increase with spacing dt to 1e-9 relative.
  TimeSeries(std::vector<double> values, double dt, double t0 = 0.0);
  TimeSeries(std::vector<double> times, std::vector<double> values, double dt);

  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> times() const noexcept { return times_; }
  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return values_.size(); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  double dt_;
};

/// x_i = log s(t_i) - log s(t_{i-1}).
struct LogReturns {
  std::vector<double> values;
  double dt = 1.0;

  std::size_t size() const noexcept { return values.size(); }
};

/// Throws NonPositiveLevel if any level is <= 0.
LogReturns to_log_returns(const TimeSeries& series);

/// Levels s_0 * exp(cumulative sum of returns); the inverse of to_log_returns.
std::vector<double> cumulate_log_returns(double s0, std::span<const double> returns);

enum class Scheme { Exact, Euler };

std::string_view to_string(Scheme scheme);

/// Simulated sample paths, row-major n_paths x (n_steps + 1). Column 0 holds
/// the initial value on every path.
struct PathSet {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  double dt = 0.0;
  std::vector<double> values;
  std::uint64_t seed = 0;
  Scheme scheme = Scheme::Exact;

  PathSet() = default;
  PathSet(std::size_t paths, std::size_t steps, double step, std::uint64_t seed_value,
          Scheme s);

  double& at(std::size_t path, std::size_t step) { return values[path * (n_steps + 1) + step]; }
  double at(std::size_t path, std::size_t step) const {
    return values[path * (n_steps + 1) + step];
  }
  std::span<const double> path(std::size_t p) const {
    return {values.data() + p * (n_steps + 1), n_steps + 1};
  }
  std::span<double> path(std::size_t p) { return {values.data() + p * (n_steps + 1), n_steps + 1}; }

  /// Values at the last step of every path.
  std::vector<double> terminal() const;
};

/// Outcome of a likelihood-based fit.
template <class Params>
struct CalibrationResult {
  Params params{};
  double log_likelihood = 0.0;
  Params initial_guess{};
  double initial_log_likelihood = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  /// Asymptotic standard errors in the order of the parameter struct's fields.
  std::optional<std::vector<double>> stderr_estimates;
};

/// Akaike information criterion 2k - 2 log L.
inline double aic(double log_likelihood, std::size_t n_params) {
  return 2.0 * static_cast<double>(n_params) - 2.0 * log_likelihood;
}

}  // namespace stochcal
