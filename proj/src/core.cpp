#include "stochcal/core.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "stochcal/errors.hpp"

namespace stochcal {

namespace {

void validate_values(const std::vector<double>& values, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InvalidParam, "core", "dt must be > 0");
  if (values.size() < 2) {
    fail(ErrorCode::InvalidParam, "core", "a time series needs at least two observations");
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParam, "core", "non-finite level");
  }
}

}  // namespace

TimeSeries::TimeSeries(std::vector<double> values, double dt, double t0)
    : values_(std::move(values)), dt_(dt) {
  validate_values(values_, dt_);
  times_.resize(values_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) times_[i] = t0 + static_cast<double>(i) * dt_;
}

TimeSeries::TimeSeries(std::vector<double> times, std::vector<double> values, double dt)
    : times_(std::move(times)), values_(std::move(values)), dt_(dt) {
  validate_values(values_, dt_);
  if (times_.size() != values_.size()) {
    fail(ErrorCode::InvalidParam, "core", "times and values differ in length");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    const double step = times_[i] - times_[i - 1];
    if (!(step > 0.0) || std::fabs(step - dt_) > 1e-9 * dt_) {
      fail(ErrorCode::InvalidParam, "core",
           "timestamps must increase with constant spacing dt (index " + std::to_string(i) + ")");
    }
  }
}

LogReturns to_log_returns(const TimeSeries& series) {
  const auto levels = series.values();
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] > 0.0)) {
      fail(ErrorCode::NonPositiveLevel, "core",
           "level at index " + std::to_string(i) + " is not positive");
    }
  }
  LogReturns out;
  out.dt = series.dt();
  out.values.resize(levels.size() - 1);
  for (std::size_t i = 1; i < levels.size(); ++i) {
    out.values[i - 1] = std::log(levels[i]) - std::log(levels[i - 1]);
  }
  return out;
}

std::vector<double> cumulate_log_returns(double s0, std::span<const double> returns) {
  std::vector<double> levels(returns.size() + 1);
  levels[0] = s0;
  double log_level = std::log(s0);
  for (std::size_t i = 0; i < returns.size(); ++i) {
    log_level += returns[i];
    levels[i + 1] = std::exp(log_level);
  }
  return levels;
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::Exact ? "exact" : "euler";
}

PathSet::PathSet(std::size_t paths, std::size_t steps, double step, std::uint64_t seed_value,
                 Scheme s)
    : n_paths(paths),
      n_steps(steps),
      dt(step),
      values(paths * (steps + 1), 0.0),
      seed(seed_value),
      scheme(s) {}

std::vector<double> PathSet::terminal() const {
  std::vector<double> out(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) out[p] = at(p, n_steps);
  return out;
}

}  // namespace stochcal
