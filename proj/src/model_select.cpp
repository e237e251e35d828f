#include "stochcal/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/garch.hpp"
#include "stochcal/gbm.hpp"
#include "stochcal/jumps.hpp"
#include "stochcal/meanrev.hpp"
#include "stochcal/meanrev_jumps.hpp"
#include "stochcal/subordinated.hpp"

namespace stochcal::model_select {

namespace {

constexpr const char* kModule = "model_select";

using Params = std::vector<std::pair<std::string, double>>;

struct Fit {
  double ll;
  Params params;
};

// Sum of log s_i over i in [from, to).
double log_level_sum(std::span<const double> s, std::size_t from, std::size_t to) {
  double out = 0.0;
  for (std::size_t i = from; i < to; ++i) out += std::log(s[i]);
  return out;
}

bool all_positive(std::span<const double> s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return v > 0.0; });
}

void need_positive(std::span<const double> s) {
  if (!all_positive(s)) fail(ErrorCode::NonPositiveLevel, kModule, "family needs positive levels");
}

Fit fit_abm(const TimeSeries& x) {
  const auto s = x.values();
  std::vector<double> d(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) d[i - 1] = s[i] - s[i - 1];
  const auto m = diagnostics::moment_summary(d);
  if (!(m.variance > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "constant increments");
  const double n = static_cast<double>(d.size());
  const double ll = -0.5 * n * (std::log(2.0 * std::numbers::pi * m.variance) + 1.0);
  return {ll, {{"mu", m.mean / x.dt()}, {"sigma", std::sqrt(m.variance / x.dt())}}};
}

Fit fit_gbm(const TimeSeries& x) {
  const auto r = to_log_returns(x);
  const auto f = gbm::calibrate(r);
  const auto s = x.values();
  return {f.log_likelihood - log_level_sum(s, 1, s.size()),
          {{"mu", f.params.mu}, {"sigma", f.params.sigma}}};
}

Fit fit_ngarch(const TimeSeries& x) {
  const auto s = x.values();
  need_positive(s);
  std::vector<double> r(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) r[i - 1] = s[i] / s[i - 1] - 1.0;
  const auto f = garch::calibrate(r, x.dt());
  const auto& p = f.params;
  return {f.log_likelihood - log_level_sum(s, 0, s.size() - 1),
          {{"mu", p.mu}, {"omega", p.omega}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}}};
}

Fit fit_jumps(const TimeSeries& x) {
  const auto f = jumps::calibrate(to_log_returns(x));
  const auto s = x.values();
  const auto& p = f.params;
  return {f.log_likelihood - log_level_sum(s, 1, s.size()),
          {{"mu", p.mu}, {"sigma", p.sigma}, {"lambda", p.lambda}, {"mu_y", p.mu_y}, {"sigma_y", p.sigma_y}}};
}

Fit fit_vg(const TimeSeries& x) {
  const auto f = subordinated::vg_calibrate(to_log_returns(x));
  const auto s = x.values();
  const auto& p = f.params;
  return {f.log_likelihood - log_level_sum(s, 1, s.size()),
          {{"mu_bar", p.mu_bar}, {"theta_bar", p.theta_bar}, {"sigma_bar", p.sigma_bar}, {"nu", p.nu}}};
}

Fit fit_nig(const TimeSeries& x) {
  const auto f = subordinated::nig_calibrate(to_log_returns(x));
  const auto s = x.values();
  const auto& p = f.params;
  return {f.log_likelihood - log_level_sum(s, 1, s.size()),
          {{"alpha", p.alpha}, {"beta", p.beta}, {"delta", p.delta}, {"mu", p.mu}}};
}

Fit fit_vasicek(const TimeSeries& x) {
  const auto f = meanrev::vasicek_calibrate_mle(x.values(), x.dt());
  const auto& p = f.params;
  return {f.log_likelihood, {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}}};
}

Fit fit_exp_vasicek(const TimeSeries& x) {
  const auto s = x.values();
  const auto f = meanrev::exp_vasicek_calibrate(s, x.dt());
  const auto& p = f.log_fit.params;
  return {f.log_fit.log_likelihood - log_level_sum(s, 1, s.size()),
          {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}}};
}

Fit fit_cir(const TimeSeries& x) {
  const auto s = x.values();
  need_positive(s);
  const auto f = meanrev::cir_calibrate(s, x.dt());
  const auto& p = f.result.params;
  return {f.result.log_likelihood, {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}}};
}

Fit fit_jump_vasicek(const TimeSeries& x) {
  const auto f = meanrev_jumps::calibrate(x.values(), x.dt(), false);
  const auto& p = f.params;
  return {f.log_likelihood,
          {{"alpha", p.alpha}, {"theta", p.theta}, {"sigma", p.sigma}, {"lambda_up", p.lambda_up},
           {"mu_up", p.mu_up}, {"sigma_up", p.sigma_up}}};
}

Fit fit_family(Family f, const TimeSeries& x) {
  switch (f) {
    case Family::Abm: return fit_abm(x);
    case Family::Gbm: return fit_gbm(x);
    case Family::Ngarch: return fit_ngarch(x);
    case Family::Jumps: return fit_jumps(x);
    case Family::Vg: return fit_vg(x);
    case Family::Nig: return fit_nig(x);
    case Family::Vasicek: return fit_vasicek(x);
    case Family::ExpVasicek: return fit_exp_vasicek(x);
    case Family::Cir: return fit_cir(x);
    case Family::JumpVasicek: return fit_jump_vasicek(x);
  }
  fail(ErrorCode::InvalidParam, kModule, "unknown family");
}

// Increments screened for fat tails: AR(1) residuals when the series mean
// reverts, otherwise log returns (or plain differences for non-positive data).
std::vector<double> screen_increments(std::span<const double> s, bool mean_reversion) {
  const std::size_t n = s.size();
  std::vector<double> out(n - 1);
  if (mean_reversion) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      sx += s[i - 1];
      sy += s[i];
      sxx += s[i - 1] * s[i - 1];
      sxy += s[i - 1] * s[i];
    }
    const double m = static_cast<double>(n - 1);
    const double den = m * sxx - sx * sx;
    const double b = den > 0.0 ? (m * sxy - sx * sy) / den : 1.0;
    const double c = (sy - b * sx) / m;
    for (std::size_t i = 1; i < n; ++i) out[i - 1] = s[i] - c - b * s[i - 1];
  } else if (all_positive(s)) {
    for (std::size_t i = 1; i < n; ++i) out[i - 1] = std::log(s[i] / s[i - 1]);
  } else {
    for (std::size_t i = 1; i < n; ++i) out[i - 1] = s[i] - s[i - 1];
  }
  return out;
}

}  // namespace

std::string_view name(Family f) {
  switch (f) {
    case Family::Abm: return "abm";
    case Family::Gbm: return "gbm";
    case Family::Ngarch: return "ngarch";
    case Family::Jumps: return "jumps";
    case Family::Vg: return "vg";
    case Family::Nig: return "nig";
    case Family::Vasicek: return "vasicek";
    case Family::ExpVasicek: return "exp-vasicek";
    case Family::Cir: return "cir";
    case Family::JumpVasicek: return "jump-vasicek";
  }
  return "?";
}

bool mean_reverting(Family f) {
  return f == Family::Vasicek || f == Family::ExpVasicek || f == Family::Cir ||
         f == Family::JumpVasicek;
}

bool fat_tailed(Family f) {
  return f == Family::Ngarch || f == Family::Jumps || f == Family::Vg || f == Family::Nig ||
         f == Family::JumpVasicek;
}

std::size_t parameter_count(Family f) {
  switch (f) {
    case Family::Abm:
    case Family::Gbm: return 2;
    case Family::Ngarch:
    case Family::Jumps: return 5;
    case Family::Vg:
    case Family::Nig: return 4;
    case Family::Vasicek:
    case Family::ExpVasicek:
    case Family::Cir: return 3;
    case Family::JumpVasicek: return 6;
  }
  return 0;
}

Report model_select_report(const TimeSeries& x, std::size_t adf_lags) {
  const auto s = x.values();
  if (s.size() < 300) fail(ErrorCode::InsufficientData, kModule, "model selection needs n >= 300");
  Report out;
  out.n = s.size();
  out.adf = diagnostics::adf_test(s, adf_lags);
  out.mean_reversion = out.adf.reject_5pct;
  const auto inc = screen_increments(s, out.mean_reversion);
  out.excess_kurtosis = diagnostics::moment_summary(inc).excess_kurtosis;
  out.kurtosis_threshold = 3.0 * std::sqrt(24.0 / static_cast<double>(inc.size()));
  out.fat_tails = out.excess_kurtosis > out.kurtosis_threshold;

  std::vector<Family> families = {Family::Abm, Family::Gbm};
  if (out.fat_tails) {
    families.insert(families.end(), {Family::Ngarch, Family::Jumps, Family::Vg, Family::Nig});
  }
  if (out.mean_reversion) {
    families.insert(families.end(), {Family::Vasicek, Family::ExpVasicek, Family::Cir});
    if (out.fat_tails) families.push_back(Family::JumpVasicek);
  }

  std::vector<Candidate> fitted;
  std::vector<Candidate> failed;
  for (Family f : families) {
    Candidate c;
    c.family = f;
    try {
      Fit fit = fit_family(f, x);
      if (!std::isfinite(fit.ll)) fail(ErrorCode::OptimizerFailed, kModule, "non-finite likelihood");
      c.fitted = true;
      c.log_likelihood = fit.ll;
      c.aic = aic(fit.ll, parameter_count(f));
      c.params = std::move(fit.params);
      fitted.push_back(std::move(c));
    } catch (const Error& e) {
      c.error = e.what();
      failed.push_back(std::move(c));
    }
  }
  std::stable_sort(fitted.begin(), fitted.end(),
                   [](const Candidate& a, const Candidate& b) { return a.aic < b.aic; });
  out.has_winner = !fitted.empty();
  if (out.has_winner) out.winner = fitted.front().family;
  out.ranked = std::move(fitted);
  for (auto& c : failed) out.ranked.push_back(std::move(c));
  return out;
}

}  // namespace stochcal::model_select
