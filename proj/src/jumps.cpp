#include "stochcal/jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/gbm.hpp"
#include "stochcal/numeric.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::jumps {

namespace {

constexpr const char* kModule = "jumps";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const JumpGbmParams& p) {
  if (!std::isfinite(p.mu) || !std::isfinite(p.sigma) || !std::isfinite(p.lambda) ||
      !std::isfinite(p.mu_y) || !std::isfinite(p.sigma_y) || p.sigma < 0.0 || p.lambda < 0.0 ||
      p.sigma_y < 0.0) {
    fail(ErrorCode::InvalidParam, kModule, "need finite params with sigma, lambda, sigma_y >= 0");
  }
}

// Poisson weights and Gaussian components for one step.
struct Mixture {
  std::vector<double> log_w;
  std::vector<double> mean;
  std::vector<double> var;
  std::vector<double> log_norm;  // log_w - log(2 pi var) / 2
  std::vector<double> half_inv_var;
};

Mixture build_mixture(const JumpGbmParams& p, double dt) {
  Mixture m;
  const double lam = p.lambda * dt;
  const double base_mean = (p.mu - 0.5 * p.sigma * p.sigma) * dt;
  const double base_var = p.sigma * p.sigma * dt;
  double log_pj = -lam;
  double mass = 0.0;
  for (int j = 0; j < 200; ++j) {
    if (j > 0) log_pj += std::log(lam) - std::log(static_cast<double>(j));
    m.log_w.push_back(log_pj);
    m.mean.push_back(base_mean + j * p.mu_y);
    const double v = base_var + j * p.sigma_y * p.sigma_y;
    m.var.push_back(v);
    m.log_norm.push_back(log_pj - 0.5 * std::log(2.0 * std::numbers::pi * v));
    m.half_inv_var.push_back(0.5 / v);
    mass += std::exp(log_pj);
    if (lam == 0.0 || mass >= 1.0 - 1e-12) break;
  }
  return m;
}

double log_density(double x, const Mixture& m, std::vector<double>& scratch) {
  scratch.resize(m.log_w.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < m.log_w.size(); ++j) {
    if (!(m.var[j] > 0.0)) {
      scratch[k++] = x == m.mean[j] ? kInf : -kInf;
      continue;
    }
    const double d = x - m.mean[j];
    scratch[k++] = m.log_norm[j] - d * d * m.half_inv_var[j];
  }
  return numeric::log_sum_exp({scratch.data(), k});
}

double unchecked_ll(const JumpGbmParams& p, const LogReturns& x) {
  const Mixture m = build_mixture(p, x.dt);
  std::vector<double> scratch;
  double ll = 0.0;
  for (double xi : x.values) ll += log_density(xi, m, scratch);
  return ll;
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// z = (mu, log sigma, logit(lambda dt / 0.5), mu_y, log sigma_y).
JumpGbmParams from_free(std::span<const double> z, double dt) {
  return {z[0], std::exp(z[1]), 0.5 * logistic(z[2]) / dt, z[3], std::exp(z[4])};
}

std::vector<double> to_free(const JumpGbmParams& p, double dt) {
  const double r = std::clamp(p.lambda * dt / 0.5, 1e-9, 1.0 - 1e-9);
  return {p.mu, std::log(p.sigma), std::log(r / (1.0 - r)), p.mu_y, std::log(p.sigma_y)};
}

}  // namespace

double compensated_drift(const JumpGbmParams& p) {
  return p.mu + p.lambda * p.mu_y - 0.5 * p.sigma * p.sigma;
}

JumpGbmParams from_compensated_drift(double mu_star, double sigma, double lambda, double mu_y,
                                     double sigma_y) {
  return {mu_star - lambda * mu_y + 0.5 * sigma * sigma, sigma, lambda, mu_y, sigma_y};
}

Increments simulate_increments(const JumpGbmParams& params, std::size_t n, double dt,
                               const RngStream& rng) {
  check_params(params);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  Increments out;
  out.returns.resize(n);
  out.jumps.resize(n);
  out.counts.resize(n);
  const double drift = compensated_drift(params) * dt;
  const double vol = params.sigma * std::sqrt(dt);
  const double comp = params.lambda * dt * params.mu_y;
  for (std::size_t k = 0; k < n; ++k) {
    const RngStream step = rng.child(k);
    RngStream z = step.child(0);
    RngStream jr = step.child(1);
    const std::uint64_t nt = sample_poisson(jr, params.lambda * dt);
    double sum = 0.0;
    for (std::uint64_t j = 0; j < nt; ++j) sum += params.mu_y + params.sigma_y * jr.normal();
    out.counts[k] = nt;
    out.jumps[k] = sum - comp;
    out.returns[k] = drift + vol * z.normal() + out.jumps[k];
  }
  return out;
}

PathSet simulate(const JumpGbmParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                 double dt, const RngStream& rng) {
  check_params(params);
  if (!(s0 > 0.0) || !(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "need s0 > 0 and dt > 0");
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  const double drift = (params.mu - 0.5 * params.sigma * params.sigma) * dt;
  const double vol = params.sigma * std::sqrt(dt);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const RngStream path = rng.child(p);
    RngStream z = path.child(0);
    RngStream jr = path.child(1);
    auto row = out.path(p);
    row[0] = s0;
    double log_s = std::log(s0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
      double x = drift + vol * z.normal();
      if (params.lambda > 0.0) {
        const std::uint64_t nt = sample_poisson(jr, params.lambda * dt);
        for (std::uint64_t j = 0; j < nt; ++j) x += params.mu_y + params.sigma_y * jr.normal();
      }
      log_s += x;
      row[i] = std::exp(log_s);
    }
  }
  return out;
}

double log_mixture_density(double x, const JumpGbmParams& params, double dt) {
  check_params(params);
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
  std::vector<double> scratch;
  return log_density(x, build_mixture(params, dt), scratch);
}

double mixture_density(double x, const JumpGbmParams& params, double dt) {
  return std::exp(log_mixture_density(x, params, dt));
}

double log_likelihood(const JumpGbmParams& params, const LogReturns& x) {
  check_params(params);
  return unchecked_ll(params, x);
}

CalibrationResult<JumpGbmParams> calibrate(const LogReturns& x) {
  const std::size_t n = x.size();
  if (n < 100) fail(ErrorCode::InsufficientData, kModule, "jump calibration needs n >= 100");
  const double dt = x.dt;
  const auto base = gbm::calibrate(x);

  // Robust scale from the median absolute deviation; points beyond 3 of
  // those seed the jump-size guess.
  std::vector<double> sorted = x.values;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[n / 2];
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = std::fabs(x.values[i] - median);
  std::nth_element(dev.begin(), dev.begin() + n / 2, dev.end());
  const double scale = std::max(1.4826 * dev[n / 2], 1e-12);
  double sum = 0.0;
  double sum2 = 0.0;
  std::size_t count = 0;
  for (double v : x.values) {
    if (std::fabs(v - median) > 3.0 * scale) {
      sum += v - median;
      sum2 += (v - median) * (v - median);
      ++count;
    }
  }
  double mu_y0 = count ? sum / static_cast<double>(count) : 0.0;
  double sd_y0 = count > 1 ? std::sqrt(std::max(sum2 / static_cast<double>(count) - mu_y0 * mu_y0, 0.0)) : 0.0;
  if (count == 0) mu_y0 = 3.0 * scale;
  sd_y0 = std::max(sd_y0, 0.5 * scale);
  const double sigma0 = std::max(scale / std::sqrt(dt), 1e-8);

  double mean = 0.0;
  for (double v : x.values) mean += v;
  mean /= static_cast<double>(n);

  auto objective = [&](std::span<const double> z) { return -unchecked_ll(from_free(z, dt), x); };

  numeric::MinimizeOptions coarse;
  coarse.max_evaluations = 1500;
  coarse.restarts = 0;
  const std::vector<double> steps = {std::max(0.5 * scale / dt, 1e-8), 0.3, 1.0,
                                     std::max(0.3 * std::fabs(mu_y0), scale), 0.5};

  CalibrationResult<JumpGbmParams> out;
  std::vector<double> best_z;
  double best_value = kInf;
  bool first = true;
  for (double lam0 : {0.1, 1.0, 5.0, 10.0, 25.0}) {
    if (lam0 * dt >= 0.45) continue;
    JumpGbmParams g{0.0, sigma0, lam0, mu_y0, sd_y0};
    g.mu = (mean - lam0 * dt * mu_y0) / dt + 0.5 * sigma0 * sigma0;
    const double g_ll = unchecked_ll(g, x);
    if (first || g_ll > out.initial_log_likelihood) {
      out.initial_guess = g;
      out.initial_log_likelihood = g_ll;
      first = false;
    }
    if (!std::isfinite(g_ll)) continue;
    const auto res = numeric::minimize(objective, to_free(g, dt), steps, coarse);
    out.iterations += res.iterations;
    if (res.value < best_value) {
      best_value = res.value;
      best_z = res.x;
    }
  }
  if (best_z.empty()) fail(ErrorCode::OptimizerFailed, kModule, "no finite starting point");

  numeric::MinimizeOptions fine;
  fine.max_evaluations = 8000;
  std::vector<double> fine_steps = steps;
  for (auto& s : fine_steps) s *= 0.2;
  const auto res = numeric::minimize(objective, best_z, fine_steps, fine);
  out.iterations += res.iterations;
  out.converged = res.converged;
  out.params = from_free(res.x, dt);
  out.log_likelihood = -res.value;

  // Jumps of vanishing size leave lambda unidentified; keep them only when the
  // likelihood-ratio gain over the diffusion is significant at 5% (3 extra
  // parameters).
  if (2.0 * (out.log_likelihood - base.log_likelihood) < specfun::chi2_quantile(0.95, 3.0)) {
    out.params = {base.params.mu, base.params.sigma, 0.0, 0.0, 0.0};
    out.log_likelihood = base.log_likelihood;
    out.converged = true;
  }
  if (out.log_likelihood < out.initial_log_likelihood) {
    out.params = out.initial_guess;
    out.log_likelihood = out.initial_log_likelihood;
  }
  return out;
}

}  // namespace stochcal::jumps
