#include "stochcal/subordinated.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "stochcal/errors.hpp"
#include "stochcal/numeric.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::subordinated {

namespace {

constexpr const char* kModule = "subordinated";
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNuFloor = 1e-4;  // times dt

void check_vg(const VgParams& p, double dt) {
  if (!std::isfinite(p.mu_bar) || !std::isfinite(p.theta_bar) || !(p.sigma_bar > 0.0) ||
      !(p.nu > 0.0) || !std::isfinite(p.sigma_bar) || !std::isfinite(p.nu)) {
    fail(ErrorCode::InvalidParam, kModule, "VG needs finite params with sigma_bar > 0, nu > 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
}

void check_nig(const NigParams& p, double dt) {
  if (!std::isfinite(p.alpha) || !std::isfinite(p.beta) || !std::isfinite(p.delta) ||
      !std::isfinite(p.mu) || !(p.delta > 0.0) || !(p.alpha > std::fabs(p.beta))) {
    fail(ErrorCode::InvalidParam, kModule, "NIG needs alpha > |beta| and delta > 0");
  }
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
}

double unchecked_vg_log_density(double x, const VgParams& p, double dt) {
  const double a = dt / p.nu;
  const double center = p.mu_bar * dt;
  double d = x - center;
  if (std::isinf(d)) return -kInf;
  const double s2 = p.sigma_bar * p.sigma_bar;
  const double w = 2.0 * s2 / p.nu + p.theta_bar * p.theta_bar;
  const double nudge = 1e-12 * std::max(1.0, std::fabs(center));
  if (d == 0.0 || !(std::fabs(d) * std::sqrt(w) / s2 > 0.0)) d = std::copysign(nudge, d);
  const double ad = std::fabs(d);
  return std::numbers::ln2 + p.theta_bar * d / s2 - a * std::log(p.nu) -
         0.5 * std::log(2.0 * std::numbers::pi) - std::log(p.sigma_bar) - std::lgamma(a) +
         (0.5 * a - 0.25) * (2.0 * std::log(ad) - std::log(w)) +
         specfun::log_bessel_k(a - 0.5, ad * std::sqrt(w) / s2);
}

double unchecked_nig_log_density(double x, const NigParams& p, double dt) {
  const double big_d = p.delta * dt;
  const double d = x - p.mu * dt;
  const double r = std::hypot(big_d, d);
  const double gamma0 = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
  return std::log(p.alpha) + std::log(big_d) - std::log(std::numbers::pi) +
         specfun::log_bessel_k(1.0, p.alpha * r) - std::log(r) + big_d * gamma0 + p.beta * d;
}

// Distribution function of a unimodal density with a possible cusp at
// `center`. The mass left of the center is integrated once; other points
// integrate outward from the center in standardized units.
class CenteredCdf {
 public:
  CenteredCdf(std::function<double(double)> density, double center, double scale)
      : density_(std::move(density)), center_(center), scale_(scale) {
    left_mass_ = integrate_u(-kInf, 0.0);
  }

  double operator()(double x) const {
    const double u = (x - center_) / scale_;
    if (u == 0.0) return left_mass_;
    if (u < 0.0) return std::clamp(left_mass_ - integrate_u(u, 0.0), 0.0, 1.0);
    return std::clamp(left_mass_ + integrate_u(0.0, u), 0.0, 1.0);
  }

 private:
  double integrate_u(double a, double b) const {
    const auto g = [this](double u) { return scale_ * density_(center_ + scale_ * u); };
    numeric::QuadOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-11;
    opts.max_intervals = 2000;
    std::vector<double> cuts;
    for (double c : {-1.0, 1.0}) {
      if (c > a && c < b) cuts.push_back(c);
    }
    const auto r = numeric::integrate(g, a, b, opts, cuts);
    if (!std::isfinite(r.value) || r.error > 1e-8) {
      fail(ErrorCode::QuadratureFailure, kModule, "CDF quadrature did not converge");
    }
    return r.value;
  }

  std::function<double(double)> density_;
  double center_;
  double scale_;
  double left_mass_ = 0.0;
};

double invert_cdf(const CenteredCdf& cdf, double p, double mean, double sd) {
  double lo = mean - 4.0 * sd;
  double hi = mean + 4.0 * sd;
  for (int i = 0; i < 60 && cdf(lo) > p; ++i) lo -= 4.0 * sd * (i + 1);
  for (int i = 0; i < 60 && cdf(hi) < p; ++i) hi += 4.0 * sd * (i + 1);
  return numeric::find_root([&](double x) { return cdf(x) - p; }, lo, hi, 1e-12 * std::max(1.0, sd));
}

struct SampleMoments {
  double mean;
  double var;
  double skew;
  double kurt;
};

SampleMoments sample_moments(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : x) {
    const double d = v - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  if (!(m2 > 0.0)) fail(ErrorCode::DegenerateSeries, kModule, "returns have zero variance");
  return {m, m2, m3 / std::pow(m2, 1.5), m4 / (m2 * m2)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Variance Gamma

double vg_log_density(double x, const VgParams& params, double dt) {
  check_vg(params, dt);
  return unchecked_vg_log_density(x, params, dt);
}

double vg_density(double x, const VgParams& params, double dt) {
  return std::exp(vg_log_density(x, params, dt));
}

Moments vg_moments(const VgParams& p, double dt) {
  check_vg(p, dt);
  const double th = p.theta_bar;
  const double s2 = p.sigma_bar * p.sigma_bar;
  const double nu = p.nu;
  Moments m;
  m.mean = (p.mu_bar + th) * dt;
  m.variance = (nu * th * th + s2) * dt;
  const double c3 = (2.0 * th * th * th * nu * nu + 3.0 * s2 * nu * th) * dt;
  const double c4 = (3.0 * nu * s2 * s2 + 12.0 * th * th * s2 * nu * nu +
                     6.0 * th * th * th * th * nu * nu * nu) *
                        dt +
                    (3.0 * s2 * s2 + 6.0 * th * th * s2 * nu + 3.0 * th * th * th * th * nu * nu) *
                        dt * dt;
  m.skewness = c3 / std::pow(m.variance, 1.5);
  m.kurtosis = c4 / (m.variance * m.variance);
  return m;
}

double vg_cdf(double x, const VgParams& params, double dt) {
  check_vg(params, dt);
  const auto m = vg_moments(params, dt);
  CenteredCdf cdf([&](double y) { return std::exp(unchecked_vg_log_density(y, params, dt)); },
                  params.mu_bar * dt, std::sqrt(m.variance));
  return cdf(x);
}

VgParams vg_initial_guess(const LogReturns& x) {
  if (x.size() < 4) fail(ErrorCode::InsufficientData, kModule, "need at least four returns");
  const double dt = x.dt;
  const auto s = sample_moments(x.values);
  VgParams p;
  p.sigma_bar = std::sqrt(s.var / dt);
  p.nu = (s.kurt / 3.0 - 1.0) * dt;
  if (!(p.nu > kNuFloor * dt)) {
    p.nu = kNuFloor * dt;
    p.theta_bar = 0.0;
  } else {
    p.theta_bar = s.skew * p.sigma_bar * std::sqrt(dt) / (3.0 * p.nu);
  }
  p.mu_bar = s.mean / dt - p.theta_bar;
  return p;
}

double vg_log_likelihood(const VgParams& params, const LogReturns& x) {
  check_vg(params, x.dt);
  double ll = 0.0;
  for (double v : x.values) ll += unchecked_vg_log_density(v, params, x.dt);
  return ll;
}

CalibrationResult<VgParams> vg_calibrate(const LogReturns& x) {
  if (x.size() < 100) fail(ErrorCode::InsufficientData, kModule, "VG calibration needs n >= 100");
  const double dt = x.dt;
  const double floor = kNuFloor * dt;
  VgParams guess = vg_initial_guess(x);
  // Keep the start off the floor so the log transform has room.
  VgParams start = guess;
  start.nu = std::max(start.nu, 10.0 * floor);

  auto decode = [&](std::span<const double> z) {
    return VgParams{z[0] - z[1], z[1], std::exp(z[2]), floor + std::exp(z[3])};
  };
  auto objective = [&](std::span<const double> z) {
    const VgParams p = decode(z);
    double ll = 0.0;
    for (double v : x.values) ll += unchecked_vg_log_density(v, p, dt);
    return -ll;
  };
  const double sd = std::sqrt(sample_moments(x.values).var);
  const double drift_step = 0.3 * sd / dt;
  std::vector<double> z0 = {start.mu_bar + start.theta_bar, start.theta_bar, std::log(start.sigma_bar),
                            std::log(start.nu - floor)};
  numeric::MinimizeOptions opts;
  opts.max_evaluations = 8000;
  const auto res = numeric::minimize(objective, z0, {drift_step, drift_step, 0.2, 0.7}, opts);

  CalibrationResult<VgParams> out;
  out.initial_guess = guess;
  out.initial_log_likelihood = vg_log_likelihood(guess, x);
  out.params = decode(res.x);
  out.log_likelihood = -res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;
  if (out.initial_log_likelihood > out.log_likelihood) {
    out.params = guess;
    out.log_likelihood = out.initial_log_likelihood;
  }
  return out;
}

PathSet vg_simulate(const VgParams& params, double s0, std::size_t n_steps, std::size_t n_paths,
                    double dt, const RngStream& rng) {
  check_vg(params, dt);
  if (!(s0 > 0.0)) fail(ErrorCode::InvalidParam, kModule, "s0 must be positive");
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  const double shape = dt / params.nu;
  for (std::size_t p = 0; p < n_paths; ++p) {
    const RngStream path = rng.child(p);
    RngStream z = path.child(0);
    RngStream clock = path.child(1);
    auto row = out.path(p);
    row[0] = s0;
    double log_s = std::log(s0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
      const double g = sample_gamma(clock, shape, params.nu);
      log_s += params.mu_bar * dt + params.theta_bar * g + params.sigma_bar * std::sqrt(g) * z.normal();
      row[i] = std::exp(log_s);
    }
  }
  return out;
}

VgIncrements vg_sample_increments(const VgParams& params, std::size_t n, double dt,
                                  const RngStream& rng) {
  check_vg(params, dt);
  VgIncrements out;
  out.increments.resize(n);
  out.clock.resize(n);
  const double shape = dt / params.nu;
  for (std::size_t k = 0; k < n; ++k) {
    const RngStream step = rng.child(k);
    RngStream z = step.child(0);
    RngStream clock = step.child(1);
    const double g = sample_gamma(clock, shape, params.nu);
    out.clock[k] = g;
    out.increments[k] =
        params.mu_bar * dt + params.theta_bar * g + params.sigma_bar * std::sqrt(g) * z.normal();
  }
  return out;
}

std::vector<std::vector<double>> vg_percentiles(const VgParams& params,
                                                std::span<const double> horizons,
                                                std::span<const double> probs) {
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidParam, kModule, "probabilities must lie in (0,1)");
  }
  std::vector<std::vector<double>> out;
  out.reserve(horizons.size());
  for (double h : horizons) {
    check_vg(params, h);
    const auto m = vg_moments(params, h);
    const double sd = std::sqrt(m.variance);
    CenteredCdf cdf([&](double y) { return std::exp(unchecked_vg_log_density(y, params, h)); },
                    params.mu_bar * h, sd);
    std::vector<double> row;
    row.reserve(probs.size());
    for (double p : probs) row.push_back(invert_cdf(cdf, p, m.mean, sd));
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal inverse Gaussian

double nig_log_density(double x, const NigParams& params, double dt) {
  check_nig(params, dt);
  return unchecked_nig_log_density(x, params, dt);
}

double nig_density(double x, const NigParams& params, double dt) {
  return std::exp(nig_log_density(x, params, dt));
}

double nig_cdf(double x, const NigParams& params, double dt) {
  check_nig(params, dt);
  const auto m = nig_moments(params, dt);
  CenteredCdf cdf([&](double y) { return std::exp(unchecked_nig_log_density(y, params, dt)); },
                  m.mean, std::sqrt(m.variance));
  return cdf(x);
}

Moments nig_moments(const NigParams& p, double dt) {
  check_nig(p, dt);
  const double big_d = p.delta * dt;
  const double g0 = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
  const double rho = p.beta / p.alpha;
  Moments m;
  m.mean = p.mu * dt + big_d * p.beta / g0;
  m.variance = big_d * p.alpha * p.alpha / (g0 * g0 * g0);
  m.skewness = 3.0 * rho / std::sqrt(big_d * g0);
  m.kurtosis = 3.0 + 3.0 * (1.0 + 4.0 * rho * rho) / (big_d * g0);
  return m;
}

NigParams nig_moment_match(const Moments& m, double dt) {
  if (!(m.variance > 0.0) || !(dt > 0.0)) {
    fail(ErrorCode::InvalidParam, kModule, "moment match needs positive variance and dt");
  }
  const double s2 = m.skewness * m.skewness;
  // rho^2 = S^2 / (3 kappa - 4 S^2) < 1 requires kappa > 5 S^2 / 3.
  const double kappa = std::max({m.kurtosis - 3.0, 1e-3, 1.05 * 5.0 * s2 / 3.0});
  const double rho2 = std::min(s2 / (3.0 * kappa - 4.0 * s2), 0.95);
  const double dg = 3.0 * (1.0 + 4.0 * rho2) / kappa;  // delta dt gamma0
  const double one_minus = 1.0 - rho2;
  const double alpha = std::sqrt(dg / (m.variance * one_minus * one_minus));
  const double beta = std::copysign(std::sqrt(rho2) * alpha, m.skewness);
  const double g0 = alpha * std::sqrt(one_minus);
  const double big_d = dg / g0;
  NigParams p;
  p.alpha = alpha;
  p.beta = beta;
  p.delta = big_d / dt;
  p.mu = (m.mean - big_d * beta / g0) / dt;
  return p;
}

double nig_log_likelihood(const NigParams& params, const LogReturns& x) {
  check_nig(params, x.dt);
  double ll = 0.0;
  for (double v : x.values) ll += unchecked_nig_log_density(v, params, x.dt);
  return ll;
}

CalibrationResult<NigParams> nig_calibrate(const LogReturns& x) {
  if (x.size() < 100) fail(ErrorCode::InsufficientData, kModule, "NIG calibration needs n >= 100");
  const double dt = x.dt;
  const auto s = sample_moments(x.values);
  const NigParams guess = nig_moment_match({s.mean, s.var, s.skew, s.kurt}, dt);

  auto decode = [](std::span<const double> z) {
    const double alpha = std::exp(z[0]);
    return NigParams{alpha, alpha * std::tanh(z[1]), std::exp(z[2]), z[3]};
  };
  auto objective = [&](std::span<const double> z) {
    const NigParams p = decode(z);
    if (!(p.alpha > std::fabs(p.beta)) || !(p.delta > 0.0)) return kInf;
    double ll = 0.0;
    for (double v : x.values) ll += unchecked_nig_log_density(v, p, dt);
    return -ll;
  };
  std::vector<double> z0 = {std::log(guess.alpha), std::atanh(guess.beta / guess.alpha),
                            std::log(guess.delta), guess.mu};
  const double mu_step = 0.3 * std::sqrt(s.var) / dt;
  numeric::MinimizeOptions opts;
  opts.max_evaluations = 8000;
  const auto res = numeric::minimize(objective, z0, {0.5, 0.3, 0.5, mu_step}, opts);

  CalibrationResult<NigParams> out;
  out.initial_guess = guess;
  out.initial_log_likelihood = nig_log_likelihood(guess, x);
  out.params = decode(res.x);
  out.log_likelihood = -res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;
  if (out.initial_log_likelihood > out.log_likelihood) {
    out.params = guess;
    out.log_likelihood = out.initial_log_likelihood;
  }
  return out;
}

namespace {

double nig_step(const NigParams& p, double dt, RngStream& z, RngStream& mixing) {
  const double big_d = p.delta * dt;
  const double g0 = std::sqrt((p.alpha - p.beta) * (p.alpha + p.beta));
  const double xi = sample_inverse_gaussian(mixing, big_d / g0, big_d * big_d);
  return p.mu * dt + p.beta * xi + std::sqrt(xi) * z.normal();
}

}  // namespace

PathSet nig_simulate(const NigParams& params, double s0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng) {
  check_nig(params, dt);
  if (!(s0 > 0.0)) fail(ErrorCode::InvalidParam, kModule, "s0 must be positive");
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const RngStream path = rng.child(p);
    RngStream z = path.child(0);
    RngStream mixing = path.child(1);
    auto row = out.path(p);
    row[0] = s0;
    double log_s = std::log(s0);
    for (std::size_t i = 1; i <= n_steps; ++i) {
      log_s += nig_step(params, dt, z, mixing);
      row[i] = std::exp(log_s);
    }
  }
  return out;
}

std::vector<double> nig_sample_increments(const NigParams& params, std::size_t n, double dt,
                                          const RngStream& rng) {
  check_nig(params, dt);
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const RngStream step = rng.child(k);
    RngStream z = step.child(0);
    RngStream mixing = step.child(1);
    out[k] = nig_step(params, dt, z, mixing);
  }
  return out;
}

}  // namespace stochcal::subordinated
