#include "stochcal/meanrev_jumps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "stochcal/errors.hpp"
#include "stochcal/numeric.hpp"
#include "stochcal/specfun.hpp"

namespace stochcal::meanrev_jumps {

namespace {

constexpr const char* kModule = "meanrev_jumps";
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_params(const JumpVasicekParams& p, double dt) {
  const double vals[] = {p.alpha,     p.theta,  p.sigma,     p.lambda_up, p.mu_up,
                         p.sigma_up,  p.lambda_dn, p.mu_dn,  p.sigma_dn};
  for (double v : vals) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParam, kModule, "parameters must be finite");
  }
  if (!(p.alpha > 0.0) || p.sigma < 0.0 || p.lambda_up < 0.0 || p.lambda_dn < 0.0 ||
      p.sigma_up < 0.0 || p.sigma_dn < 0.0) {
    fail(ErrorCode::InvalidParam, kModule,
         "need alpha > 0 and nonnegative sigma, intensities and jump deviations");
  }
  if (!(dt > 0.0)) fail(ErrorCode::InvalidParam, kModule, "dt must be positive");
}

double log_normal_pdf(double x, double m, double v) {
  const double d = x - m;
  return -0.5 * (std::log(2.0 * std::numbers::pi * v) + d * d / v);
}

struct Step {
  double b;
  double c;
  double v;
};

Step step_constants(const JumpVasicekParams& p, double dt) {
  Step s;
  s.b = std::exp(-p.alpha * dt);
  s.c = -p.theta * std::expm1(-p.alpha * dt);
  s.v = p.sigma * p.sigma * -std::expm1(-2.0 * p.alpha * dt) / (2.0 * p.alpha);
  return s;
}

double unchecked_log_pdf(double x, double x_prev, const JumpVasicekParams& p, double dt,
                         const Step& s) {
  const double m = s.c + s.b * x_prev;
  const double w_up = p.lambda_up * dt;
  const double w_dn = p.lambda_dn * dt;
  double terms[3];
  std::size_t k = 0;
  terms[k++] = std::log1p(-(w_up + w_dn)) + log_normal_pdf(x, m, s.v);
  if (w_up > 0.0) {
    terms[k++] = std::log(w_up) + log_normal_pdf(x, m + p.mu_up, s.v + p.sigma_up * p.sigma_up);
  }
  if (w_dn > 0.0) {
    terms[k++] = std::log(w_dn) + log_normal_pdf(x, m - p.mu_dn, s.v + p.sigma_dn * p.sigma_dn);
  }
  return numeric::log_sum_exp({terms, k});
}

double unchecked_ll(const JumpVasicekParams& p, std::span<const double> x, double dt) {
  if ((p.lambda_up + p.lambda_dn) * dt >= 1.0) return -kInf;
  const Step s = step_constants(p, dt);
  double ll = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) ll += unchecked_log_pdf(x[i], x[i - 1], p, dt, s);
  return ll;
}

double jump_sum(RngStream& rng, double rate_dt, double mu, double sd, double alpha, double dt,
                JumpTiming timing) {
  const auto n = sample_poisson(rng, rate_dt);
  double sum = 0.0;
  for (std::uint64_t j = 0; j < n; ++j) {
    const double y = mu + sd * rng.normal();
    if (timing == JumpTiming::Exact) {
      // Arrival at u dt into the step; decays over the remaining (1 - u) dt.
      const double u = rng.uniform();
      sum += y * std::exp(-alpha * (1.0 - u) * dt);
    } else {
      sum += y;
    }
  }
  return timing == JumpTiming::Exact ? sum : sum * std::exp(-alpha * dt);
}

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }
double logit(double p) { return std::log(p / (1.0 - p)); }

// Free coordinates: log alpha, theta, log sigma, then per jump stream
// logit(2 lambda dt), mu, log sd.
JumpVasicekParams decode(std::span<const double> z, double dt) {
  JumpVasicekParams p;
  p.alpha = std::exp(z[0]);
  p.theta = z[1];
  p.sigma = std::exp(z[2]);
  p.lambda_up = 0.5 * logistic(z[3]) / dt;
  p.mu_up = z[4];
  p.sigma_up = std::exp(z[5]);
  if (z.size() > 6) {
    p.lambda_dn = 0.5 * logistic(z[6]) / dt;
    p.mu_dn = z[7];
    p.sigma_dn = std::exp(z[8]);
  }
  return p;
}

std::vector<double> encode(const JumpVasicekParams& p, double dt, bool double_jumps) {
  auto rate = [dt](double lambda) { return logit(std::clamp(2.0 * lambda * dt, 1e-8, 1.0 - 1e-8)); };
  auto log_sd = [](double s) { return std::log(std::max(s, 1e-12)); };
  std::vector<double> z = {std::log(p.alpha), p.theta, std::log(p.sigma), rate(p.lambda_up),
                           p.mu_up, log_sd(p.sigma_up)};
  if (double_jumps) {
    z.push_back(rate(p.lambda_dn));
    z.push_back(p.mu_dn);
    z.push_back(log_sd(p.sigma_dn));
  }
  return z;
}

struct Exceedances {
  double rate_dt = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

Exceedances summarize(const std::vector<double>& e, std::size_t n_steps, double floor_sd) {
  Exceedances out;
  const double n = static_cast<double>(e.size());
  out.rate_dt = std::clamp(n / static_cast<double>(n_steps), 1e-3, 0.4);
  if (e.empty()) return out;
  double m = 0.0;
  for (double v : e) m += v;
  m /= n;
  double s = 0.0;
  for (double v : e) s += (v - m) * (v - m);
  out.mean = m;
  out.sd = std::max(e.size() > 1 ? std::sqrt(s / n) : 0.0, floor_sd);
  return out;
}

}  // namespace

meanrev::VasicekParams diffusion_part(const JumpVasicekParams& p) {
  return {p.alpha, p.theta, p.sigma};
}

double long_run_mean(const JumpVasicekParams& p) {
  return p.theta + (p.lambda_up * p.mu_up - p.lambda_dn * p.mu_dn) / p.alpha;
}

double conditional_mean(const JumpVasicekParams& p, double x0, double t) {
  const double target = long_run_mean(p);
  return target + (x0 - target) * std::exp(-p.alpha * t);
}

double conditional_variance(const JumpVasicekParams& p, double t) {
  const double total = p.sigma * p.sigma +
                       p.lambda_up * (p.mu_up * p.mu_up + p.sigma_up * p.sigma_up) +
                       p.lambda_dn * (p.mu_dn * p.mu_dn + p.sigma_dn * p.sigma_dn);
  return total * -std::expm1(-2.0 * p.alpha * t) / (2.0 * p.alpha);
}

PathSet simulate(const JumpVasicekParams& params, double x0, std::size_t n_steps,
                 std::size_t n_paths, double dt, const RngStream& rng, JumpTiming timing) {
  check_params(params, dt);
  if (!std::isfinite(x0)) fail(ErrorCode::InvalidParam, kModule, "x0 must be finite");
  if ((params.lambda_up + params.lambda_dn) * dt >= 0.5) {
    fail(ErrorCode::InvalidParam, kModule, "(lambda_up + lambda_dn) dt must stay below 0.5");
  }
  const Step s = step_constants(params, dt);
  const double delta = meanrev::to_ar(diffusion_part(params), dt).delta;
  PathSet out(n_paths, n_steps, dt, rng.seed(), Scheme::Exact);
  for (std::size_t p = 0; p < n_paths; ++p) {
    const RngStream path = rng.child(p);
    RngStream z = path.child(0);
    RngStream jr = path.child(1);
    auto row = out.path(p);
    row[0] = x0;
    for (std::size_t i = 1; i <= n_steps; ++i) {
      double x = s.c + s.b * row[i - 1] + delta * z.normal();
      if (params.lambda_up > 0.0) {
        x += jump_sum(jr, params.lambda_up * dt, params.mu_up, params.sigma_up, params.alpha, dt,
                      timing);
      }
      if (params.lambda_dn > 0.0) {
        x -= jump_sum(jr, params.lambda_dn * dt, params.mu_dn, params.sigma_dn, params.alpha, dt,
                      timing);
      }
      row[i] = x;
    }
  }
  return out;
}

PathSet exp_simulate(const JumpVasicekParams& params, double x0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng, JumpTiming timing) {
  if (!(x0 > 0.0)) fail(ErrorCode::InvalidParam, kModule, "x0 must be positive");
  PathSet out = simulate(params, std::log(x0), n_steps, n_paths, dt, rng, timing);
  for (auto& v : out.values) v = std::exp(v);
  return out;
}

double log_transition_pdf(double x_next, double x_prev, const JumpVasicekParams& params,
                          double dt) {
  check_params(params, dt);
  if (!(params.sigma > 0.0)) fail(ErrorCode::InvalidParam, kModule, "sigma must be positive");
  if ((params.lambda_up + params.lambda_dn) * dt >= 1.0) {
    fail(ErrorCode::IntensityTooLarge, kModule, "(lambda_up + lambda_dn) dt must be below 1");
  }
  return unchecked_log_pdf(x_next, x_prev, params, dt, step_constants(params, dt));
}

double transition_pdf(double x_next, double x_prev, const JumpVasicekParams& params, double dt) {
  return std::exp(log_transition_pdf(x_next, x_prev, params, dt));
}

double log_likelihood(const JumpVasicekParams& params, std::span<const double> x, double dt) {
  check_params(params, dt);
  if ((params.lambda_up + params.lambda_dn) * dt >= 1.0) {
    fail(ErrorCode::IntensityTooLarge, kModule, "(lambda_up + lambda_dn) dt must be below 1");
  }
  return unchecked_ll(params, x, dt);
}

double transition_mgf(double u, double x_prev, const JumpVasicekParams& params, double dt) {
  check_params(params, dt);
  const Step s = step_constants(params, dt);
  const double m = s.c + s.b * x_prev;
  double exponent = m * u + 0.5 * s.v * u * u;
  auto jump_term = [&](double lambda, double mu, double sd, double sign) {
    if (lambda == 0.0) return 0.0;
    const auto integrand = [&](double z) {
      const double w = sign * u * std::exp(-params.alpha * (dt - z));
      return std::expm1(mu * w + 0.5 * sd * sd * w * w);
    };
    numeric::QuadOptions opts;
    opts.abs_tol = 1e-15;
    opts.rel_tol = 1e-12;
    const auto r = numeric::integrate(integrand, 0.0, dt, opts);
    if (!r.converged) fail(ErrorCode::QuadratureFailure, kModule, "MGF jump integral did not converge");
    return lambda * r.value;
  };
  exponent += jump_term(params.lambda_up, params.mu_up, params.sigma_up, 1.0);
  exponent += jump_term(params.lambda_dn, params.mu_dn, params.sigma_dn, -1.0);
  return std::exp(exponent);
}

CalibrationResult<JumpVasicekParams> calibrate(std::span<const double> x, double dt,
                                               bool double_jumps) {
  if (x.size() < 200) fail(ErrorCode::InsufficientData, kModule, "calibration needs n >= 200");
  const auto base = meanrev::vasicek_calibrate_ols(x, dt);
  const auto ar = meanrev::to_ar(base.params, dt);
  const double delta = ar.delta;

  std::vector<double> up, dn, both;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double e = x[i] - ar.c - ar.b * x[i - 1];
    if (e > 3.0 * delta) up.push_back(e);
    if (e < -3.0 * delta) dn.push_back(-e);
    if (std::fabs(e) > 3.0 * delta) both.push_back(e);
  }
  const std::size_t steps = x.size() - 1;

  JumpVasicekParams guess;
  guess.alpha = base.params.alpha;
  guess.theta = base.params.theta;
  guess.sigma = base.params.sigma;
  if (double_jumps) {
    const auto u = summarize(up, steps, 0.5 * delta);
    const auto d = summarize(dn, steps, 0.5 * delta);
    guess.lambda_up = u.rate_dt / dt;
    guess.mu_up = up.empty() ? 3.0 * delta : u.mean;
    guess.sigma_up = u.sd;
    guess.lambda_dn = d.rate_dt / dt;
    guess.mu_dn = dn.empty() ? 3.0 * delta : d.mean;
    guess.sigma_dn = d.sd;
  } else {
    const auto j = summarize(both, steps, 0.5 * delta);
    guess.lambda_up = j.rate_dt / dt;
    guess.mu_up = both.empty() ? 3.0 * delta : j.mean;
    guess.sigma_up = j.sd;
  }
  // Residual exceedances also inflate the OLS diffusion estimate; start the
  // diffusion from the residuals inside the band.
  {
    double ss = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      const double e = x[i] - ar.c - ar.b * x[i - 1];
      if (std::fabs(e) <= 3.0 * delta) {
        ss += e * e;
        ++count;
      }
    }
    if (count > 10) {
      const double inner = std::sqrt(ss / static_cast<double>(count));
      guess.sigma = meanrev::from_ar({ar.c, ar.b, inner}, dt).sigma;
    }
  }

  const double sd_level = base.params.sigma / std::sqrt(2.0 * base.params.alpha);
  auto objective = [&](std::span<const double> z) { return -unchecked_ll(decode(z, dt), x, dt); };
  std::vector<double> step = {0.3, 0.3 * sd_level, 0.2, 1.0, std::max(std::fabs(guess.mu_up), delta) * 0.3,
                              0.5};
  if (double_jumps) {
    step.push_back(1.0);
    step.push_back(std::max(std::fabs(guess.mu_dn), delta) * 0.3);
    step.push_back(0.5);
  }
  numeric::MinimizeOptions opts;
  opts.max_evaluations = double_jumps ? 12000 : 8000;

  CalibrationResult<JumpVasicekParams> out;
  out.initial_guess = guess;
  out.initial_log_likelihood = unchecked_ll(guess, x, dt);
  auto res = numeric::minimize(objective, encode(guess, dt, double_jumps), step, opts);
  out.params = decode(res.x, dt);
  out.log_likelihood = -res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;

  auto consider = [&](const JumpVasicekParams& p, double ll) {
    if (ll > out.log_likelihood) {
      out.params = p;
      out.log_likelihood = ll;
    }
  };
  consider(guess, out.initial_log_likelihood);

  // A jump stream of vanishing size leaves its intensity unidentified; the
  // nested fit is kept unless the likelihood-ratio gain is significant at 5%
  // (3 extra parameters per stream).
  const double critical = specfun::chi2_quantile(0.95, 3.0);
  JumpVasicekParams nested;
  double nested_ll = 0.0;
  if (double_jumps) {
    const auto single = calibrate(x, dt, false);
    out.iterations += single.iterations;
    nested = single.params;
    nested_ll = single.log_likelihood;
  } else {
    nested.alpha = base.params.alpha;
    nested.theta = base.params.theta;
    nested.sigma = base.params.sigma;
    nested_ll = base.log_likelihood;
  }
  if (2.0 * (out.log_likelihood - nested_ll) < critical) {
    out.params = nested;
    out.log_likelihood = nested_ll;
    out.converged = true;
  }
  return out;
}

}  // namespace stochcal::meanrev_jumps
