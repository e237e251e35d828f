#include "stochcal/evt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stochcal/errors.hpp"
#include "stochcal/numeric.hpp"

namespace stochcal::evt {

namespace {

constexpr const char* kModule = "evt";
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kXiZero = 1e-8;

void check_params(const GpdParams& p) {
  if (!(p.beta > 0.0) || !std::isfinite(p.beta) || !std::isfinite(p.xi)) {
    fail(ErrorCode::InvalidParam, kModule, "GPD needs beta > 0 and finite xi");
  }
}

void check_support(double y, const GpdParams& p) {
  if (!(y >= 0.0)) fail(ErrorCode::OutOfSupport, kModule, "GPD support starts at 0");
  if (p.xi < 0.0 && y > -p.beta / p.xi) {
    fail(ErrorCode::OutOfSupport, kModule, "beyond the GPD upper endpoint -beta/xi");
  }
}

// log(1 + xi y / beta) / xi, continuous at xi = 0.
double log_tail_over_xi(double y, const GpdParams& p) {
  const double z = y / p.beta;
  if (std::fabs(p.xi) < kXiZero) return z;
  return std::log1p(p.xi * z) / p.xi;
}

double unchecked_ll(const GpdParams& p, std::span<const double> y) {
  double ll = 0.0;
  const double lb = std::log(p.beta);
  for (double v : y) {
    const double t = 1.0 + p.xi * v / p.beta;
    if (!(t > 0.0)) return -kInf;
    ll += -lb - (1.0 + p.xi) * log_tail_over_xi(v, p);
  }
  return ll;
}

void check_fit(const TailFit& f) {
  check_params(f.gpd);
  if (f.n == 0 || f.n_exceed == 0 || f.n_exceed > f.n) {
    fail(ErrorCode::InvalidParam, kModule, "need 0 < n_exceed <= n");
  }
}

}  // namespace

double gpd_cdf(double y, const GpdParams& params) {
  check_params(params);
  check_support(y, params);
  return -std::expm1(-log_tail_over_xi(y, params));
}

double gpd_pdf(double y, const GpdParams& params) {
  check_params(params);
  check_support(y, params);
  return std::exp(-std::log(params.beta) - (1.0 + params.xi) * log_tail_over_xi(y, params));
}

double gpd_log_likelihood(const GpdParams& params, std::span<const double> excesses) {
  check_params(params);
  return unchecked_ll(params, excesses);
}

CalibrationResult<GpdParams> gpd_fit(std::span<const double> y) {
  if (y.size() < 30) fail(ErrorCode::TooFewExceedances, kModule, "GPD fit needs >= 30 excesses");
  double mean = 0.0;
  double ymax = 0.0;
  for (double v : y) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorCode::InvalidParam, kModule, "excesses must be positive and finite");
    }
    mean += v;
    ymax = std::max(ymax, v);
  }
  mean /= static_cast<double>(y.size());
  double var = 0.0;
  for (double v : y) var += (v - mean) * (v - mean);
  var /= static_cast<double>(y.size());
  if (!(var > 1e-14 * mean * mean)) {
    fail(ErrorCode::OptimizerFailed, kModule, "excesses are all equal; the GPD is not identified");
  }

  // Method-of-moments start, kept inside the admissible region.
  GpdParams guess;
  guess.xi = std::clamp(0.5 * (1.0 - mean * mean / var), -0.45, 0.9);
  guess.beta = 0.5 * mean * (mean * mean / var + 1.0);
  if (guess.xi < 0.0 && 1.0 + guess.xi * ymax / guess.beta <= 0.0) guess.xi = 0.0;

  auto decode = [](std::span<const double> z) { return GpdParams{z[0], std::exp(z[1])}; };
  auto objective = [&](std::span<const double> z) {
    const GpdParams p = decode(z);
    if (!(p.xi > -1.0)) return kInf;
    return -unchecked_ll(p, y);
  };
  numeric::MinimizeOptions opts;
  opts.max_evaluations = 4000;
  const auto res = numeric::minimize(objective, {guess.xi, std::log(guess.beta)}, {0.1, 0.2}, opts);

  CalibrationResult<GpdParams> out;
  out.initial_guess = guess;
  out.initial_log_likelihood = unchecked_ll(guess, y);
  out.params = decode(res.x);
  out.log_likelihood = -res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;
  const GpdParams expo{0.0, mean};
  const double expo_ll = unchecked_ll(expo, y);
  if (expo_ll > out.log_likelihood) {
    out.params = expo;
    out.log_likelihood = expo_ll;
  }
  if (out.initial_log_likelihood > out.log_likelihood) {
    out.params = guess;
    out.log_likelihood = out.initial_log_likelihood;
  }

  // Observed information on (xi, beta).
  auto nll = [&](std::span<const double> z) { return -unchecked_ll(GpdParams{z[0], z[1]}, y); };
  const std::vector<double> at = {out.params.xi, out.params.beta};
  const std::vector<double> h = {1e-4, 1e-4 * out.params.beta};
  if (out.params.xi > -0.5) {
    out.stderr_estimates = numeric::inverse_diagonal_sqrt(numeric::hessian(nll, at, h), 2);
  }
  return out;
}

double tail_cdf(double x, const TailFit& fit) {
  check_fit(fit);
  if (!(x >= fit.u)) fail(ErrorCode::OutOfSupport, kModule, "tail estimator needs x >= u");
  check_support(x - fit.u, fit.gpd);
  const double frac = static_cast<double>(fit.n_exceed) / static_cast<double>(fit.n);
  return 1.0 - frac * std::exp(-log_tail_over_xi(x - fit.u, fit.gpd));
}

double var_estimate(double p, const TailFit& fit) {
  check_fit(fit);
  const double frac = static_cast<double>(fit.n_exceed) / static_cast<double>(fit.n);
  if (!(p > 0.0 && p < frac)) {
    fail(ErrorCode::InvalidProbability, kModule, "tail probability must lie in (0, N_u/n)");
  }
  const double r = p / frac;  // (n / N_u) p
  const auto& g = fit.gpd;
  if (std::fabs(g.xi) < kXiZero) return fit.u - g.beta * std::log(r);
  return fit.u + g.beta / g.xi * std::expm1(-g.xi * std::log(r));
}

double es_estimate(double p, const TailFit& fit) {
  check_fit(fit);
  if (!(fit.gpd.xi < 1.0)) fail(ErrorCode::ShapeTooHeavy, kModule, "ES is infinite for xi >= 1");
  const double var = var_estimate(p, fit);
  return (var + fit.gpd.beta - fit.gpd.xi * fit.u) / (1.0 - fit.gpd.xi);
}

double quantile_estimate(double q, const TailFit& fit) { return var_estimate(1.0 - q, fit); }

double select_threshold(std::span<const double> losses, const ThresholdPolicy& policy) {
  if (const auto* e = std::get_if<ExplicitThreshold>(&policy)) return e->u;
  const double q = std::get<QuantilePolicy>(policy).q;
  if (!(q > 0.0 && q < 1.0)) fail(ErrorCode::InvalidProbability, kModule, "threshold quantile must lie in (0,1)");
  const std::size_t n = losses.size();
  if (n == 0) fail(ErrorCode::InsufficientData, kModule, "no losses");
  std::vector<double> sorted(losses.begin(), losses.end());
  std::sort(sorted.begin(), sorted.end());
  const auto above = static_cast<std::size_t>(std::llround((1.0 - q) * static_cast<double>(n)));
  if (above == 0 || above >= n) fail(ErrorCode::TooFewExceedances, kModule, "threshold quantile leaves no excesses");
  return sorted[n - above - 1];
}

TailReport pot_pipeline(std::span<const double> losses, std::span<const double> p_levels,
                        const PotOptions& options) {
  for (double v : losses) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidParam, kModule, "losses must be finite");
  }
  TailReport rep;
  rep.n = losses.size();
  rep.u = select_threshold(losses, options.policy);
  std::vector<double> excess;
  for (double v : losses) {
    if (v > rep.u) excess.push_back(v - rep.u);
  }
  rep.n_exceed = excess.size();
  if (excess.size() < 30) {
    fail(ErrorCode::TooFewExceedances, kModule,
         "only " + std::to_string(excess.size()) + " excesses over the threshold; need 30");
  }
  const auto fit = gpd_fit(excess);
  rep.gpd = fit.params;
  rep.log_likelihood = fit.log_likelihood;
  const TailFit tf{rep.gpd, rep.u, rep.n, rep.n_exceed};
  rep.p_levels.assign(p_levels.begin(), p_levels.end());
  for (double p : p_levels) {
    rep.var_p.push_back(var_estimate(p, tf));
    rep.es_p.push_back(es_estimate(p, tf));
  }

  if (options.n_bootstrap > 0) {
    rep.n_bootstrap = options.n_bootstrap;
    const RngStream root(options.seed, 0);
    std::vector<std::vector<double>> var_draws(p_levels.size());
    std::vector<std::vector<double>> es_draws(p_levels.size());
    std::vector<double> resample(excess.size());
    for (std::size_t b = 0; b < options.n_bootstrap; ++b) {
      RngStream r = root.child(b);
      for (auto& v : resample) {
        v = excess[static_cast<std::size_t>(r.uniform() * static_cast<double>(excess.size()))];
      }
      GpdParams g;
      try {
        g = gpd_fit(resample).params;
      } catch (const Error&) {
        continue;
      }
      const TailFit bf{g, rep.u, rep.n, rep.n_exceed};
      for (std::size_t k = 0; k < p_levels.size(); ++k) {
        var_draws[k].push_back(var_estimate(p_levels[k], bf));
        if (g.xi < 1.0) es_draws[k].push_back(es_estimate(p_levels[k], bf));
      }
    }
    auto percentile_interval = [](std::vector<double>& d) {
      if (d.empty()) return Interval{std::nan(""), std::nan("")};
      std::sort(d.begin(), d.end());
      auto at = [&](double q) {
        const double h = q * static_cast<double>(d.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, d.size() - 1);
        return d[lo] + (h - static_cast<double>(lo)) * (d[hi] - d[lo]);
      };
      return Interval{at(0.025), at(0.975)};
    };
    for (std::size_t k = 0; k < p_levels.size(); ++k) {
      rep.var_ci.push_back(percentile_interval(var_draws[k]));
      rep.es_ci.push_back(percentile_interval(es_draws[k]));
    }
  }
  return rep;
}

}  // namespace stochcal::evt
