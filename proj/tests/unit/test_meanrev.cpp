#include <algorithm>
#include <cmath>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include "doctest.h"
#include "stochcal/errors.hpp"
#include "stochcal/meanrev.hpp"
#include "stochcal/rng.hpp"
#include "testkit.hpp"

using namespace stochcal;
using namespace stochcal::meanrev;

namespace {

const CirParams kEmu{1.2902, 51.7894, 4.4966};

struct Line {
  double intercept;
  double slope;
  double mse;
};

Line regress_on_lag(std::span<const double> x) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const std::size_t n = x.size() - 1;
  for (std::size_t i = 1; i <= n; ++i) {
    sx += x[i - 1];
    sy += x[i];
    sxx += static_cast<long double>(x[i - 1]) * x[i - 1];
    sxy += static_cast<long double>(x[i - 1]) * x[i];
  }
  const long double nn = n;
  const long double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  const long double intercept = (sy - slope * sx) / nn;
  long double ss = 0;
  for (std::size_t i = 1; i <= n; ++i) {
    const long double e = x[i] - intercept - slope * x[i - 1];
    ss += e * e;
  }
  return {static_cast<double>(intercept), static_cast<double>(slope), static_cast<double>(ss / nn)};
}

std::vector<double> vasicek_path(const VasicekParams& p, std::size_t n, double dt, std::uint64_t seed) {
  const auto ps = vasicek_simulate(p, p.theta, n - 1, 1, dt, RngStream(seed, 0));
  return {ps.values.begin(), ps.values.end()};
}

// Transition density through the noncentral chi-squared law of 2 c x_next.
double cir_reference_pdf(double x_next, double x_prev, const CirParams& p, double dt) {
  const double e = std::exp(-p.alpha * dt);
  const double c = 2.0 * p.alpha / (p.sigma * p.sigma * (1.0 - e));
  const double q = 2.0 * p.alpha * p.theta / (p.sigma * p.sigma) - 1.0;
  const boost::math::non_central_chi_squared_distribution<double> law(2.0 * q + 2.0,
                                                                      2.0 * c * x_prev * e);
  return 2.0 * c * boost::math::pdf(law, 2.0 * c * x_next);
}

double cir_reference_cdf(double x_next, double x_prev, const CirParams& p, double dt) {
  const double e = std::exp(-p.alpha * dt);
  const double c = 2.0 * p.alpha / (p.sigma * p.sigma * (1.0 - e));
  const double q = 2.0 * p.alpha * p.theta / (p.sigma * p.sigma) - 1.0;
  const boost::math::non_central_chi_squared_distribution<double> law(2.0 * q + 2.0,
                                                                      2.0 * c * x_prev * e);
  return boost::math::cdf(law, 2.0 * c * x_next);
}

}  // namespace

TEST_CASE("ar coefficient round trip") {
  for (const VasicekParams& p : {VasicekParams{2.0, 0.05, 0.02}, VasicekParams{0.3, -1.0, 2.5},
                                 VasicekParams{15.0, 100.0, 30.0}}) {
    for (double dt : {1.0 / 252.0, 1.0 / 52.0, 0.5}) {
      const auto ar = to_ar(p, dt);
      CHECK(-std::log(ar.b) / dt == doctest::Approx(p.alpha).epsilon(1e-12));
      const auto back = from_ar(ar, dt);
      CHECK(back.alpha == doctest::Approx(p.alpha).epsilon(1e-12));
      CHECK(back.theta == doctest::Approx(p.theta).epsilon(1e-12));
      CHECK(back.sigma == doctest::Approx(p.sigma).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(from_ar({0.1, 1.0, 0.2}, 0.02), Error);
  CHECK_THROWS_AS(from_ar({0.1, -0.2, 0.2}, 0.02), Error);
}

TEST_CASE("ar coefficients of a credit index fit map to vasicek parameters") {
  const auto p = from_ar({0.3625, 0.9054, 0.1894}, 0.02);
  CHECK(std::fabs(p.alpha - 4.9701) < 2e-3);
  CHECK(std::fabs(p.theta - 3.8307) < 2e-3);
  CHECK(std::fabs(p.sigma - 1.4061) < 2e-3);
}

TEST_CASE("vasicek without noise follows the mean ode") {
  const VasicekParams p{1.5, 2.0, 0.0};
  const double dt = 0.1;
  const auto ps = vasicek_simulate(p, 5.0, 40, 2, dt, RngStream(1, 0));
  for (std::size_t i = 0; i <= 40; ++i) {
    const double t = dt * static_cast<double>(i);
    const double ref = 2.0 + 3.0 * std::exp(-1.5 * t);
    CHECK(ps.at(1, i) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(vasicek_mean(p, 5.0, t) == doctest::Approx(ref).epsilon(1e-14));
  }
}

TEST_CASE("vasicek terminal moments") {
  const VasicekParams p{2.0, 0.05, 0.02};
  const double x0 = 0.12;
  const double horizon = 5.0 / p.alpha;
  const auto ps = vasicek_simulate(p, x0, 10, 1000000, horizon / 10.0, RngStream(2, 0));
  const auto terminal = ps.terminal();
  const double mean_ref = p.theta + (x0 - p.theta) * std::exp(-5.0);
  const double var_ref = p.sigma * p.sigma * (1.0 - std::exp(-10.0)) / (2.0 * p.alpha);
  CHECK(testkit::within_se(testkit::mean_of(terminal), mean_ref));
  CHECK(testkit::within_se(testkit::variance_of(terminal), var_ref));
  CHECK(vasicek_mean(p, x0, horizon) == doctest::Approx(mean_ref).epsilon(1e-14));
  CHECK(vasicek_variance(p, horizon) == doctest::Approx(var_ref).epsilon(1e-14));
}

TEST_CASE("vasicek increments are gaussian around the ar prediction") {
  const VasicekParams p{3.0, 1.0, 0.5};
  const double dt = 1.0 / 52.0;
  const auto x = vasicek_path(p, 20001, dt, 3);
  const auto ar = to_ar(p, dt);
  std::vector<double> z(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) z[i - 1] = (x[i] - ar.c - ar.b * x[i - 1]) / ar.delta;
  const boost::math::normal_distribution<double> std_normal;
  const double d = testkit::ks_statistic(z, [&](double v) { return boost::math::cdf(std_normal, v); });
  CHECK(testkit::ks_pvalue(d, z.size()) > 0.001);
}

TEST_CASE("vasicek recovery") {
  const VasicekParams p{2.0, 0.05, 0.02};
  const auto x = vasicek_path(p, 10000, 1.0 / 52.0, 4);
  const auto fit = vasicek_calibrate_ols(x, 1.0 / 52.0);
  CHECK(std::fabs(fit.params.alpha / p.alpha - 1.0) < 0.2);
  CHECK(std::fabs(fit.params.theta / p.theta - 1.0) < 0.1);
  CHECK(std::fabs(fit.params.sigma / p.sigma - 1.0) < 0.05);
  CHECK(fit.log_likelihood == doctest::Approx(vasicek_log_likelihood(fit.params, x, 1.0 / 52.0)).epsilon(1e-12));
}

TEST_CASE("least squares and maximum likelihood coincide") {
  const double dt = 1.0 / 52.0;
  std::vector<std::vector<double>> sets = {vasicek_path({2.0, 0.05, 0.02}, 500, dt, 5),
                                           vasicek_path({0.5, -3.0, 1.0}, 2000, dt, 6)};
  std::vector<double> wiggle(60);
  for (std::size_t i = 0; i < wiggle.size(); ++i) wiggle[i] = std::sin(0.7 * i) + 0.01 * i;
  sets.push_back(wiggle);
  for (const auto& x : sets) {
    const auto a = vasicek_calibrate_ols(x, dt);
    const auto b = vasicek_calibrate_mle(x, dt);
    const auto ar_a = to_ar(a.params, dt);
    const auto ar_b = to_ar(b.params, dt);
    CHECK(ar_a.b == doctest::Approx(ar_b.b).epsilon(1e-9));
    CHECK(a.params.theta == doctest::Approx(b.params.theta).epsilon(1e-9));
    const auto line = regress_on_lag(x);
    CHECK(ar_a.b == doctest::Approx(line.slope).epsilon(1e-10));
    CHECK(ar_a.delta * ar_a.delta == doctest::Approx(line.mse).epsilon(1e-12));
    CHECK(ar_b.delta * ar_b.delta == doctest::Approx(line.mse).epsilon(1e-10));
  }
}

TEST_CASE("vasicek calibration error paths") {
  const std::vector<double> two = {0.0, 1.0};
  CHECK_THROWS_AS(vasicek_calibrate_mle(two, 1.0), Error);
  try {
    vasicek_calibrate_ols(two, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }

  std::vector<double> explosive(200);
  RngStream rng(7, 0);
  explosive[0] = 1.0;
  for (std::size_t i = 1; i < explosive.size(); ++i) explosive[i] = 1.02 * explosive[i - 1] + 0.01 * rng.normal();
  for (auto fit : {&vasicek_calibrate_ols, &vasicek_calibrate_mle}) {
    try {
      fit(explosive, 1.0);
      FAIL("expected NonStationaryEstimate");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonStationaryEstimate);
    }
  }

  std::vector<double> walk(3000);
  for (std::size_t i = 1; i < walk.size(); ++i) walk[i] = walk[i - 1] + rng.normal();
  if (regress_on_lag(walk).slope >= 1.0) {
    CHECK_THROWS_AS(vasicek_calibrate_ols(walk, 1.0), Error);
  } else {
    CHECK(vasicek_calibrate_ols(walk, 1.0).params.alpha > 0.0);
  }
}

TEST_CASE("exponential vasicek") {
  const VasicekParams p{4.97, 3.83, 1.41};
  const double dt = 0.02;
  auto ps = exp_vasicek_simulate(p, 40.0, 2999, 1, dt, RngStream(8, 0));
  for (double v : ps.values) CHECK(v > 0.0);
  const std::vector<double> x(ps.values.begin(), ps.values.end());
  const auto fit = exp_vasicek_calibrate(x, dt);
  const auto& f = fit.log_fit.params;
  CHECK(fit.m == doctest::Approx(f.theta + f.sigma * f.sigma / (2.0 * f.alpha)).epsilon(1e-14));

  for (double k : {0.01, 7.5}) {
    std::vector<double> scaled = x;
    for (auto& v : scaled) v *= k;
    const auto g = exp_vasicek_calibrate(scaled, dt).log_fit.params;
    CHECK(g.theta == doctest::Approx(f.theta + std::log(k)).epsilon(1e-9));
    CHECK(g.alpha == doctest::Approx(f.alpha).epsilon(1e-9));
    CHECK(g.sigma == doctest::Approx(f.sigma).epsilon(1e-9));
  }

  std::vector<double> bad = x;
  bad[17] = 0.0;
  try {
    exp_vasicek_calibrate(bad, dt);
    FAIL("expected NonPositiveLevel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveLevel);
  }
}

TEST_CASE("exponential vasicek long-run median") {
  const VasicekParams p{4.97, 3.83, 1.41};
  const double horizon = 10.0 / p.alpha;
  const auto ps = exp_vasicek_simulate(p, 10.0, 10, 1000000, horizon / 10.0, RngStream(9, 0));
  auto terminal = ps.terminal();
  std::nth_element(terminal.begin(), terminal.begin() + 500000, terminal.end());
  CHECK(testkit::rel_diff(terminal[500000], std::exp(p.theta)) < 0.01);
}

TEST_CASE("cir transition density against the noncentral chi-squared law") {
  const std::vector<CirParams> grid = {kEmu, {0.5, 0.04, 0.1}, {3.0, 1.0, 1.5}, {1.0, 2.0, 0.3},
                                       {0.2, 0.5, 0.6}};
  for (const auto& p : grid) {
    for (double dt : {1.0 / 52.0, 0.25}) {
      for (double ratio : {0.5, 1.0, 1.7}) {
        const double x_prev = ratio * p.theta;
        const double sd = std::sqrt(cir_variance(p, x_prev, dt));
        for (double z : {-2.0, -0.5, 0.0, 1.0, 3.0}) {
          const double x = cir_mean(p, x_prev, dt) + z * sd;
          if (x <= 0.0) continue;
          CHECK(testkit::rel_diff(cir_transition_pdf(x, x_prev, p, dt), cir_reference_pdf(x, x_prev, p, dt)) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("cir transition density normalizes") {
  const std::vector<CirParams> grid = {kEmu, {0.5, 0.04, 0.1}, {3.0, 1.0, 1.5}, {1.0, 2.0, 0.3},
                                       {0.2, 0.5, 0.6}};
  for (const auto& p : grid) {
    for (double dt : {1.0 / 52.0, 1.0}) {
      const double x_prev = p.theta;
      auto f = [&](double x) { return x > 0.0 ? cir_transition_pdf(x, x_prev, p, dt) : 0.0; };
      const double m = cir_mean(p, x_prev, dt);
      const double sd = std::sqrt(cir_variance(p, x_prev, dt));
      const double lo = std::max(0.0, m - 12.0 * sd);
      const double total = testkit::integrate(f, lo, m) + testkit::integrate_upper(f, m, sd);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("cir transition approaches the stationary gamma law") {
  const CirParams p{1.0, 1.0, 0.5};
  const boost::math::gamma_distribution<double> stationary(2.0 * p.alpha * p.theta / (p.sigma * p.sigma),
                                                           p.sigma * p.sigma / (2.0 * p.alpha));
  double sup = 0.0;
  for (double x : testkit::linspace(0.01, 4.0, 200)) {
    sup = std::max(sup, std::fabs(cir_transition_pdf(x, 1.7, p, 20.0) - boost::math::pdf(stationary, x)));
  }
  CHECK(sup < 1e-3);
}

TEST_CASE("cir exact sampler follows the transition law") {
  struct Case {
    double dt;
    double x_prev;
  };
  for (const Case& c : {Case{1.0 / 52.0, kEmu.theta}, Case{0.25, 20.0}, Case{1.0, 90.0}}) {
    const auto ps = cir_simulate(kEmu, c.x_prev, 1, 20000, c.dt, RngStream(10, 0), Scheme::Exact);
    const auto draws = ps.terminal();
    const double d = testkit::ks_statistic(draws, [&](double x) { return cir_reference_cdf(x, c.x_prev, kEmu, c.dt); });
    CHECK(testkit::ks_pvalue(d, draws.size()) > 0.001);
  }
}

TEST_CASE("cir exact terminal moments") {
  const double x0 = 30.0;
  const auto ps = cir_simulate(kEmu, x0, 10, 1000000, 0.2, RngStream(11, 0), Scheme::Exact);
  const auto terminal = ps.terminal();
  const double mean_ref = kEmu.theta + (x0 - kEmu.theta) * std::exp(-kEmu.alpha * 2.0);
  CHECK(cir_mean(kEmu, x0, 2.0) == doctest::Approx(mean_ref).epsilon(1e-14));
  CHECK(testkit::within_se(testkit::mean_of(terminal), mean_ref));
  CHECK(testkit::within_se(testkit::variance_of(terminal), cir_variance(kEmu, x0, 2.0)));
}

TEST_CASE("cir euler scheme") {
  const CirParams quiet{2.0, 1.0, 1e-12};
  const double dt = 0.01;
  const auto ps = cir_simulate(quiet, 3.0, 50, 1, dt, RngStream(12, 0), Scheme::Euler);
  double x = 3.0;
  for (std::size_t i = 1; i <= 50; ++i) {
    x = quiet.alpha * quiet.theta * dt + (1.0 - quiet.alpha * dt) * x;
    CHECK(ps.at(0, i) == doctest::Approx(x).epsilon(1e-9));
  }
  CHECK_THROWS_AS(cir_simulate(quiet, 3.0, 5, 1, 0.6, RngStream(12, 0), Scheme::Euler), Error);

  const double fine = 0.05 / kEmu.alpha;
  const std::size_t steps = 40;
  const auto euler = cir_simulate(kEmu, 30.0, steps, 200000, fine, RngStream(13, 0), Scheme::Euler).terminal();
  const auto exact = cir_simulate(kEmu, 30.0, steps, 200000, fine, RngStream(14, 0), Scheme::Exact).terminal();
  const auto a = testkit::mean_of(euler);
  const auto b = testkit::mean_of(exact);
  CHECK(std::fabs(a.value - b.value) <= 3.0 * std::hypot(a.se, b.se));
}

TEST_CASE("cir initial guess formulas") {
  const double dt = 1.0 / 52.0;
  const auto ps = cir_simulate(kEmu, kEmu.theta, 799, 1, dt, RngStream(15, 0), Scheme::Exact);
  const std::vector<double> x(ps.values.begin(), ps.values.end());
  const auto g = cir_initial_guess(x, dt);
  const auto line = regress_on_lag(x);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  CHECK(g.alpha == doctest::Approx(-std::log(line.slope) / dt).epsilon(1e-10));
  CHECK(g.theta == doctest::Approx(mean).epsilon(1e-13));
  CHECK(g.sigma == doctest::Approx(std::sqrt(2.0 * g.alpha * var / mean)).epsilon(1e-10));

  // The guess (0.8662, 49.330, 4.3027) implies a level variance near 527.
  const double implied = 4.3027 * 4.3027 * 49.330 / (2.0 * 0.8662);
  CHECK(implied == doctest::Approx(527.2).epsilon(1e-3));
}

TEST_CASE("cir recovery at a rate-index fit") {
  const double dt = 1.0 / 52.0;
  for (std::size_t n : {std::size_t{500}, std::size_t{5000}}) {
    const auto ps = cir_simulate(kEmu, kEmu.theta, n - 1, 1, dt, RngStream(1, 0), Scheme::Exact);
    const auto fit = cir_calibrate(ps.path(0), dt);
    INFO("n=" << n);
    CHECK(fit.result.log_likelihood >= fit.result.initial_log_likelihood);
    CHECK(std::fabs(fit.result.params.theta / kEmu.theta - 1.0) < 0.1);
    CHECK(std::fabs(fit.result.params.sigma / kEmu.sigma - 1.0) < 0.1);
    CHECK(std::fabs(fit.result.params.alpha / kEmu.alpha - 1.0) < 0.5);
    CHECK(fit.feller_satisfied);
  }
}

TEST_CASE("cir calibration flags a feller violation") {
  const CirParams p{1.0, 0.05, 0.4};
  CHECK_FALSE(feller_satisfied(p));
  const auto ps = cir_simulate(p, 0.05, 1999, 1, 1.0 / 52.0, RngStream(16, 0), Scheme::Exact);
  const auto fit = cir_calibrate(ps.path(0), 1.0 / 52.0);
  CHECK_FALSE(fit.feller_satisfied);
  CHECK(fit.feller_satisfied == feller_satisfied(fit.result.params));

  std::vector<double> bad(ps.values.begin(), ps.values.end());
  bad[3] = -0.01;
  CHECK_THROWS_AS(cir_calibrate(bad, 1.0 / 52.0), Error);
  CHECK_THROWS_AS(cir_transition_pdf(-1.0, 1.0, p, 0.1), Error);
}
