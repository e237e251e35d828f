#include <cmath>
#include <numbers>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>

#include "doctest.h"
#include "stochcal/errors.hpp"
#include "stochcal/rng.hpp"
#include "stochcal/subordinated.hpp"
#include "testkit.hpp"

using namespace stochcal;
using namespace stochcal::subordinated;

namespace {

// Normal variance-mean mixture over the gamma clock.
double vg_mixture(double x, const VgParams& p, double dt) {
  const boost::math::gamma_distribution<double> clock(dt / p.nu, p.nu);
  auto f = [&](double g) {
    if (g <= 0.0) return 0.0;
    const double m = p.mu_bar * dt + p.theta_bar * g;
    const double v = p.sigma_bar * p.sigma_bar * g;
    const double d = x - m;
    return std::exp(-0.5 * d * d / v) / std::sqrt(2.0 * std::numbers::pi * v) *
           boost::math::pdf(clock, g);
  };
  return testkit::integrate_upper(f, 0.0, dt);
}

double gaussian_ll(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * s / n) + 1.0);
}

std::vector<double> gaussian_sample(std::size_t n, double sd, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> out(n);
  for (auto& v : out) v = sd * rng.normal();
  return out;
}

std::vector<double> heavy_sample(std::size_t n, std::uint64_t seed) {
  return vg_sample_increments({0.0, 0.0, 0.01, 1.0}, n, 1.0, RngStream(seed, 0)).increments;
}

}  // namespace

TEST_CASE("vg density is symmetric without skew") {
  const VgParams p{0.3, 0.0, 0.9, 0.4};
  for (double d : {0.01, 0.2, 1.0, 3.0}) {
    CHECK(vg_density(0.3 + d, p, 1.0) == doctest::Approx(vg_density(0.3 - d, p, 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("vg density matches the gamma mixture integral") {
  const VgParams p{0.0, 0.6, 0.9, 0.4};
  const double sd = std::sqrt(p.nu * p.theta_bar * p.theta_bar + p.sigma_bar * p.sigma_bar);
  double worst = 0.0;
  for (double x : testkit::linspace(0.6 - 6.0 * sd, 0.6 + 6.0 * sd, 50)) {
    worst = std::max(worst, testkit::rel_diff(vg_density(x, p, 1.0), vg_mixture(x, p, 1.0)));
  }
  CHECK(worst < 1e-6);

  const double dt = 2.0;
  for (double x : {-2.0, 0.5, 1.7, 4.0}) {
    CHECK(testkit::rel_diff(vg_density(x, p, dt), vg_mixture(x, p, dt)) < 1e-6);
  }
}

TEST_CASE("vg density at dt = nu is an asymmetric Laplace law") {
  const VgParams p{0.1, -0.3, 0.5, 0.25};
  const double dt = p.nu;
  const double s2 = p.sigma_bar * p.sigma_bar;
  const double c = std::sqrt(2.0 * s2 / p.nu + p.theta_bar * p.theta_bar);
  for (double x : {-1.5, -0.2, 0.01, 0.3, 2.0}) {
    const double d = x - p.mu_bar * dt;
    const double ref = std::exp((p.theta_bar * d - c * std::fabs(d)) / s2) / (p.nu * c);
    CHECK(testkit::rel_diff(vg_density(x, p, dt), ref) < 1e-10);
  }
}

TEST_CASE("vg density normalizes and stays finite at the centre") {
  for (const VgParams& p : {VgParams{0.0, 0.6, 0.9, 0.4}, VgParams{0.1, -0.2, 0.3, 2.0},
                            VgParams{0.0, 0.0, 0.03, 6.0}}) {
    const double total = testkit::integrate_line([&](double x) { return vg_density(x, p, 1.0); },
                                                 p.mu_bar, p.sigma_bar);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
    const double centre = vg_density(p.mu_bar, p, 1.0);
    CHECK(std::isfinite(centre));
    CHECK(centre > 0.0);
    CHECK(vg_density(1e200, p, 1.0) == 0.0);
    CHECK(vg_log_density(-std::numeric_limits<double>::infinity(), p, 1.0) < 0.0);
  }
  CHECK_THROWS_AS(vg_density(0.0, {0.0, 0.0, 0.2, -1.0}, 1.0), Error);
}

TEST_CASE("vg moments") {
  const VgParams sym{0.2, 0.0, 0.5, 0.3};
  const auto m = vg_moments(sym, 0.5);
  CHECK(m.skewness == 0.0);
  CHECK(m.kurtosis == doctest::Approx(3.0 * (1.0 + 0.3 / 0.5)).epsilon(1e-14));
  const VgParams p{-0.1, 0.7, 0.4, 0.2};
  CHECK(vg_moments(p, 2.0).mean == doctest::Approx((p.mu_bar + p.theta_bar) * 2.0).epsilon(1e-14));

  const VgParams base{0.0, 1.0, 1.4, 0.4};
  const auto draws = vg_sample_increments(base, 1000000, 1.0, RngStream(5, 0));
  const auto var = testkit::variance_of(draws.increments);
  CHECK(testkit::within_se(var, (0.4 + 1.96) * 1.0));
  CHECK(vg_moments(base, 1.0).variance == doctest::Approx(0.4 + 1.96).epsilon(1e-14));
}

TEST_CASE("vg clock and degenerate subordinator") {
  const double dt = 1.0 / 52.0;
  const auto draws = vg_sample_increments({0.0, 0.1, 0.2, 0.5}, 200000, dt, RngStream(8, 1));
  CHECK(testkit::within_se(testkit::mean_of(draws.clock), dt));

  const VgParams p{0.05, 0.02, 0.2, 1e-8};
  const auto flat = vg_sample_increments(p, 20000, dt, RngStream(8, 2));
  const boost::math::normal_distribution<double> ref((p.mu_bar + p.theta_bar) * dt,
                                                     p.sigma_bar * std::sqrt(dt));
  const double d = testkit::ks_statistic(flat.increments, [&](double x) { return boost::math::cdf(ref, x); });
  CHECK(testkit::ks_pvalue(d, flat.increments.size()) > 0.001);
}

TEST_CASE("vg kurtosis of simulated increments") {
  const VgParams p{0.0, 0.0, 0.03, 6.0};
  const auto draws = vg_sample_increments(p, 1000000, 1.0, RngStream(9, 0));
  CHECK(testkit::rel_diff(testkit::raw_kurtosis(draws.increments), 3.0 * (1.0 + 6.0)) < 0.1);
}

TEST_CASE("vg increments follow the model cdf") {
  const VgParams p{0.05, -0.3, 0.4, 0.3};
  const auto draws = vg_sample_increments(p, 3000, 0.5, RngStream(10, 0));
  const double d = testkit::ks_statistic(draws.increments, [&](double x) { return vg_cdf(x, p, 0.5); });
  CHECK(testkit::ks_pvalue(d, draws.increments.size()) > 0.001);
}

TEST_CASE("vg paths cumulate increments") {
  const VgParams p{0.05, -0.1, 0.2, 0.3};
  const auto ps = vg_simulate(p, 50.0, 20, 3, 1.0 / 252.0, RngStream(4, 4));
  CHECK(ps.n_paths == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(ps.at(k, 0) == 50.0);
    for (std::size_t i = 1; i <= 20; ++i) CHECK(ps.at(k, i) > 0.0);
  }
  CHECK_THROWS_AS(vg_simulate(p, 50.0, 5, 1, 0.0, RngStream(4, 4)), Error);
}

TEST_CASE("vg initial guess") {
  const LogReturns gauss{gaussian_sample(5000, 0.01, 21), 1.0};
  auto symmetric = gauss.values;
  for (std::size_t i = 0; i < 2500; ++i) symmetric[2500 + i] = -symmetric[i];
  const auto g = vg_initial_guess({symmetric, 1.0});
  CHECK(std::fabs(g.theta_bar) < 1e-12);
  double mean = 0.0;
  for (double v : symmetric) mean += v;
  CHECK(g.mu_bar == doctest::Approx(mean / 5000.0).epsilon(1e-12));

  // Kurtosis below 3 pins nu at the floor.
  std::vector<double> uniform(4000);
  RngStream rng(22, 0);
  for (auto& v : uniform) v = rng.uniform() - 0.5;
  const auto gu = vg_initial_guess({uniform, 0.5});
  CHECK(gu.nu == doctest::Approx(1e-4 * 0.5).epsilon(1e-12));
  CHECK(gu.theta_bar == 0.0);

  const VgParams truth{0.0, 0.2, 0.3, 0.5};
  const auto draws = vg_sample_increments(truth, 100000, 1.0, RngStream(23, 0));
  const auto gv = vg_initial_guess({draws.increments, 1.0});
  CHECK(std::fabs(gv.nu / truth.nu - 1.0) < 0.5);
  CHECK(std::fabs(gv.sigma_bar / truth.sigma_bar - 1.0) < 0.5);
}

TEST_CASE("vg calibration recovers a daily fx-like fit") {
  const VgParams truth{-0.0001, -0.0001, 0.0061, 0.4};
  const auto draws = vg_sample_increments(truth, 2500, 1.0, RngStream(2024, 7));
  const LogReturns x{draws.increments, 1.0};
  const auto fit = vg_calibrate(x);
  CHECK(fit.log_likelihood >= fit.initial_log_likelihood);
  CHECK(std::fabs(fit.params.nu / truth.nu - 1.0) < 0.5);
  CHECK(std::fabs(fit.params.sigma_bar / truth.sigma_bar - 1.0) < 0.1);
  CHECK(fit.log_likelihood >= gaussian_ll(x.values) - 1e-6);
}

TEST_CASE("vg calibration nests the gaussian") {
  const LogReturns heavy{heavy_sample(3000, 31), 1.0};
  CHECK(vg_calibrate(heavy).log_likelihood >= gaussian_ll(heavy.values) - 1e-6);

  const LogReturns gauss{gaussian_sample(20000, 0.01, 32), 1.0};
  const auto fit = vg_calibrate(gauss);
  CHECK(fit.params.nu < 0.05);
  CHECK(fit.log_likelihood >= gaussian_ll(gauss.values) - 1e-6);
  CHECK_THROWS_AS(vg_calibrate({gaussian_sample(50, 0.01, 33), 1.0}), Error);
}

TEST_CASE("vg percentiles") {
  const std::vector<double> probs = {0.01, 0.1, 0.5, 0.9, 0.99};
  const std::vector<double> horizons = {0.5, 2.0};
  const VgParams sym{0.4, 0.0, 0.3, 0.2};
  const auto q = vg_percentiles(sym, horizons, probs);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const double centre = sym.mu_bar * horizons[h];
    CHECK(q[h][2] == doctest::Approx(centre).epsilon(1e-8));
    CHECK(q[h][0] - centre == doctest::Approx(centre - q[h][4]).epsilon(1e-7));
    CHECK(q[h][1] - centre == doctest::Approx(centre - q[h][3]).epsilon(1e-7));
  }
  const std::vector<double> bad = {0.0};
  CHECK_THROWS_AS(vg_percentiles(sym, horizons, bad), Error);
}

TEST_CASE("vg percentiles agree with simulated quantiles") {
  const VgParams base{0.0, 1.0, 1.4, 0.4};
  // Quantiles that stay clear of zero, where a relative tolerance is meaningful.
  const std::vector<double> probs = {0.5, 0.75, 0.9, 0.95, 0.99};
  std::vector<double> horizons;
  for (int t = 1; t <= 10; ++t) horizons.push_back(t);
  const auto q = vg_percentiles(base, horizons, probs);
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    auto draws = vg_sample_increments(base, 1000000, horizons[h], RngStream(77, h)).increments;
    std::sort(draws.begin(), draws.end());
    for (std::size_t j = 0; j < probs.size(); ++j) {
      const double emp = draws[static_cast<std::size_t>(probs[j] * 1e6)];
      INFO("t=" << horizons[h] << " p=" << probs[j]);
      CHECK(testkit::rel_diff(emp, q[h][j]) < 0.01);
    }
  }
}

TEST_CASE("nig density shape") {
  const NigParams sym{4.0, 0.0, 0.5, 0.2};
  for (double d : {0.05, 0.5, 2.0}) {
    CHECK(nig_density(0.1 + d, sym, 0.5) == doctest::Approx(nig_density(0.1 - d, sym, 0.5)).epsilon(1e-13));
  }
  const NigParams p{5.0, -1.0, 0.8, 0.1};
  auto f = [&](double x) { return nig_density(x, p, 1.0); };
  CHECK(testkit::integrate_line(f, 0.1, 0.5) == doctest::Approx(1.0).epsilon(1e-7));
  const double gamma0 = std::sqrt(24.0);
  const double mean = testkit::integrate_line([&](double x) { return x * f(x); }, 0.1, 0.5);
  CHECK(std::fabs(mean - (0.1 + 0.8 * -1.0 / gamma0)) < 1e-6);
  CHECK(nig_density(3.0, p, 1.0) > 0.0);
  CHECK_THROWS_AS(nig_density(0.0, {1.0, 2.0, 1.0, 0.0}, 1.0), Error);
  CHECK_THROWS_AS(nig_density(0.0, {1.0, 0.0, 0.0, 0.0}, 1.0), Error);
}

TEST_CASE("nig density normalizes over a parameter grid") {
  for (double alpha : {1.0, 10.0}) {
    for (double beta_ratio : {-0.7, 0.0, 0.5}) {
      for (double dt : {0.1, 1.0}) {
        const NigParams p{alpha, beta_ratio * alpha, 0.6, -0.2};
        const double total = testkit::integrate_line([&](double x) { return nig_density(x, p, dt); },
                                                     p.mu * dt, 0.6 * dt / alpha + 0.01);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-7));
      }
    }
  }
}

TEST_CASE("nig moments") {
  const auto s = nig_moments({6.0, 0.0, 0.7, 0.0}, 1.0);
  CHECK(s.skewness == 0.0);
  CHECK(s.kurtosis == doctest::Approx(3.0 + 3.0 / (0.7 * 6.0)).epsilon(1e-14));

  const NigParams p{8.0, -3.0, 1.0, 0.05};
  const double dt = 0.5;
  const auto m = nig_moments(p, dt);
  const auto draws = nig_sample_increments(p, 1000000, dt, RngStream(41, 0));
  CHECK(testkit::within_se(testkit::variance_of(draws), m.variance));
  CHECK(testkit::within_se(testkit::mean_of(draws), m.mean));

  // Variance delta / alpha held fixed while alpha grows.
  const auto limit = nig_moments({1e3, 0.0, 10.0, 0.0}, 1.0);
  CHECK(limit.kurtosis - 3.0 < 1e-3);
}

TEST_CASE("nig moment match inverts exact moments") {
  const NigParams p{8.0, -3.0, 1.0, 0.05};
  for (double dt : {1.0, 0.25}) {
    const auto back = nig_moment_match(nig_moments(p, dt), dt);
    CHECK(back.alpha == doctest::Approx(p.alpha).epsilon(1e-8));
    CHECK(back.beta == doctest::Approx(p.beta).epsilon(1e-8));
    CHECK(back.delta == doctest::Approx(p.delta).epsilon(1e-8));
    CHECK(back.mu == doctest::Approx(p.mu).epsilon(1e-8));
  }
}

TEST_CASE("nig increments follow the model cdf") {
  const NigParams p{3.0, 1.0, 0.4, 0.0};
  const auto draws = nig_sample_increments(p, 3000, 1.0, RngStream(42, 0));
  const double d = testkit::ks_statistic(draws, [&](double x) { return nig_cdf(x, p, 1.0); });
  CHECK(testkit::ks_pvalue(d, draws.size()) > 0.001);

  const auto ps = nig_simulate(p, 10.0, 5, 2, 1.0 / 252.0, RngStream(42, 1));
  CHECK(ps.at(1, 0) == 10.0);
  CHECK(ps.at(1, 5) > 0.0);
}

TEST_CASE("nig calibration recovers parameters") {
  const NigParams truth{8.0, -3.0, 1.0, 0.0};
  const LogReturns x{nig_sample_increments(truth, 50000, 1.0, RngStream(43, 0)), 1.0};
  const auto fit = nig_calibrate(x);
  CHECK(fit.log_likelihood >= fit.initial_log_likelihood);
  CHECK(std::fabs(fit.params.delta / truth.delta - 1.0) < 0.15);
  CHECK(std::fabs(fit.params.beta / fit.params.alpha - truth.beta / truth.alpha) < 0.1);
  CHECK(fit.log_likelihood >= gaussian_ll(x.values) - 1e-6);
}

TEST_CASE("nig calibration nests the gaussian") {
  const LogReturns heavy{heavy_sample(3000, 44), 1.0};
  CHECK(nig_calibrate(heavy).log_likelihood >= gaussian_ll(heavy.values) - 1e-6);
  const LogReturns gauss{gaussian_sample(3000, 0.01, 45), 1.0};
  CHECK(nig_calibrate(gauss).log_likelihood >= gaussian_ll(gauss.values) - 1e-6);
}
