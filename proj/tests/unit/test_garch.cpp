#include <cmath>
#include <numbers>

#include "doctest.h"
#include "stochcal/errors.hpp"
#include "stochcal/garch.hpp"
#include "stochcal/rng.hpp"
#include "testkit.hpp"

using namespace stochcal;
using namespace stochcal::garch;

namespace {

constexpr double kDt = 1.0 / 252.0;

NgarchParams stationary(double alpha, double beta, double gamma, double vbar) {
  NgarchParams p{0.0, 0.0, alpha, beta, gamma, vbar};
  p.omega = vbar * (1.0 - persistence(p));
  return p;
}

std::vector<double> returns_of(const PathSet& ps, std::size_t path) {
  const auto s = ps.path(path);
  std::vector<double> r(s.size() - 1);
  for (std::size_t i = 1; i < s.size(); ++i) r[i - 1] = s[i] / s[i - 1] - 1.0;
  return r;
}

double gaussian_iid_ll(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  double m = 0.0;
  for (double v : x) m += v;
  m /= n;
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * s / n) + 1.0);
}

}  // namespace

TEST_CASE("zero shocks converge geometrically") {
  const NgarchParams p{0.0, 2e-6, 0.85, 0.05, 0.5, 4e-4};
  const double k = p.alpha + p.beta * p.gamma * p.gamma;
  const double limit = p.omega / (1.0 - k);
  double v = p.sigma0_sq;
  for (int i = 1; i <= 200; ++i) {
    const double next = next_variance(p, v, 0.0);
    CHECK(next == doctest::Approx(p.omega + k * v).epsilon(1e-14));
    CHECK(std::fabs(next - limit) <= k * std::fabs(v - limit) + 1e-18);
    v = next;
  }
  CHECK(v == doctest::Approx(limit).epsilon(1e-8));
}

TEST_CASE("bad news raises variance more than good news") {
  const NgarchParams p{0.0, 1e-6, 0.85, 0.05, 0.5, 1e-4};
  const double e = 0.02;
  CHECK(next_variance(p, 1e-4, -e) > next_variance(p, 1e-4, e));
}

TEST_CASE("unconditional variance of GARCH(1,1)") {
  const double vbar = 1e-4;
  const auto p = stationary(0.85, 0.05, 0.0, vbar);
  const auto sim = simulate(p, 1.0, 100, 10000, kDt, RngStream(1, 0));
  std::vector<double> per_path(sim.levels.n_paths);
  for (std::size_t k = 0; k < per_path.size(); ++k) {
    double s = 0.0;
    for (double r : returns_of(sim.levels, k)) s += r * r;
    per_path[k] = s / 100.0;
  }
  CHECK(testkit::within_se(testkit::mean_of(per_path), vbar));
  for (double v : sim.variances) REQUIRE(v > 0.0);
}

TEST_CASE("ngarch returns are fat tailed") {
  const auto p = stationary(0.85, 0.05, 0.5, 1e-4);
  const auto sim = simulate(p, 1.0, 1000000, 1, kDt, RngStream(2, 0));
  const auto r = returns_of(sim.levels, 0);
  CHECK(testkit::raw_kurtosis(r) - 3.0 > 0.0);
}

TEST_CASE("gamma zero matches a plain GARCH(1,1) recursion") {
  const auto p = stationary(0.8, 0.1, 0.0, 2e-4);
  const auto sim = simulate(p, 1.0, 500, 1, kDt, RngStream(3, 0));
  const auto r = returns_of(sim.levels, 0);
  double v = p.sigma0_sq;
  double ll = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(sim.variances[i] == doctest::Approx(v).epsilon(1e-12));
    const double e = r[i];
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * v) + e * e / v);
    v = p.omega + p.alpha * v + p.beta * e * e;
  }
  CHECK(log_likelihood(p, r, kDt) == doctest::Approx(ll).epsilon(1e-12));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(validate({0.0, -1e-6, 0.5, 0.1, 0.0, 1e-4}), Error);
  try {
    validate({0.0, 1e-6, 0.05, 0.85, 0.5, 1e-4});
    FAIL("expected StationarityViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StationarityViolated);
  }
}

TEST_CASE("calibration recovers persistence") {
  const auto p = stationary(0.85, 0.05, 0.5, 1e-4);
  const auto sim = simulate(p, 1.0, 100000, 1, kDt, RngStream(4, 0));
  const auto r = returns_of(sim.levels, 0);
  const auto fit = calibrate(r, kDt);
  CHECK(std::fabs(persistence(fit.params) - persistence(p)) < 0.05);
  CHECK(fit.log_likelihood >= gaussian_iid_ll(r) - 1e-6);
  CHECK(fit.log_likelihood >= fit.initial_log_likelihood);
}

TEST_CASE("calibration nests constant variance on gaussian data") {
  RngStream z(5, 0);
  std::vector<double> r(2000);
  for (auto& v : r) v = 0.0003 + 0.01 * z.normal();
  const auto fit = calibrate(r, kDt);
  CHECK(fit.log_likelihood >= gaussian_iid_ll(r) - 1e-6);
}

TEST_CASE("degenerate inputs") {
  try {
    calibrate(std::vector<double>(100, 0.001), kDt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSeries);
  }
  CHECK_THROWS_AS(calibrate(std::vector<double>(10, 0.001), kDt), Error);
}
