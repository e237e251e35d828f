#include <cmath>
#include <functional>
#include <string>

#include "doctest.h"
#include "stochcal/errors.hpp"
#include "stochcal/gbm.hpp"
#include "stochcal/meanrev.hpp"
#include "stochcal/meanrev_jumps.hpp"
#include "stochcal/model_select.hpp"
#include "stochcal/rng.hpp"

using namespace stochcal;
using namespace stochcal::model_select;

namespace {

constexpr std::size_t kReplications = 100;
constexpr std::size_t kN = 1000;

TimeSeries first_path(const PathSet& ps) {
  const auto p = ps.path(0);
  return TimeSeries(std::vector<double>(p.begin(), p.end()), ps.dt);
}

std::size_t count_hits(const std::function<TimeSeries(const RngStream&)>& make,
                       const std::function<bool(const Report&)>& hit, std::uint64_t seed) {
  std::size_t hits = 0;
  for (std::size_t r = 0; r < kReplications; ++r) {
    const Report rep = model_select_report(make(RngStream(seed, r)));
    hits += hit(rep) ? 1 : 0;
  }
  return hits;
}

const meanrev_jumps::JumpVasicekParams kSpikes{8.0, 3.5, 2.0, 12.0, 1.5, 0.3, 0.0, 0.0, 0.0};

}  // namespace

TEST_CASE("family attributes") {
  CHECK(parameter_count(Family::Gbm) == 2);
  CHECK(parameter_count(Family::Jumps) == 5);
  CHECK(parameter_count(Family::Vg) == 4);
  CHECK(parameter_count(Family::Cir) == 3);
  CHECK(parameter_count(Family::JumpVasicek) == 6);
  CHECK(mean_reverting(Family::JumpVasicek));
  CHECK(fat_tailed(Family::JumpVasicek));
  CHECK_FALSE(mean_reverting(Family::Nig));
  CHECK_FALSE(fat_tailed(Family::Vasicek));
  CHECK(name(Family::ExpVasicek) == "exp-vasicek");
}

TEST_CASE("report structure") {
  const auto x = first_path(meanrev_jumps::simulate(kSpikes, 3.5, kN - 1, 1, kDailyDt, RngStream(5, 0)));
  const Report rep = model_select_report(x);
  CHECK(rep.n == kN);
  CHECK(rep.kurtosis_threshold == doctest::Approx(3.0 * std::sqrt(24.0 / (kN - 1.0))));
  CHECK(rep.mean_reversion);
  CHECK(rep.fat_tails);
  REQUIRE(rep.has_winner);
  CHECK(rep.ranked.size() == 10);
  for (std::size_t i = 1; i < rep.ranked.size(); ++i) {
    if (rep.ranked[i].fitted) CHECK(rep.ranked[i - 1].aic <= rep.ranked[i].aic);
  }
  for (const auto& c : rep.ranked) {
    if (c.fitted) {
      CHECK(c.aic == doctest::Approx(2.0 * parameter_count(c.family) - 2.0 * c.log_likelihood));
    }
  }
}

TEST_CASE("failed fits are reported, not thrown") {
  auto x = first_path(meanrev::vasicek_simulate({10.0, 0.0, 0.05}, 0.0, 599, 1, kWeeklyDt, RngStream(6, 0)));
  const Report rep = model_select_report(x);
  REQUIRE(rep.mean_reversion);
  std::size_t failures = 0;
  for (const auto& c : rep.ranked) {
    if (!c.fitted) {
      ++failures;
      CHECK(c.error.find("NonPositiveLevel") != std::string::npos);
    }
  }
  CHECK(failures >= 3);
  CHECK(rep.has_winner);
  CHECK(rep.ranked.front().fitted);

  const TimeSeries short_series(std::vector<double>(299, 1.0), kDailyDt);
  CHECK_THROWS_AS(model_select_report(short_series), Error);
}

TEST_CASE("gbm input selects the no-reversion normal cell") {
  const auto hits = count_hits(
      [](const RngStream& rng) { return first_path(gbm::simulate({0.08, 0.2}, 100.0, kN - 1, 1, kDailyDt, rng)); },
      [](const Report& r) { return r.has_winner && !mean_reverting(r.winner) && !fat_tailed(r.winner); }, 31);
  CHECK(hits >= 90);
}

TEST_CASE("vasicek input selects the mean-reversion row") {
  const auto hits = count_hits(
      [](const RngStream& rng) {
        return first_path(meanrev::vasicek_simulate({2.0, 0.05, 0.02}, 0.05, kN - 1, 1, kWeeklyDt, rng));
      },
      [](const Report& r) { return r.has_winner && mean_reverting(r.winner); }, 32);
  CHECK(hits >= 90);
}

TEST_CASE("jump vasicek input selects the fat-tailed mean-reversion cell") {
  const auto hits = count_hits(
      [](const RngStream& rng) {
        return first_path(meanrev_jumps::simulate(kSpikes, 3.5, kN - 1, 1, kDailyDt, rng));
      },
      [](const Report& r) { return r.has_winner && mean_reverting(r.winner) && fat_tailed(r.winner); }, 33);
  CHECK(hits >= 80);
}
