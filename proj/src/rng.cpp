#include "stochcal/rng.hpp"

#include <cmath>
#include <string>

#include "stochcal/errors.hpp"

namespace stochcal {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix64(std::uint64_t x) {
  std::uint64_t s = x;
  return splitmix64(s);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorCode::InvalidParam, "core", std::string(name) + " must be positive and finite");
  }
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t key = mix64(seed) ^ mix64(stream_id ^ 0xD1B54A32D192ED03ULL);
  for (auto& word : state_) word = splitmix64(key);
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = kGolden;
}

RngStream RngStream::child(std::uint64_t k) const {
  return RngStream(seed_, mix64(stream_id_ + kGolden) ^ mix64(k ^ 0xA0761D6478BD642FULL));
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

double sample_gamma(RngStream& rng, double shape, double scale) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0, 1.0);
    const double log_u = std::log(rng.uniform());
    return scale * std::exp(std::log(g) + log_u / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return scale * d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

std::uint64_t sample_poisson(RngStream& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    fail(ErrorCode::InvalidParam, "core", "poisson mean must be finite and nonnegative");
  }
  if (mean == 0.0) return 0;
  if (mean < 12.0) {
    const double limit = std::exp(-mean);
    double p = 1.0;
    std::uint64_t k = 0;
    for (;;) {
      p *= rng.uniform();
      if (p <= limit) return k;
      ++k;
    }
  }
  // Hormann's transformed rejection with squeeze (PTRS).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform() - 0.5;
    const double v = rng.uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

double sample_inverse_gaussian(RngStream& rng, double mu, double lambda) {
  require_positive(mu, "inverse gaussian mu");
  require_positive(lambda, "inverse gaussian lambda");
  const double z = rng.normal();
  const double y = z * z;
  const double muy = mu * y;
  const double x = mu - 2.0 * mu * muy / (std::sqrt(4.0 * mu * lambda * y + muy * muy) + muy);
  const double u = rng.uniform();
  if (u <= mu / (mu + x)) return x;
  return mu * mu / x;
}

double sample_noncentral_chi2(RngStream& rng, double dof, double noncentrality) {
  require_positive(dof, "chi-squared degrees of freedom");
  if (!(noncentrality >= 0.0)) {
    fail(ErrorCode::InvalidParam, "core", "noncentrality must be nonnegative");
  }
  const auto n = sample_poisson(rng, 0.5 * noncentrality);
  return 2.0 * sample_gamma(rng, 0.5 * dof + static_cast<double>(n), 1.0);
}

std::vector<double> standard_normal(RngStream& rng, std::size_t n) {
  std::vector<double> out(n);
  for (auto& z : out) z = rng.normal();
  return out;
}

std::vector<double> gamma_variate(RngStream& rng, double shape, double scale, std::size_t n) {
  require_positive(shape, "gamma shape");
  require_positive(scale, "gamma scale");
  std::vector<double> out(n);
  for (auto& g : out) g = sample_gamma(rng, shape, scale);
  return out;
}

std::vector<double> inverse_gaussian_variate(RngStream& rng, double mu, double lambda,
                                             std::size_t n) {
  require_positive(mu, "inverse gaussian mu");
  require_positive(lambda, "inverse gaussian lambda");
  std::vector<double> out(n);
  for (auto& x : out) x = sample_inverse_gaussian(rng, mu, lambda);
  return out;
}

}  // namespace stochcal
