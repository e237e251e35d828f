#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace stochcal {

/// Deterministic, splittable random stream.
///
/// Engine: xoshiro256** (Blackman & Vigna). The 256-bit state is filled by a
/// SplitMix64 sequence started from a key derived from (seed, stream_id), so
/// the same pair always yields the same variates on every platform. Distinct
/// stream ids give decorrelated streams; `child(k)` derives a sub-stream
/// without touching the parent's state.
///
/// Uniforms are (k + 0.5) * 2^-53 for the top 53 bits k, hence strictly
/// inside (0, 1). Normals use the Marsaglia polar method with the spare
/// variate cached.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Independent sub-stream keyed by k; the parent is not advanced.
  RngStream child(std::uint64_t k) const;

  std::uint64_t next_u64();
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Gamma(shape, scale) by Marsaglia-Tsang squeeze-and-reject; shapes below
/// one use G(shape) = G(shape + 1) * U^(1/shape), assembled in log space.
double sample_gamma(RngStream& rng, double shape, double scale);

/// Poisson by sequential multiplication for small means, PTRS otherwise.
std::uint64_t sample_poisson(RngStream& rng, double mean);

/// Inverse Gaussian IG(mu, lambda) with mean mu and variance mu^3/lambda.
///
/// Michael-Schucany-Haas transform: draw y = Z^2 (chi-squared, one degree of
/// freedom), take the smaller root
///   x = mu - 2 mu^2 y / (sqrt(4 mu lambda y + mu^2 y^2) + mu y),
/// then return x with probability mu / (mu + x) and mu^2 / x otherwise.
double sample_inverse_gaussian(RngStream& rng, double mu, double lambda);

/// Noncentral chi-squared as a Poisson(nc/2) mixture of central chi-squares.
double sample_noncentral_chi2(RngStream& rng, double dof, double noncentrality);

std::vector<double> standard_normal(RngStream& rng, std::size_t n);
std::vector<double> gamma_variate(RngStream& rng, double shape, double scale, std::size_t n);
std::vector<double> inverse_gaussian_variate(RngStream& rng, double mu, double lambda,
                                             std::size_t n);

}  // namespace stochcal
