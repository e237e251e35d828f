#pragma once

#include <cstddef>
#include <span>

#include "stochcal/core.hpp"
#include "stochcal/meanrev.hpp"
#include "stochcal/rng.hpp"

namespace stochcal::meanrev_jumps {

/// dx = alpha (theta - x) dt + sigma dW + dJ_up - dJ_dn, with Poisson arrival
/// rates lambda_up, lambda_dn and Gaussian sizes N(mu_up, sigma_up^2),
/// N(mu_dn, sigma_dn^2). A down jump moves x by minus its size, so mu_dn > 0
/// means downward moves. lambda_dn = 0 gives the single-jump model.
struct JumpVasicekParams {
  double alpha = 0.0;
  double theta = 0.0;
  double sigma = 0.0;
  double lambda_up = 0.0;
  double mu_up = 0.0;
  double sigma_up = 0.0;
  double lambda_dn = 0.0;
  double mu_dn = 0.0;
  double sigma_dn = 0.0;
};

meanrev::VasicekParams diffusion_part(const JumpVasicekParams& p);

/// theta + (lambda_up mu_up - lambda_dn mu_dn) / alpha.
double long_run_mean(const JumpVasicekParams& p);

/// Exact conditional moments after time t from x0.
double conditional_mean(const JumpVasicekParams& p, double x0, double t);
double conditional_variance(const JumpVasicekParams& p, double t);

/// Exact: each jump arrives at a uniform time in the step and decays as
/// e^{-alpha (dt - tau)} until its end. EndOfInterval: the whole step's jump
/// sum is scaled by e^{-alpha dt}, the left-endpoint approximation of the
/// stochastic integral.
enum class JumpTiming { Exact, EndOfInterval };

/// Exact OU step plus Poisson jump counts. Path p uses rng.child(p) with the
/// diffusion on child(0) (matching meanrev::vasicek_simulate) and jumps on child(1).
/// Throws InvalidParam if (lambda_up + lambda_dn) dt >= 0.5.
PathSet simulate(const JumpVasicekParams& params, double x0, std::size_t n_steps,
                 std::size_t n_paths, double dt, const RngStream& rng,
                 JumpTiming timing = JumpTiming::Exact);

/// exp of a simulated path started at log(x0).
PathSet exp_simulate(const JumpVasicekParams& params, double x0, std::size_t n_steps,
                     std::size_t n_paths, double dt, const RngStream& rng,
                     JumpTiming timing = JumpTiming::Exact);

/// At-most-one-jump Gaussian mixture transition density:
///   lambda_up dt N(m + mu_up, v + sigma_up^2) + lambda_dn dt N(m - mu_dn, v + sigma_dn^2)
///   + (1 - (lambda_up + lambda_dn) dt) N(m, v),
/// with m, v the Vasicek conditional mean and variance. Throws
/// IntensityTooLarge when (lambda_up + lambda_dn) dt >= 1.
double transition_pdf(double x_next, double x_prev, const JumpVasicekParams& params, double dt);
double log_transition_pdf(double x_next, double x_prev, const JumpVasicekParams& params, double dt);

double log_likelihood(const JumpVasicekParams& params, std::span<const double> x, double dt);

/// exp{m u + v u^2/2 + lambda_up int_0^dt (M_up(u e^{-alpha (dt - z)}) - 1) dz
///      + lambda_dn int_0^dt (M_dn(-u e^{-alpha (dt - z)}) - 1) dz},
/// with the jump integrals by adaptive quadrature.
double transition_mgf(double u, double x_prev, const JumpVasicekParams& params, double dt);

/// MLE of the mixture likelihood, started from the OLS Vasicek fit with
/// jumps seeded from residuals beyond three residual deviations. The nested
/// model (jump-free, or the single-jump fit for double_jumps) is returned
/// unless the jump fit improves the likelihood significantly (LR test at 5%).
/// Needs n >= 200.
CalibrationResult<JumpVasicekParams> calibrate(std::span<const double> x, double dt,
                                               bool double_jumps);

}  // namespace stochcal::meanrev_jumps
