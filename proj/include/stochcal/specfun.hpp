#pragma once

namespace stochcal::specfun {

/// log Gamma(x) for x > 0; throws DomainError otherwise.
double ln_gamma(double x);

/// Modified Bessel function of the second kind K_eta(x), x > 0. Negative
/// orders use K_{-eta} = K_eta.
///
/// Orders are reduced to |mu| <= 1/2 and raised by forward recurrence. The
/// base pair K_mu, K_{mu+1} comes from Temme's series for x < 2 and from
/// Steed's continued fraction above that crossover.
double bessel_k(double eta, double x);
/// e^x K_eta(x).
double bessel_k_scaled(double eta, double x);
/// log K_eta(x), finite even where K_eta(x) itself overflows or underflows.
double log_bessel_k(double eta, double x);

/// Modified Bessel function of the first kind I_q(x) for x >= 0, q > -1.
double bessel_i(double q, double x);
/// e^{-x} I_q(x).
double bessel_i_scaled(double q, double x);
/// log I_q(x) for x > 0.
double log_bessel_i(double q, double x);

/// Density of the noncentral chi-squared law with `dof` degrees of freedom.
double noncentral_chi2_pdf(double x, double dof, double noncentrality);
double log_noncentral_chi2_pdf(double x, double dof, double noncentrality);

double normal_pdf(double x);
double normal_cdf(double x);
/// Wichura's AS241 rational approximation, accurate to about 1e-16.
double normal_quantile(double p);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);
double chi2_cdf(double x, double dof);
double chi2_quantile(double p, double dof);

}  // namespace stochcal::specfun
