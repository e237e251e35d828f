#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace stochcal::numeric {

using ScalarFn = std::function<double(double)>;

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  std::size_t max_intervals = 4000;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b]. Infinite
/// limits are allowed and handled by the map x = a + t / (1 - t).
/// Interior `breakpoints` seed the initial partition (kinks, cusps, peaks).
QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts = {},
                     std::span<const double> breakpoints = {});

/// As `integrate`, but throws QuadratureFailure when the tolerance is missed.
double integrate_or_throw(const ScalarFn& f, double a, double b, const QuadOptions& opts = {},
                          std::span<const double> breakpoints = {});

/// Brent's method on a bracketing interval; throws DomainError otherwise.
double find_root(const ScalarFn& f, double lo, double hi, double tol = 1e-13,
                 int max_iter = 300);

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct MinimizeOptions {
  std::size_t max_evaluations = 20000;
  double f_tol = 1e-10;   // relative spread of simplex values
  double x_tol = 1e-8;    // simplex diameter
  int restarts = 2;       // re-seed the simplex at the best vertex
};

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Derivative-free Nelder-Mead minimization. The initial simplex is `x0` plus
/// one vertex per coordinate offset by `steps[i]`. Non-finite objective
/// values are treated as +infinity, so constraints may be imposed by
/// returning NaN or infinity.
MinimizeResult minimize(const ObjectiveFn& f, std::vector<double> x0, std::vector<double> steps,
                        const MinimizeOptions& opts = {});

/// Central-difference Hessian of f at x.
std::vector<double> hessian(const ObjectiveFn& f, std::span<const double> x,
                            std::span<const double> steps);

/// Square roots of the diagonal of the inverse of a symmetric positive
/// definite matrix (row-major, k x k); nullopt if not positive definite.
std::optional<std::vector<double>> inverse_diagonal_sqrt(std::span<const double> matrix,
                                                         std::size_t k);

/// Numerically stable log(sum(exp(v))).
double log_sum_exp(std::span<const double> v);

}  // namespace stochcal::numeric
