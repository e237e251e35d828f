#include "stochcal/numeric.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "stochcal/errors.hpp"

namespace stochcal::numeric {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

constexpr double kXgk[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr double kWgk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478326, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// 10-point Gauss weights for the nodes kXgk[1], kXgk[3], ..., kXgk[9].
constexpr double kWg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment kronrod21(const ScalarFn& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[10];
  double gauss = 0.0;
  for (int j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[j] * sum;
    if (j % 2 == 1) gauss += kWg[j / 2] * sum;
  }
  Segment s{a, b, kronrod * half, std::fabs((kronrod - gauss) * half)};
  if (!std::isfinite(s.value)) s.error = kInf;
  return s;
}

}  // namespace

QuadResult integrate(const ScalarFn& f, double a, double b, const QuadOptions& opts,
                     std::span<const double> breakpoints) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    auto r = integrate(f, b, a, opts, breakpoints);
    r.value = -r.value;
    return r;
  }

  // Map infinite limits onto a finite t-interval.
  ScalarFn g;
  std::function<double(double)> to_t;
  double ta = a;
  double tb = b;
  if (std::isinf(a) && std::isinf(b)) {
    g = [&f](double t) {
      const double d = 1.0 - t * t;
      const double x = t / d;
      const double v = f(x) * (1.0 + t * t) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    to_t = [](double x) {
      return x == 0.0 ? 0.0 : (std::sqrt(1.0 + 4.0 * x * x) - 1.0) / (2.0 * x);
    };
    ta = -1.0;
    tb = 1.0;
  } else if (std::isinf(b)) {
    g = [&f, a](double t) {
      const double d = 1.0 - t;
      const double v = f(a + t / d) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    to_t = [a](double x) { return (x - a) / (1.0 + x - a); };
    ta = 0.0;
    tb = 1.0;
  } else if (std::isinf(a)) {
    g = [&f, b](double t) {
      const double d = 1.0 - t;
      const double v = f(b - t / d) / (d * d);
      return std::isfinite(v) ? v : 0.0;
    };
    to_t = [b](double x) { return (b - x) / (1.0 + b - x); };
    ta = 0.0;
    tb = 1.0;
  } else {
    g = f;
    to_t = [](double x) { return x; };
  }

  std::vector<double> cuts{ta, tb};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(to_t(p));
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Segment> heap;
  QuadResult result;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Segment s = kronrod21(g, cuts[i], cuts[i + 1]);
    result.evaluations += 21;
    total += s.value;
    total_err += s.error;
    heap.push(s);
  }

  while (total_err > std::max(opts.abs_tol, opts.rel_tol * std::fabs(total)) &&
         heap.size() < opts.max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    Segment left = kronrod21(g, worst.a, mid);
    Segment right = kronrod21(g, mid, worst.b);
    result.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed accumulated cancellation in the running totals.
  total = 0.0;
  total_err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    total_err += heap.top().error;
    heap.pop();
  }
  result.value = total;
  result.error = total_err;
  result.converged = std::isfinite(total) &&
                     total_err <= std::max(opts.abs_tol, opts.rel_tol * std::fabs(total));
  return result;
}

double integrate_or_throw(const ScalarFn& f, double a, double b, const QuadOptions& opts,
                          std::span<const double> breakpoints) {
  const auto r = integrate(f, a, b, opts, breakpoints);
  if (!r.converged) {
    fail(ErrorCode::QuadratureFailure, "numeric",
         "adaptive quadrature missed tolerance (estimated error " + std::to_string(r.error) + ")");
  }
  return r.value;
}

double find_root(const ScalarFn& f, double lo, double hi, double tol, int max_iter) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    fail(ErrorCode::DomainError, "numeric", "root is not bracketed");
  }
  double c = a;
  double fc = fa;
  double d = b - a;
  double e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::fabs(xm) <= tol1 || fb == 0.0) return b;
    if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
      const double s = fb / fa;
      double p = 0.0;
      double q = 0.0;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::fabs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::fabs(tol1 * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol1 ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

MinimizeResult minimize(const ObjectiveFn& f, std::vector<double> x0, std::vector<double> steps,
                        const MinimizeOptions& opts) {
  const std::size_t n = x0.size();
  MinimizeResult out;
  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  std::vector<double> best = x0;
  double best_value = eval(best);
  if (!std::isfinite(best_value)) {
    fail(ErrorCode::OptimizerFailed, "numeric", "objective is not finite at the initial point");
  }

  for (int round = 0; round <= opts.restarts; ++round) {
    std::vector<std::vector<double>> simplex(n + 1, best);
    std::vector<double> values(n + 1, best_value);
    for (std::size_t i = 0; i < n; ++i) {
      simplex[i + 1][i] += steps[i];
      values[i + 1] = eval(simplex[i + 1]);
    }
    std::vector<std::size_t> order(n + 1);
    bool round_converged = false;
    while (out.evaluations < opts.max_evaluations) {
      ++out.iterations;
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
      const std::size_t lo = order.front();
      const std::size_t hi = order.back();
      const std::size_t second = order[n - 1];

      double diameter = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
          diameter = std::max(diameter, std::fabs(simplex[i][k] - simplex[lo][k]));
        }
      }
      const double spread = std::fabs(values[hi] - values[lo]);
      if (spread <= opts.f_tol * (std::fabs(values[lo]) + 1e-12) && diameter <= opts.x_tol) {
        round_converged = true;
        break;
      }
      if (std::isfinite(values[lo]) && spread == 0.0 && diameter <= opts.x_tol * 1e3) {
        round_converged = true;
        break;
      }

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == hi) continue;
        for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / static_cast<double>(n);
      }
      auto along = [&](double t) {
        std::vector<double> p(n);
        for (std::size_t k = 0; k < n; ++k) p[k] = centroid[k] + t * (simplex[hi][k] - centroid[k]);
        return p;
      };

      auto reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < values[lo]) {
        auto expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          simplex[hi] = std::move(expanded);
          values[hi] = fe;
        } else {
          simplex[hi] = std::move(reflected);
          values[hi] = fr;
        }
        continue;
      }
      if (fr < values[second]) {
        simplex[hi] = std::move(reflected);
        values[hi] = fr;
        continue;
      }
      const bool outside = fr < values[hi];
      auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : values[hi])) {
        simplex[hi] = std::move(contracted);
        values[hi] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == lo) continue;
        for (std::size_t k = 0; k < n; ++k) {
          simplex[i][k] = simplex[lo][k] + 0.5 * (simplex[i][k] - simplex[lo][k]);
        }
        values[i] = eval(simplex[i]);
      }
    }

    std::size_t lo = 0;
    for (std::size_t i = 1; i <= n; ++i) {
      if (values[i] < values[lo]) lo = i;
    }
    const double improvement = best_value - values[lo];
    if (values[lo] < best_value) {
      best = simplex[lo];
      best_value = values[lo];
    }
    out.converged = round_converged;
    if (!round_converged) break;
    // A restart that finds nothing new confirms the optimum.
    if (round > 0 && improvement <= opts.f_tol * (std::fabs(best_value) + 1e-12)) break;
    // Shrink restart steps toward the local scale of the optimum.
    for (auto& s : steps) s *= 0.5;
  }

  out.x = std::move(best);
  out.value = best_value;
  return out;
}

std::vector<double> hessian(const ObjectiveFn& f, std::span<const double> x,
                            std::span<const double> steps) {
  const std::size_t k = x.size();
  std::vector<double> h(k * k, 0.0);
  std::vector<double> p(x.begin(), x.end());
  const double f0 = f(p);
  for (std::size_t i = 0; i < k; ++i) {
    const double hi = steps[i];
    p[i] = x[i] + hi;
    const double fp = f(p);
    p[i] = x[i] - hi;
    const double fm = f(p);
    p[i] = x[i];
    h[i * k + i] = (fp - 2.0 * f0 + fm) / (hi * hi);
    for (std::size_t j = i + 1; j < k; ++j) {
      const double hj = steps[j];
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          p[i] = x[i] + si * hi;
          p[j] = x[j] + sj * hj;
          acc += si * sj * f(p);
        }
      }
      p[i] = x[i];
      p[j] = x[j];
      h[i * k + j] = h[j * k + i] = acc / (4.0 * hi * hj);
    }
  }
  return h;
}

std::optional<std::vector<double>> inverse_diagonal_sqrt(std::span<const double> matrix,
                                                         std::size_t k) {
  Eigen::MatrixXd m(k, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) m(i, j) = matrix[i * k + j];
  }
  if (!m.allFinite()) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return std::nullopt;
  const Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(k, k));
  std::vector<double> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(inv(i, i) > 0.0)) return std::nullopt;
    out[i] = std::sqrt(inv(i, i));
  }
  return out;
}

double log_sum_exp(std::span<const double> v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace stochcal::numeric
