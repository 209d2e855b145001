#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rkreduce/distributions.hpp"
#include "rkreduce/quadrature.hpp"
#include "rkreduce/special.hpp"

namespace rkreduce {

struct Interval {
  double lo;
  double hi;
};

// A conditional signed density y -> S(y|x) together with its sign structure
// and positive/negative part masses. Immutable after construction.
struct SignedKernelSpec {
  std::function<double(double y, double x)> eval;
  // log of the positive part; -inf where eval <= 0.
  std::function<double(double y, double x)> log_pos;
  // intervals of y on which eval(.|x) >= 0
  std::function<std::vector<Interval>(double x)> positive_region;
  // closed-form positive/negative masses when available
  std::function<double(double x)> p_closed;
  std::function<double(double x)> q_closed;
  // y-window outside which |eval(.|x)| is negligible (for scanning/quadrature)
  std::function<Interval(double x)> scan_window;
  std::string label;
};

namespace detail {

inline std::function<double(double, double)> generic_log_pos(
    std::function<double(double, double)> eval) {
  return [eval = std::move(eval)](double y, double x) {
    const double v = eval(y, x);
    return v > 0.0 ? std::log(v) : -kInf;
  };
}

// Grid scan with bisection refinement of each sign change to 1e-10.
inline std::vector<Interval> sign_scan(
    const std::function<double(double, double)>& eval, double x, double lo,
    double hi, int grid = 4096) {
  double prev_y = lo;
  const double step = (hi - lo) / grid;
  std::vector<Interval> out;
  bool in_pos = eval(lo, x) >= 0.0;
  double open_lo = lo;
  for (int i = 1; i <= grid; ++i) {
    const double y = lo + i * step;
    const bool pos = eval(y, x) >= 0.0;
    if (pos != in_pos) {
      // refine the crossing
      double a = prev_y, b = y;
      for (int it = 0; it < 80 && b - a > 1e-10; ++it) {
        const double m = 0.5 * (a + b);
        if ((eval(m, x) >= 0.0) == in_pos)
          a = m;
        else
          b = m;
      }
      const double root = 0.5 * (a + b);
      if (in_pos)
        out.push_back({open_lo, root});
      else
        open_lo = root;
      in_pos = pos;
    }
    prev_y = y;
  }
  if (in_pos) out.push_back({open_lo, hi});
  return out;
}

// Expand [x-c, x+c] until |eval| at the boundary is negligible relative to
// the interior maximum.
inline Interval auto_window(const std::function<double(double, double)>& eval,
                            double x) {
  double c = 8.0;
  for (; c <= 65536.0; c *= 2.0) {
    double peak = 0.0;
    for (int i = 0; i <= 64; ++i) {
      const double y = x - c + 2.0 * c * i / 64.0;
      peak = std::max(peak, std::fabs(eval(y, x)));
    }
    const double edge =
        std::max(std::fabs(eval(x - c, x)), std::fabs(eval(x + c, x)));
    if (peak > 0.0 && edge <= 1e-16 * peak) break;
  }
  return {x - c, x + c};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Laplace(theta, b) source -> N(theta, sigma^2) target:
//   S*(y|x) = phi_sigma(y-x) (1 + b^2/sigma^2 - b^2 (y-x)^2 / sigma^4),
// nonnegative exactly on |y-x| <= Delta = sigma sqrt(sigma^2+b^2) / b.
// ---------------------------------------------------------------------------
inline SignedKernelSpec laplace_gaussian_kernel(double b, double sigma) {
  if (b <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("laplace_gaussian_kernel: b, sigma > 0 required");
  if (sigma < b)
    throw std::invalid_argument(
        "laplace_gaussian_kernel: requires sigma >= b; the M = 2 ratio bound "
        "only holds in that regime");
  const double b2s2 = b * b / (sigma * sigma);
  const double b2s4 = b2s2 / (sigma * sigma);
  const double delta = sigma * std::sqrt(sigma * sigma + b * b) / b;
  const double a = std::sqrt(sigma * sigma + b * b) / b;  // Delta / sigma
  const double q_val =
      2.0 * (b * std::sqrt(sigma * sigma + b * b) / (sigma * sigma) * norm_pdf(a) -
             norm_upper(a));
  const double log_sigma = std::log(sigma);

  SignedKernelSpec k;
  k.eval = [b2s2, b2s4, sigma](double y, double x) {
    const double t = y - x;
    return norm_pdf(t / sigma) / sigma * (1.0 + b2s2 - b2s4 * t * t);
  };
  k.log_pos = [b2s2, b2s4, sigma, log_sigma](double y, double x) {
    const double t = y - x;
    const double poly = 1.0 + b2s2 - b2s4 * t * t;
    if (poly <= 0.0) return -kInf;
    const double z = t / sigma;
    return -0.5 * z * z - kLogSqrt2Pi - log_sigma + std::log(poly);
  };
  k.positive_region = [delta](double x) {
    return std::vector<Interval>{{x - delta, x + delta}};
  };
  k.p_closed = [q_val](double) { return 1.0 + q_val; };
  k.q_closed = [q_val](double) { return q_val; };
  k.scan_window = [delta](double x) {
    return Interval{x - 2.0 * delta, x + 2.0 * delta};
  };
  k.label = "laplace_gaussian(b=" + std::to_string(b) +
            ",sigma=" + std::to_string(sigma) + ")";
  return k;
}

// Coordinatewise product of 1-D Laplace->Gaussian kernels over R^d.
// With p_j - q_j = 1 per factor, the positive/negative masses of the product
// are p = (prod_j (p_j + q_j) + 1) / 2 and q = p - 1.
struct ProductSignedKernel {
  std::vector<SignedKernelSpec> factors;
  std::string label;

  double eval(const std::vector<double>& y, const std::vector<double>& x) const {
    if (y.size() != factors.size() || x.size() != factors.size())
      throw std::invalid_argument("ProductSignedKernel: dimension mismatch");
    double v = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j) v *= factors[j].eval(y[j], x[j]);
    return v;
  }
  double p(const std::vector<double>& x) const {
    if (x.size() != factors.size())
      throw std::invalid_argument("ProductSignedKernel: dimension mismatch");
    double prod = 1.0;
    for (std::size_t j = 0; j < factors.size(); ++j)
      prod *= factors[j].p_closed(x[j]) + factors[j].q_closed(x[j]);
    return 0.5 * (prod + 1.0);
  }
  double q(const std::vector<double>& x) const { return p(x) - 1.0; }
};

inline ProductSignedKernel laplace_gaussian_product_kernel(
    const std::vector<double>& b, const std::vector<double>& sigma) {
  if (b.size() != sigma.size() || b.empty())
    throw std::invalid_argument(
        "laplace_gaussian_product_kernel: dimension mismatch");
  ProductSignedKernel k;
  for (std::size_t j = 0; j < b.size(); ++j)
    k.factors.push_back(laplace_gaussian_kernel(b[j], sigma[j]));
  k.label = "laplace_gaussian_product(d=" + std::to_string(b.size()) + ")";
  return k;
}

// ---------------------------------------------------------------------------
// Shifted-exponential source -> log-concave target:
//   S*(y|x) = (1/sigma) e^{-psi(z)} (1 - psi'(z)/sigma),  z = (y-x-1)/sigma,
// nonnegative exactly on y <= sigma*kappa(sigma) + x + 1. The masses are
// x-independent:
//   p = 1 - int_kappa^inf e^{-psi} + e^{-psi(kappa)}/sigma,  q = p - 1.
// ---------------------------------------------------------------------------
inline SignedKernelSpec exp_logconcave_kernel(const LogConcaveTarget& target) {
  const double sigma = target.sigma;
  const double kappa = logconcave_kappa(target);
  double tail = 0.0, edge = 0.0;
  if (std::isfinite(kappa)) {
    tail = integrate_or_throw(
        [&target](double z) { return std::exp(-target.psi(z)); }, kappa, kInf);
    edge = std::exp(-target.psi(kappa)) / sigma;
  }
  const double p_val = 1.0 - tail + edge;
  const double q_val = edge - tail;
  const double log_sigma = std::log(sigma);

  SignedKernelSpec k;
  k.eval = [target, sigma](double y, double x) {
    const double z = (y - x - 1.0) / sigma;
    return std::exp(-target.psi(z)) / sigma * (1.0 - target.psi_prime(z) / sigma);
  };
  k.log_pos = [target, sigma, log_sigma](double y, double x) {
    const double z = (y - x - 1.0) / sigma;
    const double factor = 1.0 - target.psi_prime(z) / sigma;
    if (factor <= 0.0) return -kInf;
    return -target.psi(z) - log_sigma + std::log(factor);
  };
  k.positive_region = [kappa, sigma](double x) {
    if (std::isinf(kappa)) return std::vector<Interval>{{-kInf, kInf}};
    return std::vector<Interval>{{-kInf, sigma * kappa + x + 1.0}};
  };
  k.p_closed = [p_val](double) { return p_val; };
  k.q_closed = [q_val](double) { return q_val; };
  k.scan_window = [sigma, kappa](double x) {
    const double r = std::isfinite(kappa) ? std::max(12.0, 2.0 * kappa) : 12.0;
    return Interval{x + 1.0 - r * sigma, x + 1.0 + r * sigma};
  };
  k.label = "exp_" + target.label + "(sigma=" + std::to_string(sigma) + ")";
  return k;
}

// ---------------------------------------------------------------------------
// Erlang(lambda, k) source -> general target with caller-supplied
// theta-derivative stack:
//   S*(y|x) = sum_{j=0}^k C(k,j) (-1)^j lambda^{-j} d^j/d theta^j v(y;theta)|_{theta=x}.
// Sign structure is found by scanning (no closed form in general).
// ---------------------------------------------------------------------------
using ThetaDerivStack = std::function<double(int j, double y, double theta)>;

inline SignedKernelSpec erlang_kernel(double lambda, int k,
                                      ThetaDerivStack target_derivs) {
  if (k < 1) throw std::invalid_argument("erlang_kernel: k >= 1 required");
  if (lambda <= 0.0) throw std::invalid_argument("erlang_kernel: lambda > 0 required");
  std::vector<double> coef(k + 1);
  double binom = 1.0;
  for (int j = 0; j <= k; ++j) {
    coef[j] = binom * std::pow(-1.0 / lambda, j);
    binom = binom * (k - j) / (j + 1);
  }
  SignedKernelSpec kk;
  kk.eval = [coef, k, target_derivs](double y, double x) {
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += coef[j] * target_derivs(j, y, x);
    return s;
  };
  kk.log_pos = detail::generic_log_pos(kk.eval);
  kk.scan_window = [eval = kk.eval](double x) {
    return detail::auto_window(eval, x);
  };
  kk.positive_region = [eval = kk.eval, win = kk.scan_window](double x) {
    const Interval w = win(x);
    return detail::sign_scan(eval, x, w.lo, w.hi);
  };
  kk.label = "erlang(lambda=" + std::to_string(lambda) + ",k=" + std::to_string(k) + ")";
  return kk;
}

// Derivative stack of the Gaussian location target N(theta, sigma^2) via the
// probabilists' Hermite recursion:
//   d^j/d theta^j phi_sigma(y - theta) = sigma^{-j} He_j((y-theta)/sigma) phi_sigma(y-theta).
inline ThetaDerivStack gaussian_target_derivs(double sigma) {
  if (sigma <= 0.0)
    throw std::invalid_argument("gaussian_target_derivs: sigma > 0 required");
  return [sigma](int j, double y, double theta) {
    const double z = (y - theta) / sigma;
    double h_prev = 1.0, h = z;
    if (j == 0) h = 1.0;
    for (int i = 1; i < j; ++i) {
      const double h_next = z * h - i * h_prev;
      h_prev = h;
      h = h_next;
    }
    return h * norm_pdf(z) / sigma * std::pow(sigma, -j);
  };
}

// ---------------------------------------------------------------------------
// Uniform location source on [theta - 1/2, theta + 1/2] -> target v(y;theta)
// with one allowed kink at theta0. The four-branch construction:
//   x <= theta0 - 1/2:        g^-(y)
//   theta0 - 1/2 < x <= 0:    g^+(y) - dv(y, x + 1/2)
//   0 < x < theta0 + 1/2:     dv(y, x - 1/2) + g^-(y)
//   x >= theta0 + 1/2:        g^+(y)
// dv is never evaluated at the kink (branch boundaries are half-open).
// ---------------------------------------------------------------------------
struct UniformKernelParts {
  double theta0 = 0.0;
  std::function<double(double y)> g_plus;
  std::function<double(double y)> g_minus;
  std::function<double(double y, double theta)> v;
  std::function<double(double y, double theta)> dv_dtheta;
  // y-window hint for sign scans; defaults to auto probing when unset
  double scan_halfwidth = 0.0;
};

inline SignedKernelSpec uniform_kernel(const UniformKernelParts& parts) {
  if (!(parts.theta0 >= -0.5 && parts.theta0 <= 0.5))
    throw std::invalid_argument("uniform_kernel: theta0 in [-1/2, 1/2] required");
  const double theta0 = parts.theta0;
  SignedKernelSpec k;
  k.eval = [parts, theta0](double y, double x) {
    if (x <= theta0 - 0.5) return parts.g_minus(y);
    if (x >= theta0 + 0.5) return parts.g_plus(y);
    if (x <= 0.0) return parts.g_plus(y) - parts.dv_dtheta(y, x + 0.5);
    return parts.dv_dtheta(y, x - 0.5) + parts.g_minus(y);
  };
  k.log_pos = detail::generic_log_pos(k.eval);
  if (parts.scan_halfwidth > 0.0) {
    k.scan_window = [hw = parts.scan_halfwidth](double) {
      return Interval{-hw, hw};
    };
  } else {
    k.scan_window = [eval = k.eval](double x) {
      return detail::auto_window(eval, x);
    };
  }
  k.positive_region = [eval = k.eval, win = k.scan_window](double x) {
    const Interval w = win(x);
    return detail::sign_scan(eval, x, w.lo, w.hi);
  };
  k.label = "uniform(theta0=" + std::to_string(theta0) + ")";
  return k;
}

// Parts for the Gaussian nonlinear-mean target v(y;theta) = phi_sigma(y - f(theta))
// with g^+ = g^- = v(.;1/2) + v(.;-1/2) - v(.;theta0).
inline UniformKernelParts gaussian_f_uniform_parts(
    std::function<double(double)> f, std::function<double(double)> f_prime,
    double theta0, double sigma) {
  if (sigma <= 0.0)
    throw std::invalid_argument("gaussian_f_uniform_parts: sigma > 0 required");
  UniformKernelParts parts;
  parts.theta0 = theta0;
  auto v = [f, sigma](double y, double theta) {
    return norm_pdf((y - f(theta)) / sigma) / sigma;
  };
  parts.v = v;
  parts.dv_dtheta = [f, f_prime, sigma, v](double y, double theta) {
    const double r = y - f(theta);
    return f_prime(theta) * r / (sigma * sigma) * v(y, theta);
  };
  parts.g_plus = [v, theta0](double y) {
    return v(y, 0.5) + v(y, -0.5) - v(y, theta0);
  };
  parts.g_minus = parts.g_plus;
  const double amax =
      std::max({std::fabs(f(0.5)), std::fabs(f(-0.5)), std::fabs(f(theta0))});
  parts.scan_halfwidth = amax + 14.0 * sigma;
  return parts;
}

// ---------------------------------------------------------------------------
// Mixture-of-experts -> phase retrieval specialization (f = |.|, theta0 = 0):
//   w <= -1/2 or w >= 1/2:  2 phi_s(z - 1/2) - phi_s(z)
//   -1/2 < w <= 0:          above - phi_s(z - w - 1/2) (z - w - 1/2)/sigma^2
//   0 < w < 1/2:            above - phi_s(z + w - 1/2) (z + w - 1/2)/sigma^2
// ---------------------------------------------------------------------------
inline SignedKernelSpec moe_phase_kernel(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("moe_phase_kernel: sigma > 0 required");
  SignedKernelSpec k;
  const auto phis = [sigma](double u) { return norm_pdf(u / sigma) / sigma; };
  k.eval = [phis, sigma](double z, double w) {
    const double head = 2.0 * phis(z - 0.5) - phis(z);
    if (w <= -0.5 || w >= 0.5) return head;
    const double u = (w <= 0.0) ? z - w - 0.5 : z + w - 0.5;
    return head - phis(u) * u / (sigma * sigma);
  };
  k.log_pos = detail::generic_log_pos(k.eval);
  k.scan_window = [sigma](double) {
    return Interval{-14.0 * sigma - 1.0, 14.0 * sigma + 1.0};
  };
  k.positive_region = [eval = k.eval, win = k.scan_window](double x) {
    const Interval w = win(x);
    return detail::sign_scan(eval, x, w.lo, w.hi);
  };
  k.label = "moe_phase(sigma=" + std::to_string(sigma) + ")";
  return k;
}

// ---------------------------------------------------------------------------
// Positive / negative part masses (Eq. for p and q). Closed forms are used
// when the kernel carries them; otherwise quadrature over the sign regions.
// ---------------------------------------------------------------------------
inline double kernel_p(const SignedKernelSpec& k, double x) {
  if (k.p_closed) return k.p_closed(x);
  const auto regions = k.positive_region(x);
  double p = 0.0;
  for (const Interval& r : regions) {
    if (!(r.lo < r.hi)) continue;
    p += integrate_or_throw([&k, x](double y) { return std::max(k.eval(y, x), 0.0); },
                            r.lo, r.hi, {}, 1e-12, 1e-10);
  }
  return p;
}

inline double kernel_q(const SignedKernelSpec& k, double x) {
  if (k.q_closed) return k.q_closed(x);
  const auto regions = k.positive_region(x);
  const Interval w = k.scan_window ? k.scan_window(x) : Interval{-kInf, kInf};
  // complement of the positive regions inside the window
  double q = 0.0;
  double cursor = w.lo;
  auto add = [&](double lo, double hi) {
    if (!(lo < hi)) return;
    q += integrate_or_throw([&k, x](double y) { return std::max(-k.eval(y, x), 0.0); },
                            lo, hi, {}, 1e-12, 1e-10);
  };
  for (const Interval& r : regions) {
    add(cursor, r.lo);
    cursor = std::max(cursor, r.hi);
  }
  add(cursor, w.hi);
  return q;
}

}  // namespace rkreduce
