#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "rkreduce/quadrature.hpp"
#include "rkreduce/rng.hpp"
#include "rkreduce/special.hpp"

namespace rkreduce {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// A 1-D probability density with a sampler and declared support. Evaluation
// functions are pure; samplers take an explicit RNG stream.
struct ScalarDensity {
  std::function<double(double)> pdf;
  std::function<double(double)> log_pdf;
  std::function<double(SplitMix64&)> sampler;
  double support_lo = -kInf;
  double support_hi = kInf;
  double mean_hint = std::numeric_limits<double>::quiet_NaN();
  std::string label;
};

// ---------------------------------------------------------------------------
// Location families used as sources and targets.
// ---------------------------------------------------------------------------

inline ScalarDensity laplace_density(double mean, double scale) {
  if (scale <= 0.0) throw std::invalid_argument("laplace_density: scale > 0 required");
  ScalarDensity d;
  d.pdf = [mean, scale](double x) {
    return std::exp(-std::fabs(x - mean) / scale) / (2.0 * scale);
  };
  d.log_pdf = [mean, scale](double x) {
    return -std::fabs(x - mean) / scale - std::log(2.0 * scale);
  };
  d.sampler = [mean, scale](SplitMix64& rng) {
    return mean + scale * sample_laplace(rng);
  };
  d.mean_hint = mean;
  d.label = "Lap(" + std::to_string(mean) + "," + std::to_string(scale) + ")";
  return d;
}

inline ScalarDensity gaussian_density(double mean, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_density: sigma > 0 required");
  ScalarDensity d;
  d.pdf = [mean, sigma](double x) {
    const double z = (x - mean) / sigma;
    return norm_pdf(z) / sigma;
  };
  d.log_pdf = [mean, sigma](double x) {
    const double z = (x - mean) / sigma;
    return -0.5 * z * z - kLogSqrt2Pi - std::log(sigma);
  };
  d.sampler = [mean, sigma](SplitMix64& rng) {
    return mean + sigma * sample_normal(rng);
  };
  d.mean_hint = mean;
  d.label = "N(" + std::to_string(mean) + "," + std::to_string(sigma * sigma) + ")";
  return d;
}

// Exp(1) shifted to have mean `mean` and unit variance; support [mean-1, inf).
inline ScalarDensity shifted_exponential_density(double mean) {
  ScalarDensity d;
  d.pdf = [mean](double x) {
    return x >= mean - 1.0 ? std::exp(-(x - mean + 1.0)) : 0.0;
  };
  d.log_pdf = [mean](double x) {
    return x >= mean - 1.0 ? -(x - mean + 1.0) : -kInf;
  };
  d.sampler = [mean](SplitMix64& rng) {
    return mean - 1.0 + sample_exponential(rng);
  };
  d.support_lo = mean - 1.0;
  d.mean_hint = mean;
  d.label = "ShiftedExp(" + std::to_string(mean) + ")";
  return d;
}

// Erlang(lambda, k) location model: support [theta, inf), mean theta + k/lambda.
inline ScalarDensity erlang_density(double theta, double lambda, int k) {
  if (lambda <= 0.0 || k < 1)
    throw std::invalid_argument("erlang_density: lambda > 0 and k >= 1 required");
  const double log_norm = k * std::log(lambda) - std::lgamma(k);
  ScalarDensity d;
  d.log_pdf = [theta, lambda, k, log_norm](double x) {
    const double t = x - theta;
    if (t < 0.0) return -kInf;
    if (t == 0.0) return k == 1 ? log_norm : -kInf;
    return log_norm + (k - 1) * std::log(t) - lambda * t;
  };
  d.pdf = [lp = d.log_pdf](double x) { return std::exp(lp(x)); };
  d.sampler = [theta, lambda, k](SplitMix64& rng) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += sample_exponential(rng);
    return theta + s / lambda;
  };
  d.support_lo = theta;
  d.mean_hint = theta + k / lambda;
  d.label = "Erlang(" + std::to_string(lambda) + "," + std::to_string(k) + ")@" +
            std::to_string(theta);
  return d;
}

inline ScalarDensity uniform_density(double mean) {
  ScalarDensity d;
  d.pdf = [mean](double x) {
    return (x >= mean - 0.5 && x <= mean + 0.5) ? 1.0 : 0.0;
  };
  d.log_pdf = [mean](double x) {
    return (x >= mean - 0.5 && x <= mean + 0.5) ? 0.0 : -kInf;
  };
  d.sampler = [mean](SplitMix64& rng) { return mean - 0.5 + uniform01(rng); };
  d.support_lo = mean - 0.5;
  d.support_hi = mean + 0.5;
  d.mean_hint = mean;
  d.label = "Unif(" + std::to_string(mean) + "+-0.5)";
  return d;
}

// Logistic with mean `mean` and variance sigma^2.
inline ScalarDensity logistic_density(double mean, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("logistic_density: sigma > 0 required");
  constexpr double kC = kPi / 1.732050807568877293527446;  // pi/sqrt(3)
  ScalarDensity d;
  d.log_pdf = [mean, sigma](double x) {
    const double u = kC * (x - mean) / sigma;
    // -u - 2 log(1 + e^{-u}) + log(c/sigma), stable for both signs of u
    const double a = -std::fabs(u);
    return a - 2.0 * std::log1p(std::exp(a)) + std::log(kC / sigma);
  };
  d.pdf = [lp = d.log_pdf](double x) { return std::exp(lp(x)); };
  d.sampler = [mean, sigma](SplitMix64& rng) {
    return mean + sigma * sample_logistic_unitvar(rng);
  };
  d.mean_hint = mean;
  d.label = "Logistic(" + std::to_string(mean) + "," + std::to_string(sigma) + ")";
  return d;
}

// ---------------------------------------------------------------------------
// Log-concave targets e^{-psi}: psi convex, differentiable, density
// normalized with zero mean.
// ---------------------------------------------------------------------------

struct LogConcaveTarget {
  std::function<double(double)> psi;
  std::function<double(double)> psi_prime;
  // Draws from the standardized density e^{-psi(z)}.
  std::function<double(SplitMix64&)> sample_z;
  double sigma = 1.0;  // scale of the location model (1/sigma) e^{-psi((y-th)/sigma)}
  double psi0 = 0.0;   // cached psi(0)
  std::string label;

  // sigma-scaled location density v(y; theta).
  double density(double y, double theta) const {
    return std::exp(log_density(y, theta));
  }
  double log_density(double y, double theta) const {
    return -psi((y - theta) / sigma) - std::log(sigma);
  }
};

inline LogConcaveTarget gaussian_target(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_target: sigma > 0 required");
  LogConcaveTarget t;
  t.psi = [](double z) { return 0.5 * z * z + kLogSqrt2Pi; };
  t.psi_prime = [](double z) { return z; };
  t.sample_z = [](SplitMix64& rng) { return sample_normal(rng); };
  t.sigma = sigma;
  t.psi0 = kLogSqrt2Pi;
  t.label = "gaussian";
  return t;
}

inline LogConcaveTarget logistic_target(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("logistic_target: sigma > 0 required");
  constexpr double kC = kPi / 1.732050807568877293527446;  // pi/sqrt(3)
  LogConcaveTarget t;
  t.psi = [](double z) {
    const double u = kC * z;
    const double a = -std::fabs(u);
    return -(a - 2.0 * std::log1p(std::exp(a))) - std::log(kC);
  };
  t.psi_prime = [](double z) {
    const double e = std::exp(-std::fabs(kC * z));
    const double m = (1.0 - e) / (1.0 + e);  // |tanh|-shaped, odd in z
    return z >= 0.0 ? kC * m : -kC * m;
  };
  t.sample_z = [](SplitMix64& rng) { return sample_logistic_unitvar(rng); };
  t.sigma = sigma;
  t.psi0 = 2.0 * std::log(2.0) - std::log(kC);
  t.label = "logistic";
  return t;
}

// Gaussian-mollified Laplace: the density of Y + eta*G for Y ~ Lap(0,1),
// G ~ N(0,1). Closed form
//   e^{-psi_eta(z)} = (e^{z+eta^2/2}/2) Q((z+eta^2)/eta)
//                   + (e^{-z+eta^2/2}/2) Q((-z+eta^2)/eta),
// evaluated through erfcx so the e^{|z|} factor never overflows.
class MollifiedLaplacePsi {
 public:
  explicit MollifiedLaplacePsi(double eta) : eta_(eta) {
    if (!(eta > 0.0 && eta < 1.0))
      throw std::invalid_argument("MollifiedLaplacePsi: eta in (0,1) required");
  }

  double eta() const { return eta_; }

  // The two halves of the closed form; each is stable on its own.
  double half_term(double z) const {
    // (e^{z+eta^2/2}/2) Q((z+eta^2)/eta)
    const double u = (z + eta_ * eta_) / eta_;
    if (u >= 0.0) {
      // e^{z+eta^2/2} Q(u) = (1/2) erfcx(u/sqrt2) e^{-z^2/(2 eta^2)}
      return 0.25 * erfcx(u / kSqrt2) * std::exp(-0.5 * z * z / (eta_ * eta_));
    }
    return 0.5 * std::exp(z + 0.5 * eta_ * eta_) * norm_upper(u);
  }

  double density(double z) const { return half_term(z) + half_term(-z); }

  double psi(double z) const { return -std::log(density(z)); }

  // psi' = (B - A) / (A + B) with A, B the two halves; |psi'| <= 1 by
  // construction. Far in the tails both halves underflow; the slope limit
  // is sign(z) * 1.
  double psi_prime(double z) const {
    const double a = half_term(z), b = half_term(-z);
    if (a + b <= 0.0) return z >= 0.0 ? 1.0 : -1.0;
    return (b - a) / (a + b);
  }

  LogConcaveTarget target(double sigma) const {
    if (sigma <= 0.0)
      throw std::invalid_argument("MollifiedLaplacePsi: sigma > 0 required");
    auto self = std::make_shared<MollifiedLaplacePsi>(*this);
    LogConcaveTarget t;
    t.psi = [self](double z) { return self->psi(z); };
    t.psi_prime = [self](double z) { return self->psi_prime(z); };
    t.sample_z = [eta = eta_](SplitMix64& rng) {
      return sample_laplace(rng) + eta * sample_normal(rng);
    };
    t.sigma = sigma;
    t.psi0 = psi(0.0);
    t.label = "mollified_laplace(eta=" + std::to_string(eta_) + ")";
    return t;
  }

 private:
  double eta_;
};

// Density of the sigma-scaled location model of a LogConcaveTarget.
inline ScalarDensity target_density(const LogConcaveTarget& t, double theta) {
  ScalarDensity d;
  d.pdf = [t, theta](double y) { return t.density(y, theta); };
  d.log_pdf = [t, theta](double y) { return t.log_density(y, theta); };
  d.sampler = [t, theta](SplitMix64& rng) {
    return theta + t.sigma * t.sample_z(rng);
  };
  d.mean_hint = theta;
  d.label = t.label + "@" + std::to_string(theta);
  return d;
}

// ---------------------------------------------------------------------------
// The kappa/tau functionals of the exponential-source construction.
// ---------------------------------------------------------------------------

// kappa(sigma) = inf{z : psi'(z) = sigma}, +inf when psi' stays below sigma.
// Monotone bracketing on [-50, 50] with doubling expansion up to 2^20;
// +inf is declared when psi' at the right end is below sigma - 1e-12.
inline double logconcave_kappa(const LogConcaveTarget& t) {
  const double sigma = t.sigma;
  double lo = -50.0, hi = 50.0;
  while (t.psi_prime(hi) < sigma && hi < 1048576.0) hi *= 2.0;
  if (!(t.psi_prime(hi) >= sigma - 1e-12)) return kInf;
  while (t.psi_prime(lo) >= sigma && lo > -1048576.0) lo *= 2.0;
  // smallest z with psi'(z) >= sigma (psi' nondecreasing)
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (t.psi_prime(mid) >= sigma)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

// tau(sigma) = 2 int_kappa^inf e^{-psi} + (2/sigma) e^{-psi(kappa)};
// identically 0 when kappa = +inf.
inline double logconcave_tau(const LogConcaveTarget& t, double kappa) {
  if (std::isinf(kappa)) return 0.0;
  const double tail = integrate_or_throw(
      [&t](double z) { return std::exp(-t.psi(z)); }, kappa, kInf);
  return 2.0 * tail + (2.0 / t.sigma) * std::exp(-t.psi(kappa));
}

inline double logconcave_tau(const LogConcaveTarget& t) {
  return logconcave_tau(t, logconcave_kappa(t));
}

// Integral of a density over [a, b] at the library-wide quadrature contract.
inline double density_quadrature(const ScalarDensity& d, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("density_quadrature: a < b required");
  const double lo = std::max(a, d.support_lo);
  const double hi = std::min(b, d.support_hi);
  if (!(lo < hi)) return 0.0;
  std::vector<double> brk;
  if (std::isfinite(d.mean_hint)) brk.push_back(d.mean_hint);
  return integrate_or_throw(d.pdf, lo, hi, brk);
}

}  // namespace rkreduce
