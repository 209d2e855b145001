#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rkreduce/distributions.hpp"
#include "rkreduce/rng.hpp"
#include "rkreduce/signed_kernels.hpp"

namespace rkreduce {

// Family of base proposal measures P(.|x): sampleable and evaluable.
struct BaseMeasure {
  std::function<double(double x, SplitMix64&)> sample;
  std::function<double(double y, double x)> pdf;
  std::function<double(double y, double x)> log_pdf;
  std::string label;
};

inline BaseMeasure gaussian_base(double sigma, double shift = 0.0,
                                 bool centered_on_input = true) {
  if (sigma <= 0.0) throw std::invalid_argument("gaussian_base: sigma > 0 required");
  BaseMeasure b;
  const double log_norm = -kLogSqrt2Pi - std::log(sigma);
  b.sample = [sigma, shift, centered_on_input](double x, SplitMix64& rng) {
    const double mu = centered_on_input ? x + shift : shift;
    return mu + sigma * sample_normal(rng);
  };
  b.log_pdf = [sigma, shift, centered_on_input, log_norm](double y, double x) {
    const double mu = centered_on_input ? x + shift : shift;
    const double z = (y - mu) / sigma;
    return -0.5 * z * z + log_norm;
  };
  b.pdf = [lp = b.log_pdf](double y, double x) { return std::exp(lp(y, x)); };
  b.label = centered_on_input
                ? "N(x" + std::string(shift >= 0 ? "+" : "") + std::to_string(shift) +
                      "," + std::to_string(sigma * sigma) + ")"
                : "N(" + std::to_string(shift) + "," + std::to_string(sigma * sigma) + ")";
  return b;
}

// P(y|x) = (1/(2 sigma)) e^{-psi((y - x - 1) / (2 sigma))}: the target's own
// shape at doubled scale, centered at x + 1.
inline BaseMeasure logconcave_base(const LogConcaveTarget& target) {
  BaseMeasure b;
  const double s2 = 2.0 * target.sigma;
  b.sample = [target, s2](double x, SplitMix64& rng) {
    return x + 1.0 + s2 * target.sample_z(rng);
  };
  b.log_pdf = [target, s2](double y, double x) {
    return -target.psi((y - x - 1.0) / s2) - std::log(s2);
  };
  b.pdf = [lp = b.log_pdf](double y, double x) { return std::exp(lp(y, x)); };
  b.label = "logconcave_base(" + target.label + ",2sigma)";
  return b;
}

// Lap(x + 1, 2 sigma); the proposal used for the mollified-Laplace target.
inline BaseMeasure laplace_base(double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("laplace_base: sigma > 0 required");
  BaseMeasure b;
  const double s2 = 2.0 * sigma;
  b.sample = [s2](double x, SplitMix64& rng) {
    return x + 1.0 + s2 * sample_laplace(rng);
  };
  b.log_pdf = [s2](double y, double x) {
    return -std::fabs(y - x - 1.0) / s2 - std::log(2.0 * s2);
  };
  b.pdf = [lp = b.log_pdf](double y, double x) { return std::exp(lp(y, x)); };
  b.label = "Lap(x+1," + std::to_string(s2) + ")";
  return b;
}

// ---------------------------------------------------------------------------
// Rejection configuration and trace.
// ---------------------------------------------------------------------------

struct Y0Policy {
  enum class Kind { kConstant, kEchoInput, kInputPlus } kind = Kind::kEchoInput;
  double value = 0.0;

  static Y0Policy constant(double v) { return {Kind::kConstant, v}; }
  static Y0Policy echo_input() { return {Kind::kEchoInput, 0.0}; }
  static Y0Policy input_plus(double v) { return {Kind::kInputPlus, v}; }

  double resolve(double x) const {
    switch (kind) {
      case Kind::kConstant: return value;
      case Kind::kEchoInput: return x;
      case Kind::kInputPlus: return x + value;
    }
    return x;
  }
  std::string describe() const {
    switch (kind) {
      case Kind::kConstant: return "constant(" + std::to_string(value) + ")";
      case Kind::kEchoInput: return "echo_input";
      case Kind::kInputPlus: return "input_plus(" + std::to_string(value) + ")";
    }
    return "echo_input";
  }
};

struct RejectionConfig {
  double M = 1.0;  // ratio bound, >= 1
  int N = 1;       // at most N acceptance attempts
  Y0Policy y0 = Y0Policy::echo_input();
};

struct RkTrace {
  bool accepted = false;
  int iterations_used = 0;
  double output = 0.0;
};

class MViolation : public std::runtime_error {
 public:
  MViolation(double ratio, double m)
      : std::runtime_error(
            "M violated: observed (S+ / P) ratio " + std::to_string(ratio * m) +
            " exceeds M = " + std::to_string(m) +
            "; the deficiency guarantee no longer applies") {}
};

// ---------------------------------------------------------------------------
// Algorithm RK: at most N attempts of {draw U ~ Unif[0,1), Y ~ P(.|x),
// accept when U <= (S(Y|x) v 0) / (M P(Y|x))}; on cap expiry return y0.
// The ratio is computed in log space.
// ---------------------------------------------------------------------------
inline RkTrace rk_sample(double x, const SignedKernelSpec& kernel,
                         const BaseMeasure& base, const RejectionConfig& cfg,
                         SplitMix64& rng) {
  if (cfg.M < 1.0) throw std::invalid_argument("rk_sample: M >= 1 required");
  const double log_m = std::log(cfg.M);
  RkTrace trace;
  for (int t = 1; t <= cfg.N; ++t) {
    const double u = uniform01(rng);
    const double y = base.sample(x, rng);
    const double lp = kernel.log_pos(y, x);
    double ratio = 0.0;
    if (lp > -kInf) {
      const double lr = lp - log_m - base.log_pdf(y, x);
      if (lr > 1e-9) throw MViolation(std::exp(lr), cfg.M);
      ratio = std::exp(lr);
    }
    if (u <= ratio) {
      trace.accepted = true;
      trace.iterations_used = t;
      trace.output = y;
      return trace;
    }
  }
  trace.accepted = false;
  trace.iterations_used = cfg.N;
  trace.output = cfg.y0.resolve(x);
  return trace;
}

// Exact output law of rk_sample (the testing oracle):
//   Pr{Y in C} = (int_C S+(y|x) dy / p(x)) (1 - g(x)) + 1{y0 in C} g(x),
// with g(x) = (1 - p(x)/M)^N. C is an interval [lo, hi].
inline double rk_output_law(double x, const SignedKernelSpec& kernel,
                            const BaseMeasure& /*base*/, const RejectionConfig& cfg,
                            double c_lo, double c_hi) {
  if (!(c_lo <= c_hi)) throw std::invalid_argument("rk_output_law: empty interval");
  const double p = kernel_p(kernel, x);
  const double g = std::pow(1.0 - p / cfg.M, cfg.N);
  double mass = 0.0;
  for (const Interval& r : kernel.positive_region(x)) {
    const double lo = std::max(r.lo, c_lo);
    const double hi = std::min(r.hi, c_hi);
    if (!(lo < hi)) continue;
    mass += integrate_or_throw(
        [&kernel, x](double y) { return std::max(kernel.eval(y, x), 0.0); }, lo,
        hi, {}, 1e-12, 1e-10);
  }
  const double y0 = cfg.y0.resolve(x);
  const double atom = (y0 >= c_lo && y0 <= c_hi) ? g : 0.0;
  return mass / p * (1.0 - g) + atom;
}

// Deficiency bound of Lemma-style form:
//   2 exp(-N inf_p / M) + varsigma + sup_abs_dev,
// where sup_abs_dev = sup_theta (1/2) int (|p-1| + q) u(dx;theta).
inline double deficiency_bound(double inf_p, double sup_abs_dev, double varsigma,
                               double M, int N) {
  if (!(inf_p > 0.0 && inf_p <= M))
    throw std::invalid_argument("deficiency_bound: inf_p in (0, M] required");
  return 2.0 * std::exp(-static_cast<double>(N) * inf_p / M) + varsigma +
         sup_abs_dev;
}

// Largest observed (S+ / P) ratio over a grid; plans use this to validate
// their theorem-supplied M.
inline double max_ratio_on_grid(const SignedKernelSpec& kernel,
                                const BaseMeasure& base,
                                const std::vector<double>& xs,
                                const std::vector<double>& ys_rel) {
  double worst = 0.0;
  for (double x : xs) {
    for (double yr : ys_rel) {
      const double y = x + yr;
      const double lp = kernel.log_pos(y, x);
      if (lp == -kInf) continue;
      worst = std::max(worst, std::exp(lp - base.log_pdf(y, x)));
    }
  }
  return worst;
}

}  // namespace rkreduce
