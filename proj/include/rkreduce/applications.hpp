#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkreduce/distributions.hpp"
#include "rkreduce/rejection.hpp"
#include "rkreduce/signed_kernels.hpp"

namespace rkreduce {

// (covariate vector, response) pair of the mixture / phase-retrieval models.
struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;
};

// Real vector with an observation mask; unobserved entries are carried
// verbatim (rendered as a star on output).
struct MaskedVector {
  std::vector<double> values;
  std::vector<bool> mask;  // true = observed

  std::size_t observed_count() const {
    std::size_t n = 0;
    for (bool m : mask) n += m ? 1 : 0;
    return n;
  }
};

struct DpTransformResult {
  double h = 0.0;
  double sigma_sq = 0.0;
  double accuracy_certificate = 0.0;
  double delta = 0.0;

  nlohmann::json to_json() const {
    return {{"h", h},
            {"sigma_sq", sigma_sq},
            {"accuracy_certificate", accuracy_certificate},
            {"delta", delta}};
  }
};

// ---------------------------------------------------------------------------
// Mixture of linear experts -> phase retrieval. Responses are replaced by
// rejection-kernel draws targeting N(|<x_i, beta*>|, sigma^2) with
// sigma = 10 sqrt(2 log(20 n / delta)), M = 30, N = ceil(60 log(4 n / delta)),
// base N(0, 2 sigma^2), per-sample budget delta / n. Covariates pass through
// untouched.
// ---------------------------------------------------------------------------

struct MoePhaseSettings {
  double sigma = 0.0;
  double m = 30.0;
  int n_iters = 0;
  double per_sample_eps = 0.0;
};

inline MoePhaseSettings moe_phase_settings(std::size_t n, double delta) {
  if (n == 0) throw std::invalid_argument("moe_to_phase_retrieval: empty dataset");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("moe_to_phase_retrieval: delta in (0,1) required");
  MoePhaseSettings s;
  const double dn = static_cast<double>(n);
  s.sigma = 10.0 * std::sqrt(2.0 * std::log(20.0 * dn / delta));
  s.n_iters = static_cast<int>(std::ceil(60.0 * std::log(4.0 * dn / delta)));
  s.per_sample_eps = delta / dn;
  return s;
}

inline std::vector<LabeledSample> moe_to_phase_retrieval(
    const std::vector<LabeledSample>& data, double delta, std::uint64_t seed,
    const std::vector<double>* beta_star_for_check = nullptr) {
  const MoePhaseSettings s = moe_phase_settings(data.size(), delta);
  if (beta_star_for_check != nullptr) {
    // synthetic-mode validation of the |<x_i, beta*>| <= 1/2 hypothesis
    for (const LabeledSample& row : data) {
      if (row.x.size() != beta_star_for_check->size())
        throw std::invalid_argument("moe_to_phase_retrieval: dimension mismatch");
      double ip = 0.0;
      for (std::size_t j = 0; j < row.x.size(); ++j)
        ip += row.x[j] * (*beta_star_for_check)[j];
      if (std::fabs(ip) > 0.5)
        throw std::invalid_argument(
            "moe_to_phase_retrieval: |<x, beta*>| exceeds 1/2");
    }
  }
  const SignedKernelSpec kernel = moe_phase_kernel(s.sigma);
  const BaseMeasure base = gaussian_base(s.sigma * std::sqrt(2.0), 0.0, false);
  const RejectionConfig cfg{s.m, s.n_iters, Y0Policy::echo_input()};

  std::vector<LabeledSample> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    SplitMix64 rng = SplitMix64::stream(seed, i);
    LabeledSample row;
    row.x = data[i].x;  // bitwise pass-through
    row.y = rk_sample(data[i].y, kernel, base, cfg, rng).output;
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Denoising noise swap: observed entries follow the unit-variance shifted
// exponential noise model and are transformed toward the log-concave target;
// masked entries pass through bitwise. Certified TV cost |Omega| (eps + tau).
// ---------------------------------------------------------------------------

struct DenoiseSettings {
  double m = 0.0;
  int n_iters = 0;
  double tau = 0.0;
  double certified_tv_per_entry = 0.0;
};

// M constants: Gaussian and logistic targets ship with 4, the mollified
// Laplace with 35; anything else falls back to a grid supremum of
//   2 e^{psi(0)/2} sup_{z <= kappa} e^{-psi(z)/2} (1 - psi'(z)/sigma)
// with a 1.05 safety factor.
inline double denoise_ratio_bound(const LogConcaveTarget& target) {
  if (target.label == "gaussian" || target.label == "logistic") return 4.0;
  if (target.label.rfind("mollified_laplace", 0) == 0) return 35.0;
  const double kappa = logconcave_kappa(target);
  const double z_hi = std::isfinite(kappa) ? kappa : 64.0;
  double sup = 0.0;
  for (int i = 0; i <= 8192; ++i) {
    const double z = -64.0 + (z_hi + 64.0) * i / 8192.0;
    const double v = std::exp(-0.5 * target.psi(z)) *
                     (1.0 - target.psi_prime(z) / target.sigma);
    sup = std::max(sup, v);
  }
  return 1.05 * 2.0 * std::exp(0.5 * target.psi0) * sup;
}

inline DenoiseSettings denoise_settings(const LogConcaveTarget& target, double eps) {
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("denoise_transform: eps in (0,1) required");
  DenoiseSettings s;
  s.tau = logconcave_tau(target);
  if (s.tau >= 1.0)
    throw std::invalid_argument(
        "denoise_transform: sigma too small for certified mode (tau >= 1)");
  s.m = denoise_ratio_bound(target);
  s.n_iters = static_cast<int>(
      std::ceil(s.m * std::log(2.0 / eps) / (1.0 - s.tau)));
  s.certified_tv_per_entry = eps + s.tau;
  return s;
}

inline MaskedVector denoise_transform(const MaskedVector& obs,
                                      const LogConcaveTarget& target, double eps,
                                      std::uint64_t seed) {
  if (obs.values.size() != obs.mask.size())
    throw std::invalid_argument("denoise_transform: mask/value length mismatch");
  const DenoiseSettings s = denoise_settings(target, eps);
  const SignedKernelSpec kernel = exp_logconcave_kernel(target);
  const BaseMeasure base = logconcave_base(target);
  const RejectionConfig cfg{s.m, s.n_iters, Y0Policy::input_plus(1.0)};

  MaskedVector out = obs;  // masked entries keep their exact bit patterns
  for (std::size_t i = 0; i < obs.values.size(); ++i) {
    if (!obs.mask[i]) continue;
    SplitMix64 rng = SplitMix64::stream(seed, i);
    out.values[i] = rk_sample(obs.values[i], kernel, base, cfg, rng).output;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Laplace mechanism -> Gaussian mechanism. Consumes only the released value
// g_out and (b, delta); never touches f or the database. Settings:
// sigma^2 = 2 b^2 log(12/delta), M = 2, N = ceil(2 log(48/delta)), y0 = g_out.
// ---------------------------------------------------------------------------

inline double dp_accuracy_certificate(double b, double delta) {
  const double l = std::log(12.0 / delta);
  return std::sqrt(2.0 * b * b * l + 2.0 * b * b +
                   0.25 * b * b * delta * std::pow(l, 1.5));
}

inline DpTransformResult dp_laplace_to_gaussian(double g_out, double b,
                                                double delta, SplitMix64& rng) {
  if (b <= 0.0) throw std::invalid_argument("dp_laplace_to_gaussian: b > 0 required");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("dp_laplace_to_gaussian: delta in (0,1) required");
  const double sigma_sq = 2.0 * b * b * std::log(12.0 / delta);
  const double sigma = std::sqrt(sigma_sq);
  const SignedKernelSpec kernel = laplace_gaussian_kernel(b, sigma);
  const BaseMeasure base = gaussian_base(sigma);
  const RejectionConfig cfg{
      2.0, static_cast<int>(std::ceil(2.0 * std::log(48.0 / delta))),
      Y0Policy::echo_input()};

  DpTransformResult result;
  result.h = rk_sample(g_out, kernel, base, cfg, rng).output;
  result.sigma_sq = sigma_sq;
  result.delta = delta;
  result.accuracy_certificate = dp_accuracy_certificate(b, delta);
  return result;
}

// ---------------------------------------------------------------------------
// Risk-gap formula evaluator:
//   Lbar tv + moment_tilde^{1/p} tail_tilde^{1/q} + moment_hat^{1/p} tail_hat^{1/q}
// with 1/q = 1 - 1/p. At p = 1 the Hoelder partner exponent is 0; the
// convention 0^0 = 0 keeps the zero-tail case exact.
// ---------------------------------------------------------------------------
inline double risk_gap_bound(double tv, double lbar, double p,
                             double moment_tilde, double moment_hat,
                             double tail_tilde, double tail_hat) {
  if (p < 1.0) throw std::invalid_argument("risk_gap_bound: p >= 1 required");
  const double inv_q = 1.0 - 1.0 / p;
  auto pow_q = [inv_q](double tail) {
    if (inv_q == 0.0) return tail > 0.0 ? 1.0 : 0.0;
    return std::pow(tail, inv_q);
  };
  return lbar * tv + std::pow(moment_tilde, 1.0 / p) * pow_q(tail_tilde) +
         std::pow(moment_hat, 1.0 / p) * pow_q(tail_hat);
}

}  // namespace rkreduce
