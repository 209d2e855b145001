#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>

namespace rkreduce {

inline constexpr double kPi = 3.141592653589793238462643;
inline constexpr double kSqrt2 = 1.414213562373095048801689;
inline constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
inline constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;

// Standard normal pdf.
inline double norm_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

// Upper tail Q(z) = P(Z >= z).
inline double norm_upper(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// CDF.
inline double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

// Scaled complementary error function erfcx(x) = e^{x^2} erfc(x).
// Direct product below the overflow knee, asymptotic series above it.
inline double erfcx(double x) {
  if (x < 0.0) {
    // erfcx(-x) = 2 e^{x^2} - erfcx(x); overflows fast, callers keep x >= 0
    // except for moderately negative arguments.
    return 2.0 * std::exp(x * x) - erfcx(-x);
  }
  if (x <= 25.0) return std::exp(x * x) * std::erfc(x);
  // erfcx(x) ~ 1/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2x^2)^k
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k <= 8; ++k) {
    term *= -(2.0 * k - 1.0) * inv2x2;
    sum += term;
  }
  return sum / (x * std::sqrt(kPi));
}

// log of the standard normal upper tail, stable far into the tail.
inline double log_norm_upper(double z) {
  if (z < 8.0) return std::log(norm_upper(z));
  return -0.5 * z * z + std::log(0.5 * erfcx(z / kSqrt2));
}

// Regularized lower incomplete gamma P(a, x); series + continued fraction.
inline double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  const double log_pre = a * std::log(x) - x - std::lgamma(a);
  if (x < a + 1.0) {
    // series
    double sum = 1.0 / a, term = sum, ap = a;
    for (int n = 0; n < 500; ++n) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
    }
    return std::exp(log_pre) * sum;
  }
  // continued fraction for Q(a, x), Lentz's method
  const double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_pre) * h;
}

// Chi-square upper tail with k degrees of freedom.
inline double chi_square_upper(double stat, int dof) {
  if (stat <= 0.0) return 1.0;
  return 1.0 - gamma_p(0.5 * dof, 0.5 * stat);
}

}  // namespace rkreduce
