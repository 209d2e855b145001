// Test-only oracles, kept independent of the library's quadrature and
// special-function paths: a composite adaptive Simpson integrator plus
// closed forms, with expected values frozen from a high-precision run.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

inline double simpson_panel(const std::function<double(double)>& f, double a,
                            double b) {
  const double m = 0.5 * (a + b);
  return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a,
                               double b, double eps = 1e-11, int depth = 28) {
  const double whole = simpson_panel(f, a, b);
  const double m = 0.5 * (a + b);
  const double left = simpson_panel(f, a, m);
  const double right = simpson_panel(f, m, b);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * eps)
    return left + right + (left + right - whole) / 15.0;
  return adaptive_simpson(f, a, m, eps / 2.0, depth - 1) +
         adaptive_simpson(f, m, b, eps / 2.0, depth - 1);
}

// Integral over the whole line through x = tan(t).
inline double integrate_line(const std::function<double(double)>& f,
                             double eps = 1e-11) {
  auto g = [&f](double t) {
    const double c = std::cos(t);
    const double v = f(std::tan(t));
    return v == 0.0 ? 0.0 : v / (c * c);
  };
  const double half_pi = 1.5707963267948966;
  double total = 0.0;
  const std::vector<double> pts{-half_pi + 1e-9, -1.3, -0.5, 0.0, 0.5, 1.3,
                                half_pi - 1e-9};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    total += adaptive_simpson(g, pts[i], pts[i + 1], eps);
  return total;
}

inline double phi(double z) {
  return 0.3989422804014326779399461 * std::exp(-0.5 * z * z);
}
inline double upper_q(double z) { return 0.5 * std::erfc(z / 1.4142135623730951); }

// Kolmogorov-Smirnov statistic of samples against a CDF evaluated through a
// caller-supplied pdf, accumulating the CDF along the sorted samples.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& pdf,
                           double support_lo) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double cdf = 0.0;
  double prev = support_lo;
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double x = samples[i];
    if (x > prev) {
      // fine fixed-grid Simpson per gap keeps this oracle self-contained
      cdf += adaptive_simpson(pdf, prev, x, 1e-12, 20);
      prev = x;
    }
    worst = std::max(worst, std::fabs(cdf - i / n));
    worst = std::max(worst, std::fabs(cdf - (i + 1) / n));
  }
  return worst;
}

}  // namespace oracle
