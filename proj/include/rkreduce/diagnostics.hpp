#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rkreduce/distributions.hpp"
#include "rkreduce/quadrature.hpp"
#include "rkreduce/reductions.hpp"
#include "rkreduce/special.hpp"

namespace rkreduce {

// ---------------------------------------------------------------------------
// Histogram total-variation estimate.
// ---------------------------------------------------------------------------

struct TvEstimate {
  double estimate = 0.0;
  int bins = 0;
  double lo = 0.0;
  double hi = 0.0;
  double mc_std_error = 0.0;  // sqrt(bins / (4K)) convention
  double bias_budget = 0.0;   // binning bias bound, capped at 1 - estimate

  nlohmann::json to_json() const {
    return {{"estimate", estimate}, {"bins", bins},
            {"range", {lo, hi}},    {"mc_std_error", mc_std_error},
            {"bias_budget", bias_budget}};
  }
};

// (1/2) sum over cells |empirical - target mass| plus the two out-of-range
// cells, against quadrature masses of the target. K >= 1e4 required.
inline TvEstimate tv_histogram(const std::vector<double>& samples,
                               const ScalarDensity& target, int bins, double lo,
                               double hi) {
  if (samples.size() < 10000)
    throw std::invalid_argument("tv_histogram: needs at least 1e4 samples");
  if (!(lo < hi) || bins < 2)
    throw std::invalid_argument("tv_histogram: degenerate range");
  const double k = static_cast<double>(samples.size());
  const double width = (hi - lo) / bins;

  std::vector<double> counts(bins, 0.0);
  double below = 0.0, above = 0.0;
  for (double s : samples) {
    if (s < lo) {
      below += 1.0;
    } else if (s >= hi) {
      above += 1.0;
    } else {
      counts[static_cast<int>((s - lo) / width)] += 1.0;
    }
  }

  double dist = 0.0;
  double target_in_range = 0.0;
  for (int i = 0; i < bins; ++i) {
    const double mass = density_quadrature(target, lo + i * width, lo + (i + 1) * width);
    target_in_range += mass;
    dist += std::fabs(counts[i] / k - mass);
  }
  const double target_lo_tail =
      target.support_lo >= lo ? 0.0
                              : std::max(0.0, density_quadrature(target, -kInf, lo));
  const double target_hi_tail = std::max(0.0, 1.0 - target_in_range - target_lo_tail);
  dist += std::fabs(below / k - target_lo_tail);
  dist += std::fabs(above / k - target_hi_tail);

  TvEstimate tv;
  tv.estimate = 0.5 * dist;
  tv.bins = bins;
  tv.lo = lo;
  tv.hi = hi;
  tv.mc_std_error = std::sqrt(bins / (4.0 * k));
  // Lipschitz binning bias: sup |pdf'| estimated on a fine grid.
  double lip = 0.0;
  const int probe = 512;
  const double h = (hi - lo) / probe;
  double prev = target.pdf(lo);
  for (int i = 1; i <= probe; ++i) {
    const double cur = target.pdf(lo + i * h);
    lip = std::max(lip, std::fabs(cur - prev) / h);
    prev = cur;
  }
  const double raw_bias = 0.25 * lip * width * (hi - lo);
  tv.bias_budget = std::min(raw_bias, std::max(0.0, 1.0 - tv.estimate));
  return tv;
}

// Default layout: 200 bins over mean +- 6 sigma of the target.
inline TvEstimate tv_histogram(const std::vector<double>& samples,
                               const ScalarDensity& target, double center,
                               double sigma, int bins = 200) {
  return tv_histogram(samples, target, bins, center - 6.0 * sigma,
                      center + 6.0 * sigma);
}

// Error budget used when comparing an empirical TV against an analytic bound.
inline double tv_error_budget(const TvEstimate& tv) {
  return 4.0 * tv.mc_std_error + tv.bias_budget;
}

// ---------------------------------------------------------------------------
// |p(x) - 1| + q(x) <= bound(x) over a grid.
// ---------------------------------------------------------------------------

struct BoundCheckRow {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct BoundCheckReport {
  std::string check;
  std::vector<BoundCheckRow> rows;
  double max_slack = -kInf;  // max over rows of lhs - rhs (negative = margin)
  bool pass = true;

  nlohmann::json to_json() const {
    nlohmann::json grid = nlohmann::json::array();
    nlohmann::json lhs = nlohmann::json::array();
    nlohmann::json rhs = nlohmann::json::array();
    for (const auto& r : rows) {
      grid.push_back(r.x);
      lhs.push_back(r.lhs);
      rhs.push_back(r.rhs);
    }
    return {{"check", check}, {"grid", grid},       {"lhs", lhs},
            {"rhs", rhs},     {"slack", max_slack}, {"pass", pass}};
  }
};

inline BoundCheckReport check_pq_bound(const SignedKernelSpec& kernel,
                                       const std::vector<double>& x_grid,
                                       const std::function<double(double)>& bound_fn) {
  BoundCheckReport report;
  report.check = "pq_bound:" + kernel.label;
  for (double x : x_grid) {
    BoundCheckRow row;
    row.x = x;
    const double p = kernel_p(kernel, x);
    const double q = kernel_q(kernel, x);
    row.lhs = std::fabs(p - 1.0) + q;
    row.rhs = bound_fn(x);
    row.pass = row.lhs <= row.rhs;
    report.max_slack = std::max(report.max_slack, row.lhs - row.rhs);
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Empirical tail exceedance vs an analytic bound:
// freq(|Y - center| >= t) <= bound(t) + 4 binomial standard errors.
// ---------------------------------------------------------------------------

inline BoundCheckReport check_tail_bound(const std::vector<double>& samples,
                                         double center,
                                         const std::function<double(double)>& bound,
                                         const std::vector<double>& t_grid) {
  if (samples.empty())
    throw std::invalid_argument("check_tail_bound: no samples");
  BoundCheckReport report;
  report.check = "tail_bound";
  const double k = static_cast<double>(samples.size());
  for (double t : t_grid) {
    std::size_t count = 0;
    for (double s : samples)
      if (std::fabs(s - center) >= t) ++count;
    const double freq = count / k;
    BoundCheckRow row;
    row.x = t;
    row.lhs = freq;
    row.rhs = bound(t) + 4.0 * std::sqrt(freq * (1.0 - freq) / k);
    row.pass = row.lhs <= row.rhs;
    report.max_slack = std::max(report.max_slack, row.lhs - row.rhs);
    report.pass = report.pass && row.pass;
    report.rows.push_back(row);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Plug-in baseline vs the rejection-kernel certificate.
// ---------------------------------------------------------------------------

// Density of Lap(0, b) + N(0, sigma^2) in the overflow-safe closed form
// (b = 1 after rescaling is the mollified-Laplace formula with eta = sigma).
inline double laplace_gaussian_convolution_pdf(double y, double b, double sigma) {
  if (b <= 0.0 || sigma <= 0.0)
    throw std::invalid_argument("laplace_gaussian_convolution_pdf: b, sigma > 0");
  // scale so the Laplace part has unit scale: density(y) = f_eta(y/b)/b, eta = sigma/b
  const double z = y / b;
  const double eta = sigma / b;
  auto half = [eta](double zz) {
    const double u = (zz + eta * eta) / eta;
    if (u >= 0.0)
      return 0.25 * erfcx(u / kSqrt2) * std::exp(-0.5 * zz * zz / (eta * eta));
    return 0.5 * std::exp(zz + 0.5 * eta * eta) * norm_upper(u);
  };
  return (half(z) + half(-z)) / b;
}

// Exact TV between the plug-in output law Lap(0,b) + N(0, sigma^2) and the
// target N(0, sigma^2), by quadrature of the closed-form densities.
inline double plugin_tv_exact(double b, double sigma) {
  auto diff = [b, sigma](double y) {
    return std::fabs(laplace_gaussian_convolution_pdf(y, b, sigma) -
                     norm_pdf(y / sigma) / sigma);
  };
  return 0.5 * integrate_or_throw(diff, -kInf, kInf,
                                  {-3.0 * sigma, -sigma, 0.0, sigma, 3.0 * sigma},
                                  1e-12, 1e-9);
}

struct PluginComparison {
  double sigma = 0.0;
  double plugin_tv = 0.0;
  double rk_certified = 0.0;
  // Characteristic-function floor exp(-1/2) |G_W(1/sigma) - 1| with
  // G_W(t) = 1/(1 + b^2 t^2), evaluated literally.
  double cf_floor = 0.0;
  bool plugin_dominates = false;  // plugin_tv > rk_certified
  bool cf_floor_holds = false;    // plugin_tv >= cf_floor

  nlohmann::json to_json() const {
    return {{"check", "plugin_vs_rk"},
            {"sigma", sigma},
            {"plugin_tv", plugin_tv},
            {"rk_certified", rk_certified},
            {"cf_floor", cf_floor},
            {"plugin_dominates", plugin_dominates},
            {"cf_floor_holds", cf_floor_holds},
            {"pass", plugin_dominates}};
  }
};

inline PluginComparison plugin_vs_rk(double source_b, double eps) {
  const ReductionPlan plan = plan_laplace_to_gaussian(source_b, eps);
  const double sigma = plan.params.at("sigma");
  PluginComparison cmp;
  cmp.sigma = sigma;
  cmp.plugin_tv = plugin_tv_exact(source_b, sigma);
  cmp.rk_certified = plan.certified_bound;
  const double t = 1.0 / sigma;
  const double gw = 1.0 / (1.0 + source_b * source_b * t * t);
  cmp.cf_floor = std::exp(-0.5) * std::fabs(gw - 1.0);
  cmp.plugin_dominates = cmp.plugin_tv > cmp.rk_certified;
  cmp.cf_floor_holds = cmp.plugin_tv >= cmp.cf_floor;
  if (!cmp.plugin_dominates)
    throw std::logic_error("plugin_vs_rk: plug-in TV does not dominate the RK bound");
  return cmp;
}

}  // namespace rkreduce
