#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkreduce {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // achieved absolute error estimate
  bool converged = false;
};

class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved tolerance " +
                           std::to_string(achieved) + ")"),
        achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kKronrodNodes[i]);
    fv[14 - i] = f(c + h * kKronrodNodes[i]);
  }
  fv[7] = f(c);
  double kron = kKronrodWeights[7] * fv[7];
  double gauss = kGaussWeights[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (fv[i] + fv[14 - i]);
  }
  value = kron * h;
  err = std::fabs((kron - gauss) * h);
}

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// Adaptive GK15 on a finite interval list.
template <class F>
QuadResult adaptive(const F& f, const std::vector<double>& pts, double abs_tol,
                    double rel_tol, std::size_t max_panels) {
  std::priority_queue<Panel> heap;
  double total = 0.0, total_err = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    Panel p{pts[i], pts[i + 1], 0.0, 0.0};
    if (p.a == p.b) continue;
    gk15(f, p.a, p.b, p.value, p.error);
    total += p.value;
    total_err += p.error;
    heap.push(p);
  }
  std::size_t panels = heap.size();
  while (total_err > std::max(abs_tol, rel_tol * std::fabs(total)) &&
         panels < max_panels && !heap.empty()) {
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) continue;  // width exhausted
    Panel left{worst.a, mid, 0.0, 0.0}, right{mid, worst.b, 0.0, 0.0};
    gk15(f, left.a, left.b, left.value, left.error);
    gk15(f, right.a, right.b, right.value, right.error);
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++panels;
  }
  QuadResult r;
  r.value = total;
  r.error = total_err;
  r.converged = total_err <= std::max(abs_tol, rel_tol * std::fabs(total));
  return r;
}

}  // namespace detail

// Integrate f over (a, b) with interior breakpoints; either endpoint may be
// infinite (mapped through t -> t/(1-t) style substitutions). Contract:
// absolute tolerance 1e-10, relative 1e-8 unless overridden.
inline QuadResult integrate(const std::function<double(double)>& f, double a,
                            double b, std::vector<double> breakpoints = {},
                            double abs_tol = 1e-10, double rel_tol = 1e-8) {
  if (!(a < b)) throw std::invalid_argument("integrate: requires a < b");
  const bool lo_inf = std::isinf(a);
  const bool hi_inf = std::isinf(b);
  std::vector<double> pts;
  std::function<double(double)> g;

  if (!lo_inf && !hi_inf) {
    g = f;
    pts.push_back(a);
    for (double p : breakpoints)
      if (p > a && p < b) pts.push_back(p);
    pts.push_back(b);
  } else if (lo_inf && hi_inf) {
    // x = t/(1-t^2), t in (-1, 1); dx = (1+t^2)/(1-t^2)^2 dt
    g = [&f](double t) {
      const double s = 1.0 - t * t;
      const double x = t / s;
      const double v = f(x);
      return v == 0.0 ? 0.0 : v * (1.0 + t * t) / (s * s);
    };
    pts.push_back(-1.0);
    for (double p : breakpoints) {
      // invert x = t/(1-t^2): t = (sqrt(1+4x^2)-1)/(2x)
      if (std::isfinite(p) && p != 0.0)
        pts.push_back((std::sqrt(1.0 + 4.0 * p * p) - 1.0) / (2.0 * p));
    }
    pts.push_back(0.0);
    pts.push_back(1.0);
  } else if (hi_inf) {
    // x = a + t/(1-t), t in [0, 1)
    g = [&f, a](double t) {
      const double s = 1.0 - t;
      const double v = f(a + t / s);
      return v == 0.0 ? 0.0 : v / (s * s);
    };
    pts.push_back(0.0);
    for (double p : breakpoints)
      if (std::isfinite(p) && p > a) pts.push_back((p - a) / (1.0 + p - a));
    pts.push_back(0.5);
    pts.push_back(1.0);
  } else {
    // x = b - t/(1-t), t in [0, 1)
    g = [&f, b](double t) {
      const double s = 1.0 - t;
      const double v = f(b - t / s);
      return v == 0.0 ? 0.0 : v / (s * s);
    };
    pts.push_back(0.0);
    for (double p : breakpoints)
      if (std::isfinite(p) && p < b) pts.push_back((b - p) / (1.0 + b - p));
    pts.push_back(0.5);
    pts.push_back(1.0);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return detail::adaptive(g, pts, abs_tol, rel_tol, 4000);
}

// Throwing wrapper used where the contract demands convergence.
inline double integrate_or_throw(const std::function<double(double)>& f,
                                 double a, double b,
                                 std::vector<double> breakpoints = {},
                                 double abs_tol = 1e-10,
                                 double rel_tol = 1e-8) {
  const QuadResult r = integrate(f, a, b, std::move(breakpoints), abs_tol, rel_tol);
  if (!r.converged)
    throw QuadratureError("quadrature did not converge", r.error);
  return r.value;
}

}  // namespace rkreduce
