#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "rkreduce/diagnostics.hpp"

using namespace rkreduce;

TEST_CASE("tv_histogram basics") {
  SECTION("self-distance of a true sample is noise-level") {
    const ScalarDensity target = gaussian_density(0.0, 1.0);
    std::vector<double> draws(1000000);
    SplitMix64 rng(3);
    for (auto& v : draws) v = target.sampler(rng);
    const TvEstimate tv = tv_histogram(draws, target, 100, -6.0, 6.0);
    CHECK(tv.estimate <= 3.0 * tv.mc_std_error);
  }

  SECTION("point mass vs standard Gaussian") {
    std::vector<double> draws(20000, 0.0);
    const TvEstimate tv =
        tv_histogram(draws, gaussian_density(0.0, 1.0), 100, -5.0, 5.0);
    CHECK(tv.estimate >= 0.95);
    CHECK(tv.estimate + tv.bias_budget <= 1.0 + 1e-9);
  }

  SECTION("argument validation") {
    std::vector<double> tiny(100, 0.0);
    CHECK_THROWS_AS(tv_histogram(tiny, gaussian_density(0.0, 1.0), 10, -1.0, 1.0),
                    std::invalid_argument);
    std::vector<double> enough(20000, 0.0);
    CHECK_THROWS_AS(tv_histogram(enough, gaussian_density(0.0, 1.0), 10, 1.0, 1.0),
                    std::invalid_argument);
  }

  SECTION("mc_std_error follows the sqrt(B/4K) convention exactly") {
    std::vector<double> draws(40000, 0.5);
    const TvEstimate a = tv_histogram(draws, gaussian_density(0.0, 1.0), 100, -5.0, 5.0);
    CHECK(a.mc_std_error == std::sqrt(100.0 / (4.0 * 40000.0)));
    std::vector<double> draws2(80000, 0.5);
    const TvEstimate b =
        tv_histogram(draws2, gaussian_density(0.0, 1.0), 100, -5.0, 5.0);
    CHECK(b.mc_std_error == Catch::Approx(a.mc_std_error / std::sqrt(2.0)).epsilon(1e-12));
  }
}

TEST_CASE("tv estimator consistency on a known pair") {
  // plug-in law Lap(0,1) + N(0,4) against N(0,4); exact TV from quadrature
  const double sigma = 2.0;
  const double true_tv = plugin_tv_exact(1.0, sigma);
  const ScalarDensity target = gaussian_density(0.0, sigma);
  auto run_once = [&](std::size_t k, std::uint64_t seed) {
    std::vector<double> draws(k);
    SplitMix64 rng(seed);
    for (auto& v : draws)
      v = sample_laplace(rng) + sigma * sample_normal(rng);
    const TvEstimate tv = tv_histogram(draws, target, 100, -6.0 * sigma, 6.0 * sigma);
    return std::fabs(tv.estimate - true_tv);
  };
  std::vector<double> err_small, err_big;
  for (int rep = 0; rep < 20; ++rep) {
    err_small.push_back(run_once(20000, 40 + rep));
    err_big.push_back(run_once(40000, 540 + rep));
  }
  auto median = [](std::vector<double> v) {
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    return v[v.size() / 2];
  };
  CHECK(median(err_big) < median(err_small));
}

TEST_CASE("check_pq_bound reports slack and violations") {
  const SignedKernelSpec exact = exp_logconcave_kernel(logistic_target(2.0));
  const BoundCheckReport ok =
      check_pq_bound(exact, {-2.0, 0.0, 2.0}, [](double) { return 1e-12; });
  CHECK(ok.pass);  // LHS is identically zero
  const BoundCheckReport bad =
      check_pq_bound(exp_logconcave_kernel(gaussian_target(3.0)), {0.0},
                     [](double) { return 1e-9; });
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_slack > 0.0);
  CHECK(bad.to_json().at("pass") == false);
}

TEST_CASE("check_tail_bound with a trivial bound always passes") {
  std::vector<double> samples{-10.0, 0.0, 4.0, 12.0};
  const BoundCheckReport rep =
      check_tail_bound(samples, 0.0, [](double) { return 1.0; }, {1.0, 5.0});
  CHECK(rep.pass);
}

TEST_CASE("plug-in comparison against the certificate") {
  const PluginComparison cmp = plugin_vs_rk(1.0, 0.01);
  // frozen from the high-precision convolution quadrature
  CHECK(cmp.plugin_tv == Catch::Approx(0.0302170256307119).margin(1e-9));
  CHECK(cmp.rk_certified <= 0.01);
  CHECK(cmp.plugin_dominates);
  // literal evaluation of the characteristic-function floor at t = 1/sigma
  CHECK(cmp.cf_floor == Catch::Approx(0.0399555019557727).margin(1e-12));
  // the comparison report carries both verdicts
  CHECK(cmp.to_json().contains("cf_floor_holds"));
}

TEST_CASE("plug-in TV decreases along a sigma grid") {
  double prev = kInf;
  for (double sigma : {2.0, 3.0, 5.0, 8.0, 13.0}) {
    const double tv = plugin_tv_exact(1.0, sigma);
    CHECK(tv < prev);
    CHECK(tv > 0.0);
    prev = tv;
  }
}

TEST_CASE("chi-square tail helper agrees with reference values") {
  CHECK(chi_square_upper(30.0, 19) == Catch::Approx(0.05179845889302387).margin(1e-12));
  CHECK(chi_square_upper(10.0, 19) == Catch::Approx(0.9529457975866219).margin(1e-12));
  CHECK(chi_square_upper(43.82, 19) == Catch::Approx(0.001000062314560119).margin(1e-12));
  CHECK(chi_square_upper(5.0, 3) == Catch::Approx(0.17179714429673313).margin(1e-12));
}
