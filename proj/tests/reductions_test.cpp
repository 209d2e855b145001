#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "rkreduce/diagnostics.hpp"
#include "rkreduce/reductions.hpp"

using namespace rkreduce;

TEST_CASE("plan: Laplace -> Gaussian theorem settings") {
  const ReductionPlan plan = plan_laplace_to_gaussian(1.0, 0.01);
  CHECK(plan.params.at("sigma") * plan.params.at("sigma") ==
        Catch::Approx(14.180153671552183).epsilon(1e-12));
  CHECK(plan.cfg.N == 12);
  CHECK(plan.cfg.M == 2.0);
  CHECK(plan.certified_bound <= 0.01);
  for (double eps : {0.1, 0.01, 0.001})
    CHECK(plan_laplace_to_gaussian(1.0, eps).certified_bound <= eps);
  // sigma grows as eps shrinks
  CHECK(plan_laplace_to_gaussian(1.0, 0.005).params.at("sigma") >
        plan_laplace_to_gaussian(1.0, 0.5).params.at("sigma"));
}

TEST_CASE("plan: exponential -> Gaussian") {
  const ReductionPlan plan = plan_exp_to_gaussian(0.01);
  CHECK(plan.params.at("sigma") == Catch::Approx(3.4616367652045707).epsilon(1e-12));
  CHECK(plan.cfg.M == 4.0);
  CHECK(plan.cfg.N == 48);
  for (double eps : {0.1, 0.01})
    CHECK(plan_exp_to_gaussian(eps).certified_bound <= eps);
}

TEST_CASE("plan: exponential -> logistic") {
  const ReductionPlan plan = plan_exp_to_logistic(2.0, 0.01);
  CHECK(plan.cfg.N == 22);
  CHECK(plan.cfg.M == 4.0);
  CHECK(plan.certified_bound <= 0.01);
  // boundary sigma accepted, below boundary rejected
  CHECK_NOTHROW(plan_exp_to_logistic(kPi / std::sqrt(3.0), 0.01));
  CHECK_THROWS_AS(plan_exp_to_logistic(1.0, 0.01), std::invalid_argument);
  // exactness witness: p = 1 and q = 0 on an x grid
  for (double x = -5.0; x <= 5.0; x += 1.0) {
    CHECK(std::fabs(kernel_p(plan.kernel, x) - 1.0) <= 1e-8);
    CHECK(kernel_q(plan.kernel, x) <= 1e-8);
  }
}

TEST_CASE("plan: exponential -> Laplace via mollification") {
  const ReductionPlan plan = plan_exp_to_laplace(1.0, 0.02);
  CHECK(plan.params.at("eta") == 0.02);
  CHECK(plan.cfg.M == 35.0);
  CHECK(plan.cfg.N == 186);
  CHECK(plan.certified_bound <= 0.02);
  // ratio check across a grid: (S v 0) / P <= 35
  std::vector<double> xs, ys;
  for (int i = 0; i <= 60; ++i) {
    xs.push_back(-3.0 + 0.1 * i);
    ys.push_back(1.0 - 15.0 + 0.5 * i);
  }
  CHECK(max_ratio_on_grid(plan.kernel, plan.base, xs, ys) <= 35.0);
  CHECK_THROWS_AS(plan_exp_to_laplace(0.5, 0.02), std::invalid_argument);
}

TEST_CASE("plan: uniform -> Gaussian") {
  SECTION("alpha functionals") {
    auto f1 = [](double t) { return std::fabs(t); };
    auto f1p = [](double t) { return t >= 0.0 ? 1.0 : -1.0; };
    const AlphaPair a1 = uniform_alpha_functionals(f1, f1p, 0.0);
    CHECK(a1.alpha0 == Catch::Approx(0.5).epsilon(1e-12));
    CHECK(a1.alpha1 == Catch::Approx(1.0).epsilon(1e-12));
    auto f10 = [](double t) { return 10.0 * std::fabs(t); };
    auto f10p = [](double t) { return t >= 0.0 ? 10.0 : -10.0; };
    const AlphaPair a10 = uniform_alpha_functionals(f10, f10p, 0.0);
    CHECK(a10.alpha0 == Catch::Approx(5.0).epsilon(1e-12));
    CHECK(a10.alpha1 == Catch::Approx(10.0).epsilon(1e-12));
  }

  SECTION("theorem sigma threshold at eps = 0.1 for f = 10|t|") {
    const ReductionPlan plan = uniform_abs_plan(10.0, 0.1);
    CHECK(plan.params.at("sigma") == Catch::Approx(325.52472614374585).epsilon(1e-12));
    CHECK_FALSE(plan.empirical_mode());
    CHECK(plan.certified_bound <= 0.1);
  }

  SECTION("fig2 override drops into empirical mode") {
    const ReductionPlan plan = uniform_abs_plan(10.0, 0.1, 10.0, 3000);
    CHECK(plan.empirical_mode());
    CHECK(plan.cfg.M == 30.0);
    CHECK(plan.cfg.N == 3000);
    CHECK(plan.notes.find("empirical") != std::string::npos);
  }
}

TEST_CASE("plug-in reduction") {
  SECTION("degenerate noise returns x") {
    SplitMix64 rng(1);
    CHECK(plugin_reduce(3.25, 0.0, rng) == 3.25);
  }
  SECTION("unbiasedness") {
    SplitMix64 rng(2);
    double sum = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) sum += plugin_reduce(2.0, 5.0, rng);
    CHECK(std::fabs(sum / n - 2.0) <= 5.0 * 5.0 / std::sqrt(n));
  }
  SECTION("exact plug-in TV at sigma = 5 is positive and beats nothing") {
    // frozen from the high-precision convolution: 0.0179923908598806
    const double tv = plugin_tv_exact(1.0, 5.0);
    CHECK(tv == Catch::Approx(0.0179923908598806).margin(1e-9));
    const ReductionPlan plan = laplace_gaussian_plan(1.0, 5.0, 20, 0.02);
    CHECK(tv > plan.certified_bound);
  }
}

TEST_CASE("run_reduction") {
  const ReductionPlan plan = plan_exp_to_logistic(2.0, 0.01);
  SECTION("empty input") {
    const RunResult r = run_reduction(plan, {}, 1);
    CHECK(r.outputs.empty());
    CHECK(r.summary.count == 0);
  }
  SECTION("same seed twice is identical, acceptance stats populated") {
    std::vector<double> xs;
    SplitMix64 src(9);
    for (int i = 0; i < 2000; ++i) xs.push_back(-1.0 + sample_exponential(src));
    const RunResult a = run_reduction(plan, xs, 55, 2);
    const RunResult b = run_reduction(plan, xs, 55, 2);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(a.outputs[i] == b.outputs[i]);
    CHECK(a.summary.accepted > 1900);  // accept prob 1/4 per iter, N = 22
    CHECK(a.summary.mean_iterations > 1.0);
  }
}

TEST_CASE("empirical TV of certified plans stays within budget") {
  // theorem-mode plans across a theta grid; TV <= certified + estimator budget
  struct Case {
    ReductionPlan plan;
    std::function<double(double, SplitMix64&)> source;
  };
  std::vector<Case> cases;
  cases.push_back({plan_laplace_to_gaussian(1.0, 0.05),
                   [](double th, SplitMix64& r) { return th + sample_laplace(r); }});
  cases.push_back({plan_exp_to_gaussian(0.05), [](double th, SplitMix64& r) {
                     return th - 1.0 + sample_exponential(r);
                   }});
  cases.push_back({plan_exp_to_logistic(2.0, 0.05), [](double th, SplitMix64& r) {
                     return th - 1.0 + sample_exponential(r);
                   }});
  int case_idx = 0;
  for (const Case& c : cases) {
    ++case_idx;
    for (double theta : {-5.0, 0.0, 2.5}) {
      SplitMix64 src = SplitMix64::stream(400 + case_idx, static_cast<std::uint64_t>(
                                              theta * 4.0 + 100.0));
      std::vector<double> xs(20000);
      for (auto& x : xs) x = c.source(theta, src);
      const RunResult run = run_reduction(c.plan, xs, 500 + case_idx, 2);
      const ScalarDensity target = c.plan.target_at(theta);
      const double sigma = c.plan.params.at("sigma");
      const TvEstimate tv = tv_histogram(run.outputs, target, theta, sigma, 100);
      INFO(c.plan.family << " theta=" << theta);
      CHECK(tv.estimate <= c.plan.certified_bound + tv_error_budget(tv));
    }
  }
}

TEST_CASE("multivariate Laplace plans split the budget evenly") {
  const auto plans = multivariate_laplace_gaussian_plans({1.0, 0.5, 2.0}, 0.03);
  REQUIRE(plans.size() == 3);
  double total = 0.0;
  for (const ReductionPlan& p : plans) {
    CHECK(p.certified_bound <= 0.01);
    total += p.certified_bound;
  }
  CHECK(total <= 0.03);
  // coordinatewise sigma respects its own b
  CHECK(plans[1].params.at("sigma") == Catch::Approx(plans[0].params.at("sigma") * 0.5));
  CHECK_THROWS_AS(multivariate_laplace_gaussian_plans({}, 0.1),
                  std::invalid_argument);
}

TEST_CASE("named preset plans") {
  const ReductionPlan fig1 = preset_plan("fig1");
  CHECK(fig1.cfg.M == 2.0);
  CHECK(fig1.cfg.N == 20);
  const ReductionPlan fig2 = preset_plan("fig2");
  CHECK(fig2.cfg.M == 30.0);
  CHECK(fig2.cfg.N == 3000);
  CHECK(fig2.empirical_mode());
  CHECK_THROWS_AS(preset_plan("fig3"), std::invalid_argument);
}

TEST_CASE("plan JSON round trip") {
  const ReductionPlan plan = plan_exp_to_logistic(2.0, 0.01);
  const nlohmann::json j = plan_to_json(plan);
  CHECK(j.at("family") == "exp_to_logistic");
  CHECK(j.at("mode") == "theorem");
  const ReductionPlan back = plan_from_json(j);
  CHECK(back.cfg.N == plan.cfg.N);
  CHECK(back.cfg.M == plan.cfg.M);
  CHECK(back.params.at("sigma") == plan.params.at("sigma"));

  const ReductionPlan fig2 = uniform_abs_plan(10.0, 0.1, 10.0, 3000);
  const ReductionPlan fig2_back = plan_from_json(plan_to_json(fig2));
  CHECK(fig2_back.cfg.N == 3000);
  CHECK(fig2_back.empirical_mode());
  CHECK_THROWS_AS(plan_from_json(nlohmann::json{{"family", "nope"}}),
                  std::invalid_argument);
}
