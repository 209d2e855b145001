#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "rkreduce/distributions.hpp"

using namespace rkreduce;

TEST_CASE("densities normalize and integrate correctly") {
  CHECK(density_quadrature(gaussian_density(0.0, 1.0), -kInf, kInf) ==
        Catch::Approx(1.0).margin(1e-8));
  CHECK(density_quadrature(gaussian_density(0.0, 1.0), 0.0, kInf) ==
        Catch::Approx(0.5).margin(1e-8));
  // Lap(0,1) over (-1,1) = 1 - e^{-1}
  CHECK(density_quadrature(laplace_density(0.0, 1.0), -1.0, 1.0) ==
        Catch::Approx(0.6321205588285577).margin(1e-10));

  for (const ScalarDensity& d :
       {laplace_density(0.3, 2.0), shifted_exponential_density(-1.2),
        erlang_density(0.5, 1.5, 3), uniform_density(0.25),
        logistic_density(1.0, 2.0)}) {
    CHECK(density_quadrature(d, -kInf, kInf) == Catch::Approx(1.0).margin(1e-8));
  }
}

TEST_CASE("sampler/pdf consistency via KS statistic") {
  const std::size_t n = 100000;
  int stream = 0;
  for (const ScalarDensity& d :
       {laplace_density(0.0, 1.0), gaussian_density(1.0, 2.0),
        shifted_exponential_density(0.0), erlang_density(0.0, 1.0, 3),
        uniform_density(0.0), logistic_density(0.0, 1.5),
        target_density(MollifiedLaplacePsi(0.5).target(1.5), 0.5)}) {
    std::vector<double> draws(n);
    SplitMix64 rng = SplitMix64::stream(911, ++stream);
    for (auto& v : draws) v = d.sampler(rng);
    const double lo = std::isfinite(d.support_lo) ? d.support_lo
                                                  : d.mean_hint - 60.0;
    const double ks = oracle::ks_statistic(draws, d.pdf, lo);
    INFO(d.label);
    CHECK(ks < 0.01);
  }
}

TEST_CASE("sample mean matches quadrature mean") {
  const ScalarDensity d = erlang_density(-2.0, 2.0, 4);  // mean -2 + 2 = 0
  const double quad_mean = oracle::adaptive_simpson(
      [&d](double x) { return x * d.pdf(x); }, -2.0, 60.0);
  std::vector<double> draws(1000000);
  SplitMix64 rng(7);
  double sum = 0.0, sum2 = 0.0;
  for (auto& v : draws) {
    v = d.sampler(rng);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws.size();
  const double sd = std::sqrt(sum2 / draws.size() - mean * mean);
  CHECK(std::fabs(mean - quad_mean) < 5.0 * sd / std::sqrt(1e6));
}

TEST_CASE("log-concave targets: normalization, moments, convexity, psi'") {
  for (const LogConcaveTarget& t : {gaussian_target(2.0), logistic_target(3.0)}) {
    INFO(t.label);
    auto dens = [&t](double z) { return std::exp(-t.psi(z)); };
    CHECK(oracle::integrate_line(dens) == Catch::Approx(1.0).margin(1e-6));
    CHECK(oracle::integrate_line([&](double z) { return z * dens(z); }) ==
          Catch::Approx(0.0).margin(1e-6));
    CHECK(oracle::integrate_line([&](double z) { return z * z * dens(z); }) ==
          Catch::Approx(1.0).margin(1e-5));
    // midpoint convexity on a grid
    for (double a = -6.0; a < 6.0; a += 0.37) {
      const double b = a + 1.1;
      CHECK(t.psi(0.5 * (a + b)) <= 0.5 * (t.psi(a) + t.psi(b)) + 1e-10);
    }
    // psi' against central differences
    for (double z = -5.0; z <= 5.0; z += 0.5) {
      const double h = 1e-5;
      const double fd = (t.psi(z + h) - t.psi(z - h)) / (2.0 * h);
      CHECK(t.psi_prime(z) == Catch::Approx(fd).margin(1e-6));
    }
  }
  CHECK(logistic_target(1.0).psi0 ==
        Catch::Approx(0.7908706196045453).margin(1e-12));
}

TEST_CASE("mollified Laplace psi_eta") {
  for (double eta : {0.1, 0.5}) {
    const MollifiedLaplacePsi m(eta);
    // closed form vs direct convolution quadrature
    for (double z : {-30.0, -3.0, -0.4, 0.0, 0.7, 4.0, 25.0}) {
      const double direct = oracle::adaptive_simpson(
          [z, eta](double y) {
            return oracle::phi((z - y) / eta) / eta * 0.5 *
                   std::exp(-std::fabs(y));
          },
          z - 12.0 * eta - 40.0, z + 12.0 * eta + 40.0);
      CHECK(m.density(z) == Catch::Approx(direct).margin(1e-8));
    }
    // |psi'| <= 1 everywhere
    for (double z = -40.0; z <= 40.0; z += 0.173)
      CHECK(std::fabs(m.psi_prime(z)) <= 1.0 + 1e-12);
    CHECK(std::exp(m.psi(0.0)) <= 10.0);
    // psi' matches finite differences of psi
    for (double z : {-4.0, -1.0, 0.0, 0.5, 3.0}) {
      const double h = 1e-6;
      const double fd = (m.psi(z + h) - m.psi(z - h)) / (2.0 * h);
      CHECK(m.psi_prime(z) == Catch::Approx(fd).margin(1e-6));
    }
  }
  // TV between e^{-psi_eta} and Lap(0,1) is below eta/2
  for (double eta : {0.1, 0.5}) {
    const MollifiedLaplacePsi m(eta);
    const double tv = 0.5 * oracle::integrate_line([&m](double z) {
      return std::fabs(m.density(z) - 0.5 * std::exp(-std::fabs(z)));
    });
    CHECK(tv <= 0.5 * eta);
  }
}

TEST_CASE("kappa functional") {
  // Gaussian psi: kappa(sigma) = sigma across the grid
  for (double sigma : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    CHECK(logconcave_kappa(gaussian_target(sigma)) ==
          Catch::Approx(sigma).margin(1e-9));
  }
  // logistic at sigma = 2 >= pi/sqrt3: never reaches sigma
  CHECK(std::isinf(logconcave_kappa(logistic_target(2.0))));
  // mollified Laplace: |psi'| <= 1 < sigma forces +inf
  CHECK(std::isinf(logconcave_kappa(MollifiedLaplacePsi(0.5).target(1.5))));
}

TEST_CASE("tau functional") {
  CHECK(logconcave_tau(logistic_target(2.0)) == 0.0);
  const double tau3 = logconcave_tau(gaussian_target(3.0));
  // exact closed form 2 Q(3) + (2/3) phi(3), frozen from a high-precision run
  CHECK(tau3 == Catch::Approx(0.005654361671218861).margin(1e-12));
  CHECK(tau3 <= 2.0 * std::exp(-4.5));
  // nonincreasing in sigma
  double prev = kInf;
  for (double sigma : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const double tau = logconcave_tau(gaussian_target(sigma));
    CHECK(tau <= prev + 1e-15);
    prev = tau;
  }
}

TEST_CASE("density_quadrature error paths") {
  CHECK_THROWS_AS(density_quadrature(gaussian_density(0.0, 1.0), 2.0, 1.0),
                  std::invalid_argument);
}
