#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "gutmanlab/special_functions.hpp"
#include "support/reference.hpp"

using namespace gutmanlab;

TEST_CASE("normal cdf basics") {
  CHECK(std_normal_cdf(0.0).value() == doctest::Approx(0.5).epsilon(1e-15));
  // Frozen from the series/continued-fraction oracle in support/reference.hpp.
  CHECK(std::fabs(std_normal_cdf(1.96).value() - 0.9750021048517796) < 1e-13);
  CHECK(std::fabs(std_normal_cdf(-0.8416212335729142).value() - 0.2) < 1e-12);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::quiet_NaN()),
                  std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(std::numeric_limits<double>::infinity()),
                  std::domain_error);
}

TEST_CASE("normal cdf against the oracle, symmetry, monotonicity") {
  double prev = -1.0;
  for (double x = -8.0; x <= 8.0; x += 0.0625) {
    double got = std_normal_cdf(x).value();
    CHECK(std::fabs(got - reference::normal_cdf(x)) < 1e-12);
    CHECK(std::fabs(got + std_normal_cdf(-x).value() - 1.0) < 1e-12);
    CHECK(got >= prev);
    prev = got;
  }
}

TEST_CASE("complementary cdf is one minus the cdf as computed") {
  for (double x : {-3.0, -0.5, 0.0, 0.7, 2.5}) {
    CHECK(std_normal_sf(x).value() == 1.0 - std_normal_cdf(x).value());
  }
}

TEST_CASE("normal quantile") {
  CHECK(std_normal_inv_cdf(Probability(0.5)) == doctest::Approx(0.0).epsilon(1e-12));
  // Frozen from the oracle (bisection on the erf series).
  CHECK(std::fabs(std_normal_inv_cdf(Probability(0.2)) - (-0.8416212335729142)) < 1e-9);
  CHECK(std::fabs(std_normal_inv_cdf(Probability(0.975)) - 1.9599639845400545) < 1e-9);
  CHECK_THROWS_AS(std_normal_inv_cdf(Probability(0.0)), std::domain_error);
  CHECK_THROWS_AS(std_normal_inv_cdf(Probability(1.0)), std::domain_error);
}

TEST_CASE("normal round trip across the unit interval") {
  for (double p = 0.001; p < 0.9995; p += 0.001) {
    CHECK(std::fabs(std_normal_cdf(std_normal_inv_cdf(Probability(p))).value() - p) <
          1e-10);
  }
  for (double p : {1e-10, 1e-8, 1e-5, 1.0 - 1e-5, 1.0 - 1e-8, 1.0 - 1e-10}) {
    CHECK(std::fabs(std_normal_cdf(std_normal_inv_cdf(Probability(p))).value() - p) <
          1e-10);
  }
  double prev = -100.0;
  for (double p = 0.01; p < 1.0; p += 0.01) {
    double x = std_normal_inv_cdf(Probability(p));
    CHECK(x >= prev);
    prev = x;
  }
}

TEST_CASE("chi-squared tail closed forms") {
  for (double x : {0.0, 0.3, 1.0, 2.5, 7.0, 20.0}) {
    CHECK(std::fabs(chi2_sf(2, x).value() - std::exp(-0.5 * x)) < 1e-13);
    double q = 1.0 - reference::normal_cdf(std::sqrt(x));
    CHECK(std::fabs(chi2_sf(1, x).value() - 2.0 * q) < 1e-12);
  }
  double prev = 2.0;
  for (double x = 0.0; x <= 30.0; x += 0.25) {
    double v = chi2_sf(3, x).value();
    CHECK(v <= prev);
    prev = v;
  }
  CHECK_THROWS_AS(chi2_sf(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(chi2_sf(2, -0.1), std::domain_error);
}

TEST_CASE("chi-squared quantiles") {
  // (1, p): invert 2Q(sqrt(x)) = p with the normal oracle.
  double want = reference::normal_quantile(1.0 - 0.1);  // Q(t) = 0.1 -> t
  CHECK(std::fabs(chi2_isf(1, Probability(0.2)) - want * want) < 1e-8);
  CHECK(std::fabs(chi2_isf(1, Probability(0.2)) - 1.6423744151498164) < 1e-8);
  CHECK(std::fabs(chi2_isf(1, Probability(0.5)) - 0.4549364231195728) < 1e-8);
  for (double p : {0.05, 0.2, 0.5, 0.9}) {
    CHECK(std::fabs(chi2_isf(2, Probability(p)) + 2.0 * std::log(p)) < 1e-9);
  }
  CHECK_THROWS_AS(chi2_isf(3, Probability(0.0)), std::domain_error);
}

TEST_CASE("chi-squared round trips for dof 1..10") {
  for (unsigned k = 1; k <= 10; ++k) {
    for (double p = 0.001; p < 0.9995; p += 0.0105) {
      double x = chi2_isf(k, Probability(p));
      CHECK(std::fabs(chi2_sf(k, x).value() - p) < 1e-9);
    }
    double prev = 1e300;
    for (double p = 0.05; p < 1.0; p += 0.05) {
      double x = chi2_isf(k, Probability(p));
      CHECK(x <= prev);
      prev = x;
    }
  }
}

TEST_CASE("probability type validates its range") {
  CHECK_THROWS_AS(Probability(-0.01), std::domain_error);
  CHECK_THROWS_AS(Probability(1.01), std::domain_error);
  CHECK(Probability(1.0 + 1e-14).value() == 1.0);
  CHECK(Probability(-1e-14).value() == 0.0);
}
