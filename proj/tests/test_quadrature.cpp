#include <cmath>
#include <numbers>

#include "doctest.h"
#include "zeeman/errors.hpp"
#include "zeeman/quadrature.hpp"

using namespace zeeman;
namespace q = zeeman::quadrature;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  for (std::size_t n : {1u, 2u, 5u, 16u, 63u}) {
    const auto rule = q::gauss_legendre(n);
    for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1.0);
      const double got = rule.integrate([k](double x) { return std::pow(x, static_cast<double>(k)); });
      CHECK(got == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("Gauss-Legendre on an interval") {
  const auto rule = q::gauss_legendre(12, 0.0, std::numbers::pi);
  CHECK(rule.integrate([](double x) { return std::sin(x); }) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("scaled Gauss-Laguerre reproduces the Gamma moments") {
  for (std::size_t n : {1u, 3u, 10u, 40u}) {
    const auto rule = q::gauss_laguerre_scaled(n);
    for (std::size_t k = 0; k <= 2 * n - 1 && k <= 40; ++k) {
      const double got = rule.integrate([k](double u) {
        return std::exp(-u + k * std::log(u) - std::lgamma(k + 1.0));
      });
      CHECK(got == doctest::Approx(1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("scaled Gauss-Laguerre stays finite for several hundred nodes") {
  const auto rule = q::gauss_laguerre_scaled(500);
  double total = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    REQUIRE(std::isfinite(rule.weights[i]));
    REQUIRE(rule.weights[i] > 0.0);
    total += rule.weights[i] * std::exp(-rule.nodes[i]);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // a moment whose mass sits at u ~ 300, far beyond where plain weights underflow
  const double m300 = rule.integrate([](double u) { return std::exp(-u + 300.0 * std::log(u) - std::lgamma(301.0)); });
  CHECK(m300 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("laguerre_scaled matches the recurrence-free closed form for small k") {
  // L_2^a(t) = (t² - 2(a+2)t + (a+1)(a+2)) / 2
  const double a = 3.0, t = 1.7;
  const auto v = q::laguerre_scaled(2, a, t);
  const double exact = (t * t - 2.0 * (a + 2.0) * t + (a + 1.0) * (a + 2.0)) / 2.0;
  CHECK(v.mantissa * std::exp(v.log_scale) == doctest::Approx(exact).epsilon(1e-14));
  const auto big = q::laguerre_scaled(400, 1.0, 2000.0);
  CHECK(big.log_scale > 0.0);
  CHECK(std::isfinite(big.mantissa));
}

TEST_CASE("Gauss-Chebyshev U absorbs the sqrt(1-x^2) weight") {
  const auto rule = q::gauss_chebyshev_u(4);
  CHECK(rule.integrate([](double) { return 1.0; }) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-14));
  CHECK(rule.integrate([](double x) { return x * x; }) == doctest::Approx(std::numbers::pi / 8).epsilon(1e-14));
  CHECK(rule.integrate([](double x) { return std::pow(x, 6); }) ==
        doctest::Approx(5.0 * std::numbers::pi / 128).epsilon(1e-14));
}

TEST_CASE("periodic trapezoid is exact below its Nyquist degree") {
  const auto rule = q::periodic_trapezoid(8, 2 * std::numbers::pi);
  CHECK(rule.integrate([](double x) { return std::cos(x) * std::cos(x); }) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-14));
  CHECK(std::abs(rule.integrate([](double x) { return std::sin(7 * x); })) < 1e-14);
}

TEST_CASE("empty rules are rejected") {
  CHECK_THROWS_AS(q::gauss_legendre(0), DomainError);
  CHECK_THROWS_AS(q::gauss_laguerre_scaled(0), DomainError);
}
