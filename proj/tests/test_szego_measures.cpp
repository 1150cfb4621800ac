#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/random.hpp"
#include "zeeman/szego_measures.hpp"

using namespace zeeman;
constexpr double kPi = std::numbers::pi;

namespace {

TestFunction random_poly(RandomStream& rng, int degree) {
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  for (auto& v : c) v = rng.normal();
  return TestFunction::polynomial(c);
}

}  // namespace

TEST_CASE("TestFunction parsing and evaluation") {
  CHECK(TestFunction::parse("1")(3.0) == 1.0);
  CHECK(TestFunction::parse("x")(-2.5) == -2.5);
  CHECK(TestFunction::parse("x^3")(2.0) == 8.0);
  CHECK(TestFunction::parse(" x^12 ").degree() == 12);
  CHECK(TestFunction::parse("poly:1,0,-2")(0.5) == doctest::Approx(0.5));
  const auto t = TestFunction::parse("table:-1:0,0:1,1:0");
  CHECK(t.kind() == TestFunction::Kind::tabulated);
  CHECK(t(0.25) == doctest::Approx(0.75));
  CHECK(t(-5.0) == 0.0);
  CHECK(t(5.0) == 0.0);
  CHECK(TestFunction::parse("x^2@3")(1.0) == doctest::Approx(9.0));
  CHECK(TestFunction::monomial(2).rescaled(0.5)(4.0) == doctest::Approx(4.0));

  for (const char* s : {"1", "x", "x^5", "poly:0.25,-1,3", "table:-1:0,0:1,1:0.5", "x^2@0.5"}) {
    const auto f = TestFunction::parse(s);
    const auto g = TestFunction::parse(f.describe());
    for (double x : {-0.7, 0.1, 0.9}) CHECK(f(x) == g(x));
  }

  CHECK_THROWS_AS(TestFunction::monomial(13), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("x^13"), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("sin(x)"), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("x^1.5"), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("table:0:1,0:2"), DomainError);
  CHECK_THROWS_AS(TestFunction::parse("poly:1,a"), DomainError);
}

TEST_CASE("rhs_triangular examples") {
  CHECK(rhs_triangular(TestFunction::monomial(0), 1.7) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(rhs_triangular(TestFunction::monomial(1), 1.7)) <= 1e-15);
  const double x2 = rhs_triangular(TestFunction::monomial(2), 2.0);
  CHECK(std::abs(x2 - oracle::triangular([](double x) { return x * x; }, 2.0)) <= 1e-12);
  CHECK(x2 == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
  const auto tab = TestFunction::parse("table:-0.4:1,0.1:-2,0.3:0.5");
  CHECK(std::abs(rhs_triangular(tab, 1.3) - oracle::triangular([&](double x) { return tab(x); }, 1.3)) <= 1e-9);
  CHECK_THROWS_AS(rhs_triangular(TestFunction::monomial(0), -1.0), DomainError);
}

TEST_CASE("rhs_quadric_mc examples") {
  const auto one = rhs_quadric_mc(TestFunction::monomial(0), 1.0, 5000, 3);
  CHECK(one.value == 1.0);
  CHECK(one.std_error == 0.0);
  CHECK(one.n == 5000);

  const auto x2 = rhs_quadric_mc(TestFunction::monomial(2), 2.0, 1'000'000, 7);
  CHECK(std::abs(x2.value - rhs_triangular(TestFunction::monomial(2), 2.0)) <= 3 * x2.std_error);
  CHECK(x2.std_error < 1e-3);
  const auto x1 = rhs_quadric_mc(TestFunction::monomial(1), 2.0, 1'000'000, 8);
  CHECK(std::abs(x1.value) <= 3 * x1.std_error);

  CHECK_THROWS_AS(rhs_quadric_mc(TestFunction::monomial(0), 1.0, 999, 1), DomainError);
}

TEST_CASE("rhs_quadric_mc is bitwise independent of execution mode") {
  const auto f = TestFunction::parse("poly:0.3,-1,2,0.5");
  const auto a = rhs_quadric_mc(f, 1.5, 3 * kSampleBlock + 17, 11, Execution::serial);
  const auto b = rhs_quadric_mc(f, 1.5, 3 * kSampleBlock + 17, 11, Execution::parallel);
  CHECK(a.value == b.value);
  CHECK(a.std_error == b.std_error);
}

TEST_CASE("rhs_angle_density examples") {
  CHECK(std::abs(rhs_angle_density(TestFunction::monomial(0), 1.0) - 1.0) <= 1e-10);
  CHECK(std::abs(rhs_angle_density(TestFunction::monomial(2), 2.0) - 1.0 / 6.0) <= 1e-8);
  RandomStream rng(31, 0);
  for (int i = 0; i < 5; ++i) {
    const auto f = random_poly(rng, 1 + i);
    const double B = 0.5 + i * 0.4;
    const auto mc = rhs_quadric_mc(f, B, 200'000, 100 + static_cast<std::uint64_t>(i));
    CHECK(std::abs(rhs_angle_density(f, B) - mc.value) <= 3 * mc.std_error);
  }
}

TEST_CASE("three representations agree for polynomials of degree <= 6") {
  RandomStream rng(41, 0);
  std::uint64_t seed = 500;
  for (double B : {0.5, 1.0, 2.0}) {
    for (int d = 0; d <= 6; ++d) {
      const auto f = random_poly(rng, d);
      const double tri = rhs_triangular(f, B);
      CHECK(std::abs(tri - rhs_angle_density(f, B)) <= 1e-8);
      const auto mc = rhs_quadric_mc(f, B, 100'000, ++seed);
      CHECK(std::abs(tri - mc.value) <= 3 * mc.std_error + 1e-15);
    }
  }
}

TEST_CASE("tabulated (kinked) functions: triangular and angle density agree") {
  for (const char* txt : {"table:-0.3:0,0.1:1,0.4:0", "table:-0.37:2,-0.05:-1,0.2:0.5,0.33:0"}) {
    const auto f = TestFunction::parse(txt);
    for (double B : {0.5, 2.0}) {
      CHECK(std::abs(rhs_triangular(f, B) - rhs_angle_density(f, B)) <= 1e-8);
      CHECK(std::abs(rhs_triangular(f, B) - oracle::triangular([&](double x) { return f(x); }, B)) <= 1e-9);
    }
  }
}

TEST_CASE("functions supported outside [-B/2, B/2] integrate to zero") {
  const double B = 1.2;
  const auto f = TestFunction::parse("table:-2:3,-0.61:0,0.6:0,0.61:-1,3:4");
  CHECK(std::abs(rhs_triangular(f, B)) <= 1e-15);
  CHECK(std::abs(rhs_angle_density(f, B)) <= 1e-15);
  const auto mc = rhs_quadric_mc(f, B, 20'000, 5);
  CHECK(mc.value == 0.0);
  CHECK(mc.std_error == 0.0);
}

TEST_CASE("scaling B -> cB equals rho(c .) under B") {
  for (const char* s : {"x^2", "poly:1,-0.5,0.25,2", "table:-1:0,0.2:1,1:-0.5"}) {
    const auto f = TestFunction::parse(s);
    for (double c : {0.5, 1.7, 3.0}) {
      CHECK(std::abs(rhs_triangular(f, c * 0.8) - rhs_triangular(f.rescaled(c), 0.8)) <= 1e-10);
    }
  }
}

TEST_CASE("liouville pushforward") {
  const auto r = liouville_pushforward_check(1'000'000, 7);
  CHECK(r.n == 1'000'000);
  CHECK(static_cast<double>(r.skipped) / static_cast<double>(r.n) <= 1e-6);
  CHECK(r.max_pointwise_error <= 1e-9);
  CHECK(r.ks_vs_triangular <= 0.005);
  CHECK(r.ks_vs_alpha <= 2e-6);
  CHECK_THROWS_AS(liouville_pushforward_check(100, 1), DomainError);
}

TEST_CASE("Haar density normalization") {
  const auto r = haar_density_normalization();
  CHECK(std::abs(r.value - 1.0) <= 1e-6);
  CHECK(r.min_density >= 0.0);

  // oracle: adaptive nested quadrature in (ψ, θ, β) times the trivial (2π)³
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  const double oracle_value = GK::integrate(
      [](double psi) {
        return GK::integrate(
            [&](double th) {
              return GK::integrate(
                  [&](double be) {
                    return std::pow(2 * kPi, 3) * haar_density({psi, th, 0.0, 0.0, be, 0.0});
                  },
                  0.0, 2 * kPi, 15, 1e-12);
            },
            0.0, kPi, 15, 1e-12);
      },
      0.0, 0.5 * kPi, 15, 1e-12);
  CHECK(std::abs(oracle_value - 1.0) <= 1e-8);
  CHECK(std::abs(r.value - oracle_value) <= 1e-6);

  const auto s = haar_density_normalization(HaarGridSpec{8, 4, 2, 2, 8, 2}, Execution::serial);
  const auto p = haar_density_normalization(HaarGridSpec{8, 4, 2, 2, 8, 2}, Execution::parallel);
  CHECK(s.value == p.value);
  CHECK_THROWS_AS(haar_density_normalization(HaarGridSpec{0, 4, 2, 2, 8, 2}), DomainError);
}

TEST_CASE("integrating out delta then beta gives the geodesic density") {
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (double psi : {0.01, 0.3, 0.8, 1.2, 1.5, 1.55}) {
    const double s = std::sin(psi);
    const double numeric = GK::integrate([&](double b) { return 1.0 / (1.0 + s * std::cos(b)); }, 0.0, 2 * kPi, 20, 1e-14);
    CHECK(std::abs(beta_marginal(psi) - numeric) <= 1e-8 * numeric);
    CHECK(std::abs(beta_marginal(psi) - 2 * kPi / std::cos(psi)) <= 1e-8 * numeric);
    for (double th : {0.2, 1.0, 2.9}) {
      // (2π)³ from φ, γ, δ times the β integral
      const double reduced = std::pow(2 * kPi, 3) * beta_marginal(psi) *
                             haar_density({psi, th, 0.0, 0.0, kPi / 2, 0.0});
      CHECK(reduced == doctest::Approx(geodesic_density(psi, th)).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(beta_marginal(0.5 * kPi), DomainError);
}
