#pragma once

// Test-only reference computations. Nothing here calls into the library's
// quadrature or matrix-element code; special functions come from <cmath>
// (C++17 mathematical special functions) and integration from Boost.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

namespace oracle {

inline double radial(int n, int l, double r) {
  const double t = 2.0 * r / n;
  const double log_norm =
      1.5 * std::log(2.0 / n) + 0.5 * (std::lgamma(n - l) - std::log(2.0 * n) - std::lgamma(n + l + 1.0));
  return std::exp(log_norm - 0.5 * t) * std::pow(t, l) *
         std::assoc_laguerre(static_cast<unsigned>(n - l - 1), static_cast<unsigned>(2 * l + 1), t);
}

/// Composite 30-point Gauss–Legendre on [0, r_max] with `panels` panels.
inline double composite(const std::function<double(double)>& f, double r_max, int panels) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  double sum = 0.0;
  const double width = r_max / panels;
  for (int k = 0; k < panels; ++k) sum += Rule::integrate(f, k * width, (k + 1) * width);
  return sum;
}

inline double radial_r2(int n, int l, int n2, int l2, int panels) {
  const int big = std::max(n, n2);
  const double r_max = 4.0 * big * big + 80.0 * big;
  return composite([&](double r) { return radial(n, l, r) * radial(n2, l2, r) * std::pow(r, 4); }, r_max, panels);
}

/// Y_{l,m}(θ, φ) with the Condon–Shortley phase.
inline std::complex<double> ylm(int l, int m, double theta, double phi) {
  const int am = std::abs(m);
  const double p = std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(am), theta);
  const std::complex<double> e = std::polar(1.0, am * phi);
  if (m >= 0) return p * e;
  return ((am % 2) ? -1.0 : 1.0) * p * std::conj(e);
}

/// ⟨l2, m| cos²θ |l, m⟩ by Gauss–Legendre in x = cosθ; the integrand is a polynomial there.
inline double cos2(int l, int l2, int m) {
  using Rule = boost::math::quadrature::gauss<double, 30>;
  auto f = [&](double x) {
    const double theta = std::acos(x);
    return 2.0 * std::numbers::pi * x * x *
           std::sph_legendre(static_cast<unsigned>(l), static_cast<unsigned>(std::abs(m)), theta) *
           std::sph_legendre(static_cast<unsigned>(l2), static_cast<unsigned>(std::abs(m)), theta);
  };
  return Rule::integrate(f, -1.0, 1.0);
}

/// Brute-force ∫_{-1}^{1} ρ(-(B/2)u)(1-|u|) du by composite Simpson.
inline double triangular(const std::function<double(double)>& rho, double B, int intervals = 200000) {
  auto f = [&](double u) { return rho(-0.5 * B * u) * (1.0 - std::abs(u)); };
  auto simpson = [&](double a, double b) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return s * h / 3.0;
  };
  return simpson(-1.0, 0.0) + simpson(0.0, 1.0);
}

/// ∫_{S³} f dΩ by nested 40-point Gauss–Legendre in the hyperspherical angles.
template <class F>
std::complex<double> s3_integrate(F&& f) {
  using Rule = boost::math::quadrature::gauss<double, 40>;
  const double pi = std::numbers::pi;
  std::complex<double> total{};
  // integrate real and imaginary parts separately; Boost's rule is real-valued
  for (int part = 0; part < 2; ++part) {
    const double v = Rule::integrate(
        [&](double chi) {
          return Rule::integrate(
              [&](double th) {
                return Rule::integrate(
                    [&](double ph) {
                      const double w[4] = {std::sin(chi) * std::sin(th) * std::cos(ph),
                                           std::sin(chi) * std::sin(th) * std::sin(ph), std::sin(chi) * std::cos(th),
                                           std::cos(chi)};
                      const std::complex<double> z = f(w);
                      return (part == 0 ? z.real() : z.imag()) * std::sin(chi) * std::sin(chi) * std::sin(th);
                    },
                    0.0, 2 * pi);
              },
              0.0, pi);
        },
        0.0, pi);
    total += part == 0 ? std::complex<double>(v, 0.0) : std::complex<double>(0.0, v);
  }
  return total;
}

/// (L̃₃^m f)(ω) for f(ω) = g(R_t ω) trigonometric of degree ≤ deg in t, where R_t
/// rotates the (ω₁, ω₂) plane: L̃₃ = -i d/dt, so its powers act on Fourier modes.
template <class G>
std::complex<double> l3_power_by_fourier(G&& g_of_t, int deg, int m) {
  const int n = 2 * deg + 1;
  std::complex<double> out{};
  for (int k = -deg; k <= deg; ++k) {
    std::complex<double> c{};
    for (int j = 0; j < n; ++j) {
      const double t = 2 * std::numbers::pi * j / n;
      c += g_of_t(t) * std::polar(1.0, -k * t);
    }
    c /= static_cast<double>(n);
    out += std::pow(static_cast<double>(k), m) * c;
  }
  return out;
}

}  // namespace oracle
