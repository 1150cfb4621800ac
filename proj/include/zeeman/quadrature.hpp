#pragma once

#include <cstddef>
#include <vector>

namespace zeeman::quadrature {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

/// n-point Gauss–Legendre rule on [-1, 1]; exact for polynomials of degree 2n-1.
Rule gauss_legendre(std::size_t n);
/// Same rule mapped affinely to [a, b].
Rule gauss_legendre(std::size_t n, double a, double b);

/// Gauss–Laguerre rule for ∫₀^∞ e^{-u} f(u) du, returned with the weights
/// multiplied by e^{u_i}. Integrate g directly as Σ w_i g(u_i) where g already
/// carries its own exponential decay; the plain weights underflow for n ≳ 150.
Rule gauss_laguerre_scaled(std::size_t n);

/// Gauss–Chebyshev rule of the second kind: ∫_{-1}^{1} sqrt(1-x²) f(x) dx,
/// exact for polynomials of degree 2n-1.
Rule gauss_chebyshev_u(std::size_t n);

/// n-point trapezoid rule on [0, period) for periodic integrands; exact for
/// trigonometric polynomials of degree < n.
Rule periodic_trapezoid(std::size_t n, double period);

/// Value and log-scale of the generalized Laguerre polynomial L_k^α(t):
/// L = mantissa * exp(log_scale). Stable for large k and t.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;
};
ScaledValue laguerre_scaled(int k, double alpha, double t);

}  // namespace zeeman::quadrature
