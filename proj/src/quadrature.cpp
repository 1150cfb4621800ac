#include "zeeman/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

#include "zeeman/errors.hpp"

namespace zeeman::quadrature {

namespace {

constexpr double kRescaleThreshold = 1e150;

// Rescaled three-term recurrence; returns (L_k, L_{k-1}) sharing one log-scale.
struct LaguerrePair {
  double current = 1.0;
  double previous = 0.0;
  double log_scale = 0.0;
};

LaguerrePair laguerre_pair(int k, double alpha, double t) {
  LaguerrePair r;
  if (k == 0) return r;
  r.previous = 1.0;
  r.current = 1.0 + alpha - t;
  for (int j = 1; j < k; ++j) {
    const double next =
        ((2.0 * j + 1.0 + alpha - t) * r.current - (j + alpha) * r.previous) / (j + 1.0);
    r.previous = r.current;
    r.current = next;
    if (std::abs(r.current) > kRescaleThreshold) {
      r.current /= kRescaleThreshold;
      r.previous /= kRescaleThreshold;
      r.log_scale += std::log(kRescaleThreshold);
    }
  }
  return r;
}

}  // namespace

ScaledValue laguerre_scaled(int k, double alpha, double t) {
  const auto pair = laguerre_pair(k, alpha, t);
  return {pair.current, pair.log_scale};
}

Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw DomainError("gauss_legendre: need at least one node");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // final derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (std::size_t j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

Rule gauss_legendre(std::size_t n, double a, double b) {
  Rule rule = gauss_legendre(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

Rule gauss_laguerre_scaled(std::size_t n) {
  if (n == 0) throw DomainError("gauss_laguerre_scaled: need at least one node");
  // Golub–Welsch for starting nodes, then Newton polish on L_n.
  Eigen::VectorXd diag(n), sub(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) sub[k] = k + 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);

  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int ni = static_cast<int>(n);
  for (std::size_t i = 0; i < n; ++i) {
    double u = solver.eigenvalues()[static_cast<Eigen::Index>(i)];
    for (int iter = 0; iter < 8; ++iter) {
      const auto pr = laguerre_pair(ni, 0.0, u);
      // L_n'(u) = n (L_n - L_{n-1}) / u; the shared scale cancels.
      const double deriv = ni * (pr.current - pr.previous) / u;
      const double du = pr.current / deriv;
      u -= du;
      if (std::abs(du) <= 1e-15 * u) break;
    }
    // Christoffel form: w_i = 1 / Σ_{k<n} L_k(u_i)², the L_k being orthonormal for e^{-u}.
    double prev = 0.0, cur = 1.0, log_scale = 0.0, sum_sq = 1.0;
    for (int j = 0; j + 1 < ni; ++j) {
      const double next = ((2.0 * j + 1.0 - u) * cur - j * prev) / (j + 1.0);
      prev = cur;
      cur = next;
      sum_sq += cur * cur;
      if (std::abs(cur) > kRescaleThreshold) {
        cur /= kRescaleThreshold;
        prev /= kRescaleThreshold;
        sum_sq /= kRescaleThreshold * kRescaleThreshold;
        log_scale += std::log(kRescaleThreshold);
      }
    }
    rule.nodes[i] = u;
    rule.weights[i] = std::exp(u - 2.0 * log_scale) / sum_sq;
  }
  return rule;
}

Rule gauss_chebyshev_u(std::size_t n) {
  if (n == 0) throw DomainError("gauss_chebyshev_u: need at least one node");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t k = 1; k <= n; ++k) {
    const double angle = std::numbers::pi * k / (n + 1.0);
    const double s = std::sin(angle);
    rule.nodes[n - k] = std::cos(angle);
    rule.weights[n - k] = std::numbers::pi / (n + 1.0) * s * s;
  }
  return rule;
}

Rule periodic_trapezoid(std::size_t n, double period) {
  if (n == 0) throw DomainError("periodic_trapezoid: need at least one node");
  Rule rule;
  rule.nodes.resize(n);
  rule.weights.assign(n, period / n);
  for (std::size_t k = 0; k < n; ++k) rule.nodes[k] = period * k / n;
  return rule;
}

}  // namespace zeeman::quadrature
