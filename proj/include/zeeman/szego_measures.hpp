#pragma once

// Right-hand sides of the Szegő-type limit: the triangular density, the
// null-quadric average and the reduced geodesic-space density, plus the Haar
// normalization in angle coordinates.

#include <cstdint>
#include <string>
#include <vector>

#include "zeeman/execution.hpp"

namespace zeeman {

class TestFunction {
 public:
  enum class Kind { monomial, polynomial, tabulated };

  static constexpr int kMaxMonomialDegree = 12;

  /// x^degree, 0 ≤ degree ≤ 12.
  static TestFunction monomial(int degree);
  /// Σ c_k x^k.
  static TestFunction polynomial(std::vector<double> coefficients);
  /// Piecewise linear through (x_i, y_i), x strictly increasing, constant beyond the ends.
  static TestFunction tabulated(std::vector<double> x, std::vector<double> y);
  /// "1", "x", "x^k", "poly:c0,c1,...", "table:x0:y0,x1:y1,...".
  static TestFunction parse(const std::string& text);

  double operator()(double x) const;
  /// x ↦ ρ(c x).
  TestFunction rescaled(double c) const;

  Kind kind() const noexcept { return kind_; }
  /// Polynomial degree, -1 for tables.
  int degree() const;
  /// Points where ρ may fail to be smooth (table abscissae mapped through the scale).
  std::vector<double> breakpoints() const;
  /// Round-trips through parse (for rescaled functions the scale is appended as "@c").
  std::string describe() const;

 private:
  Kind kind_ = Kind::monomial;
  std::vector<double> coefficients_;
  std::vector<double> table_x_, table_y_;
  double scale_ = 1.0;
  std::string text_;
};

/// ∫_{-1}^{1} ρ(-(B/2)u)(1-|u|) du, adaptive Gauss–Kronrod on [-1,0] and [0,1].
double rhs_triangular(const TestFunction& rho, double B);

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

/// Mean of ρ(-(B/2) ℓ₃(α)) over α drawn from the invariant measure on 𝒜.
/// Block b of kSampleBlock draws uses RandomStream(seed, b); block statistics
/// are merged in block order.
McEstimate rhs_quadric_mc(const TestFunction& rho, double B, std::size_t n_samples, std::uint64_t seed,
                          Execution exec = Execution::parallel);

/// ∫∫ ρ(-(B/2) cosψ cosθ) cosψ sinψ sinθ dψ dθ over (0,π/2)×(0,π).
double rhs_angle_density(const TestFunction& rho, double B, Execution exec = Execution::parallel);

struct PushforwardResult {
  std::size_t n = 0;
  std::size_t skipped = 0;
  /// max |ℓ₃(x,p) + ℓ₃(α)| over kept samples (the map reverses the sign, see README).
  double max_pointwise_error = 0.0;
  /// KS distance between the law of ℓ₃(x,p) and that of -ℓ₃(α) on the same samples.
  double ks_vs_alpha = 0.0;
  double ks_vs_triangular = 0.0;
};

/// Samples α, maps through ℳ⁻¹∘σ and compares ℓ₃ on Σ(-1/2). Samples with
/// 1 - ω₄ ≤ 1e-12 are skipped and counted.
PushforwardResult liouville_pushforward_check(std::size_t n_samples, std::uint64_t seed,
                                              Execution exec = Execution::parallel);

struct AngleState {
  double psi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
  double delta = 0.0;
};

/// Haar density cos²ψ sinψ sinθ / ((2π)⁴ (1 + sinψ cosβ)).
double haar_density(const AngleState& s);
/// Reduced density cosψ sinψ sinθ on (ψ, θ).
double geodesic_density(double psi, double theta);

struct HaarGridSpec {
  int n_psi = 48;
  int n_theta = 4;
  int n_phi = 2;
  int n_gamma = 2;
  int n_beta = 64;
  int n_delta = 2;
};

struct HaarResult {
  double value = 0.0;
  double min_density = 0.0;
  HaarGridSpec spec;
};

/// Tensor rule: Gauss–Legendre in ψ and cosθ, trapezoid in φ, γ, β, δ.
HaarResult haar_density_normalization(const HaarGridSpec& spec, Execution exec = Execution::parallel);
/// Doubles n_beta from `start` (ψ is resolved long before β near ψ = π/2) until two successive values differ by ≤ tol.
HaarResult haar_density_normalization(double tol = 1e-7, const HaarGridSpec& start = {},
                                      Execution exec = Execution::parallel);

/// ∫₀^{2π} dβ / (1 + sinψ cosβ) by the trapezoid rule, doubling until converged to 1e-13.
double beta_marginal(double psi);

}  // namespace zeeman
