#pragma once

// Coherent states Φ_{α,N} = a(N) (α·ω)^N on S³ and their momentum-space
// counterparts.

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "zeeman/classical_kepler.hpp"
#include "zeeman/execution.hpp"

namespace zeeman {

using cplx = std::complex<double>;
using CVec4 = Eigen::Matrix<cplx, 4, 1>;

/// Hyperspherical product rule, ω = (sinχ sinθ cosφ, sinχ sinθ sinφ, sinχ cosθ, cosχ).
struct QuadratureSpec {
  int n_chi = 8;
  int n_theta = 8;
  int n_phi = 16;

  /// Largest total degree D such that every polynomial in ω of degree ≤ D is integrated exactly.
  int exactness_degree() const;
  /// Sizing for integrands of degree 2N + 2m: polar counts N+m+4, azimuth 2N+2m+8.
  static QuadratureSpec for_degree(int N, int m);
};

struct S3Grid {
  std::vector<Vec4> nodes;
  std::vector<double> weights;
  QuadratureSpec spec;
};

S3Grid make_s3_grid(const QuadratureSpec& spec);

/// Σ w f(ω) over the grid; node values may be computed in parallel, the sum is in node order.
cplx s3_quadrature(const std::function<cplx(const Vec4&)>& f, const S3Grid& grid,
                   Execution exec = Execution::parallel);
cplx s3_quadrature(const std::function<cplx(const Vec4&)>& f, const QuadratureSpec& spec,
                   Execution exec = Execution::parallel);

/// a(N) with a(N)² = (N+1)/(2π²).
double a_N(int N);
/// ∫_{S³} |α·ω|^{2N} dΩ by quadrature (closed form 2π²/(N+1)).
double coherent_norm_integral(const CoherentIndex& alpha, int N, const S3Grid& grid);

CVec4 complex_alpha(const CoherentIndex& alpha);

/// ⟨Φ_{α,N}, (h B̃ L̃₃)^m Φ_{α,N}⟩, B̃ = -B/2, h = 1/(N+1); complex so that the
/// imaginary residue can be inspected.
cplx expectation_L3_power_complex(const CoherentIndex& alpha, int N, int m, double B, const S3Grid& grid);
double expectation_L3_power(const CoherentIndex& alpha, int N, int m, double B);

struct ConvergenceRow {
  int N = 0;
  double value = 0.0;
  double error = 0.0;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares slope of log error against log N; NaN if any error is 0.
  double slope = 0.0;
};

ConvergenceTable prop51_convergence(const CoherentIndex& alpha, int m, double B, const std::vector<int>& N_list);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

struct ResolutionResult {
  /// max |M_ij - δ_ij| with M = d_N · mean(c c†), c_i = ⟨Y_i, Φ_α⟩.
  double deviation = 0.0;
  double trace = 0.0;
  std::size_t dimension = 0;
  std::size_t samples = 0;
};

ResolutionResult resolution_of_identity_check(int N, std::size_t n_samples, std::uint64_t seed,
                                              Execution exec = Execution::parallel);

/// Real orthonormal basis of degree-N harmonic polynomials on S³, as
/// coefficient rows over the degree-N monomials `monomials`.
struct HarmonicBasis {
  std::vector<std::array<int, 4>> monomials;
  Eigen::MatrixXd coefficients;  // (N+1)² × #monomials
  double gram_deviation = 0.0;
};

HarmonicBasis harmonic_basis(int N);

struct MomentumNormResult {
  double deviation = 0.0;  // ‖Ψ̂‖² - 1
  double median_scaled_radius = 0.0;  // median of |p|(N+1) under |Ψ̂|²
};

/// ‖Ψ̂_{α,N}‖² by a product rule in p-space: |p|(N+1) = tan u with Gauss–Legendre
/// in u ∈ (0, π/2), Gauss–Legendre in cosθ, trapezoid in φ.
MomentumNormResult momentum_norm_check(const CoherentIndex& alpha, int N, int radial_nodes = 0);

}  // namespace zeeman
