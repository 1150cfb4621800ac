#pragma once

// Degenerate hydrogen shells in the scaled frame S_V = -½Δ - 1/|x|, and the
// restriction of the Zeeman perturbation
//   W(λ) = (λ²/8)(x₁² + x₂²) - (λ/2) L₃
// to one shell or to a band of neighbouring shells.

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "zeeman/execution.hpp"

namespace zeeman {

/// Labels (N; l, m) of one state in the shell with principal quantum number n = N + 1.
struct ShellState {
  int N = 0;
  int l = 0;
  int m = 0;

  friend bool operator==(const ShellState&, const ShellState&) = default;
};

std::size_t shell_dimension(int N);

/// All (N+1)² states of shell N, ascending m then ascending l.
std::vector<ShellState> enumerate_shell(int N);

/// E_N = -1/(2(N+1)²).
double shell_energy(int N);

/// Weak-field schedule h = 1/(N+1), ε(h) = h^q, λ = h³ ε(h) B.
struct ScalingSchedule {
  double B = 1.0;
  double q = 17.0;
  /// Test/diagnostic switch: drop the (λ²/8)ρ² term of W.
  bool diamagnetic = true;

  double h(int N) const;
  double epsilon(int N) const;
  double lambda(int N) const;
  /// h² ε(h): the unit in which eigenvalue shifts are reported as scaled shifts.
  double shift_unit(int N) const;
  /// λ²/(8 h² ε) = h⁴ ε B² / 8, coefficient of ρ² in W/(h²ε).
  double scaled_diamagnetic_coefficient(int N) const;
  /// λ/(2 h² ε) = h B / 2, coefficient of -L₃ in W/(h²ε).
  double scaled_paramagnetic_coefficient(int N) const;
};

/// One azimuthal block: rows/columns offset..offset+size-1 of the full matrix.
struct MBlock {
  int m = 0;
  std::size_t offset = 0;
  Eigen::MatrixXd matrix;
};

/// Shell-restricted operator commuting with L₃, stored as its m-blocks.
struct ShellMatrix {
  int N = 0;
  std::vector<ShellState> states;
  std::vector<MBlock> blocks;

  std::size_t dimension() const noexcept { return states.size(); }
  /// Entry (i, j) in ShellState ordering; zero between different m.
  double operator()(std::size_t i, std::size_t j) const;
  const MBlock& block(int m) const;
  Eigen::MatrixXd dense() const;
  /// Largest |eigenvalue| over all blocks.
  double operator_norm() const;
};

/// ∫₀^∞ R_{n,l}(r) r² R_{n2,l2}(r) r² dr with unit-charge radial functions.
/// Gauss–Laguerre with the node count doubled until the value is stable to
/// 1e-10 relative to the Cauchy–Schwarz bound sqrt(⟨r²⟩_{nl} ⟨r²⟩_{n2 l2}).
double radial_integral_r2(int n, int l, int n2, int l2);
inline double radial_integral_r2(int n, int l, int l2) { return radial_integral_r2(n, l, n, l2); }

/// ⟨l2, m| cos²θ |l, m⟩ from the ladder cosθ Y_{l,m} = c_{l,m} Y_{l+1,m} + c_{l-1,m} Y_{l-1,m}.
double angular_cos2_element(int l, int l2, int m);

ShellMatrix shell_matrix_L3(int N);
ShellMatrix shell_matrix_rho2(int N, Execution exec = Execution::parallel);

/// W(λ) restricted to shell N, with λ from the schedule.
ShellMatrix shell_matrix_W(int N, const ScalingSchedule& schedule,
                           Execution exec = Execution::parallel);
/// W(λ)/(h²ε): same matrix in the units of scaled shifts. Avoids the
/// astronomically small prefactors of the unscaled form at large q.
ShellMatrix shell_matrix_W_scaled(int N, const ScalingSchedule& schedule,
                                  Execution exec = Execution::parallel);

/// Labels of one state in a multishell band.
struct BandState {
  int shell = 0;  // N'
  int l = 0;
  int m = 0;
};

enum class BandFrame {
  absolute,  // S_V + W(λ)
  shifted,   // S_V + W(λ) - E_N
  scaled,    // (S_V + W(λ) - E_N) / (h²ε)
};

/// S_V + W(λ) on shells N-Δ..N+Δ, block diagonal in m. Inside a block the
/// states are ordered by shell, then l.
struct BandMatrix {
  int N = 0;
  int delta = 0;
  BandFrame frame = BandFrame::absolute;
  std::vector<BandState> states;
  std::vector<MBlock> blocks;

  std::size_t dimension() const noexcept { return states.size(); }
  double operator()(std::size_t i, std::size_t j) const;
  Eigen::MatrixXd dense() const;
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{1} << 30;

BandMatrix multishell_band_matrix(int N, int delta, const ScalingSchedule& schedule,
                                  BandFrame frame = BandFrame::absolute,
                                  std::size_t memory_budget_bytes = kDefaultMemoryBudget,
                                  Execution exec = Execution::parallel);

/// Bytes needed to hold the m-blocks of a band; used for the budget check.
std::size_t band_storage_bytes(int N, int delta);

}  // namespace zeeman
