#pragma once

// Eigenvalue clusters split off E_N by the Zeeman perturbation, their scaled
// shift distributions and sub-cluster structure.

#include <functional>
#include <map>
#include <vector>

#include "zeeman/execution.hpp"
#include "zeeman/hydrogenic_shell.hpp"

namespace zeeman {

enum class ClusterMode { first_order, multishell };

struct ClusterOptions {
  ClusterMode mode = ClusterMode::first_order;
  int delta = 2;
  std::size_t memory_budget_bytes = kDefaultMemoryBudget;
  Execution exec = Execution::parallel;
};

struct ClusterSpectrum {
  int N = 0;
  ScalingSchedule schedule;
  /// ν_{N,j} = E_{N,j} - E_N, ascending.
  std::vector<double> shifts;
  /// ν / (h²ε), same order as shifts.
  std::vector<double> scaled_shifts;
  /// m-block each eigenvalue was computed in.
  std::vector<int> block_m;
  /// Nearest-center sub-cluster label per shift; empty when B = 0 or the
  /// assignment is ambiguous.
  std::vector<int> subcluster_of;
  /// λ² N⁴ / (8 h²ε): how far the diamagnetic term may push scaled shifts
  /// outside [-B/2, B/2].
  double support_excess_bound = 0.0;
  /// Multishell only: eigenvalues found inside Γ_N and its radius (unscaled).
  std::size_t contour_count = 0;
  double contour_radius = 0.0;
};

ClusterSpectrum cluster_eigenvalues(int N, const ScalingSchedule& schedule,
                                    const ClusterOptions& options = {});

/// Radius of the circle Γ_N around E_N: a quarter of the nearest shell gap.
double contour_radius(int N);

struct EmpiricalPoint {
  double value = 0.0;
  double weight = 0.0;
};

struct EmpiricalMeasure {
  std::vector<EmpiricalPoint> points;

  double total_weight() const;
  /// Σ w f(x).
  double integrate(const std::function<double(double)>& f) const;
};

EmpiricalMeasure scaled_shift_measure(const ClusterSpectrum& spectrum);

/// Center -(B/2) m / (N+1) of sub-cluster m in scaled units.
double subcluster_center(int N, double B, int m);
/// Radius (B/8)/(N+1) within which every member must lie.
double subcluster_radius(int N, double B);

/// Scaled shifts grouped by nearest center, keyed by m. Throws
/// SubclusterOverlapError when a shift is not strictly inside its circle.
std::map<int, std::vector<double>> subcluster_assignment(const ClusterSpectrum& spectrum);

/// max_j |scaled_shift_j - center(m_j)| over the nearest-center assignment.
double max_center_distance(const ClusterSpectrum& spectrum);

/// (1/(N+1)²) Σ_m (N+1-|m|) ρ(-(B/2) m/(N+1)).
double trace_average(int N, double B, const std::function<double(double)>& rho);

/// Σ_{m=-(N+1)}^{N} (1 - |m|/(N+1)) ρ(-(B/2) m/(N+1)) / (N+1).
double riemann_sum_limit(int N, double B, const std::function<double(double)>& rho);

/// Right-continuous reference distribution function. Discontinuities must be
/// listed in `jumps` with `left_limit` supplied; continuous laws leave both empty.
struct ReferenceCdf {
  std::function<double(double)> cdf;
  std::function<double(double)> left_limit;
  std::vector<double> jumps;

  double left(double x) const { return left_limit ? left_limit(x) : cdf(x); }

  /// Law of -(B/2)u with density (1-|u|) on [-1, 1], i.e. triangular on [-c, c], c = B/2.
  static ReferenceCdf triangular(double half_width);
  static ReferenceCdf from_measure(const EmpiricalMeasure& measure);
};

/// sup |F_emp - F_ref| over atoms of either measure and their left limits.
double ks_distance(const EmpiricalMeasure& measure, const ReferenceCdf& reference);

}  // namespace zeeman
