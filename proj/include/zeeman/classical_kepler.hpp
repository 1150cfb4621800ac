#pragma once

// Kepler problem on the energy surface Σ(-1/2), the Moser map onto T*S³ and
// the null quadric 𝒜 of unit covectors.

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "zeeman/execution.hpp"
#include "zeeman/random.hpp"

namespace zeeman {

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;

struct PhasePoint {
  Vec3 x = Vec3::Zero();
  Vec3 p = Vec3::Zero();
};

struct SpherePoint {
  Vec4 omega = Vec4::Zero();
  Vec4 xi = Vec4::Zero();
};

/// α = a + i b with |a| = |b| = 1, a·b = 0.
struct CoherentIndex {
  Vec4 a = Vec4::Zero();
  Vec4 b = Vec4::Zero();
};

/// ℓ = cosψ (sinθ cosφ, sinθ sinφ, cosθ), a = sinψ (cosγ û + sinγ v̂),
/// β the position along the orbit.
struct OrbitAngles {
  double psi = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double gamma = 0.0;
  double beta = 0.0;
};

struct OrbitElements {
  Vec3 ell = Vec3::Zero();
  Vec3 rl = Vec3::Zero();
  OrbitAngles angles;
};

OrbitElements orbit_elements_from_angles(const OrbitAngles& angles);

struct KeplerConstants {
  double energy = 0.0;
  Vec3 ell = Vec3::Zero();
  Vec3 rl = Vec3::Zero();
};

KeplerConstants kepler_constants(const PhasePoint& pt);

SpherePoint moser_forward(const PhasePoint& pt);
PhasePoint moser_inverse(const SpherePoint& sp);

/// Max over `loops` random loops of radius `radius` through pt of
/// |∮ ξ·dω - ∮ y·dp|, each loop discretized with `segments` chords.
double symplectic_check(const PhasePoint& pt, double radius, RandomStream& rng, int loops = 1, int segments = 16);

struct KeplerOptions {
  double collision_floor = 1e-8;
  std::size_t max_steps = 2'000'000;
  double initial_step = 1e-3;
};

struct Trajectory {
  std::vector<double> s;
  std::vector<PhasePoint> points;
  std::size_t rejected_steps = 0;
  /// Initial energy differs from -1/2 by more than 1e-9; the 2π period claim does not apply.
  bool off_shell = false;

  const PhasePoint& back() const { return points.back(); }
};

/// Regularized flow dx/ds = |x| p, dp/ds = -x/|x|² by an adaptive
/// Dormand–Prince 5(4) pair, from s = 0 to s_max (which may be negative).
Trajectory integrate_kepler(const PhasePoint& pt0, double s_max, double tol, const KeplerOptions& options = {});

/// First regularized return time: s > 0 at which the orbit closes, found by
/// Newton iteration on the along-track offset near one full revolution.
double regularized_period(const PhasePoint& pt0, double tol, const KeplerOptions& options = {});

/// |ℓ| at or below this counts as a collision orbit (cos(π/2) is not 0 in floating point).
inline constexpr double kCollisionEll = 1e-12;

/// Point on the orbit (ℓ, a) at parameter β; lies on Σ(-1/2).
PhasePoint orbit_point_from_elements(const OrbitElements& el);
PhasePoint orbit_point_from_elements(const OrbitAngles& angles);

/// Orthonormalized pair of independent standard Gaussian 4-vectors.
CoherentIndex sample_A(RandomStream& rng);

double ell3_alpha(const CoherentIndex& alpha);

/// σ(α) = (Re α, -Im α).
SpherePoint sigma(const CoherentIndex& alpha);
CoherentIndex sigma_inverse(const SpherePoint& sp);

/// ℓ₃(α) for `count` samples; block b of kSampleBlock draws uses stream (seed, b).
std::vector<double> sample_ell3(std::size_t count, std::uint64_t seed, Execution exec = Execution::parallel);

}  // namespace zeeman
