#include "zeeman/classical_kepler.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "zeeman/errors.hpp"

namespace zeeman {

namespace {

using State = Eigen::Matrix<double, 6, 1>;

State pack(const PhasePoint& pt) {
  State y;
  y << pt.x, pt.p;
  return y;
}

PhasePoint unpack(const State& y) { return {y.head<3>(), y.tail<3>()}; }

double energy_of(const State& y) { return 0.5 * y.tail<3>().squaredNorm() - 1.0 / y.head<3>().norm(); }

State rhs(const State& y, double floor) {
  const Vec3 x = y.head<3>();
  const double r = x.norm();
  if (!(r >= floor)) throw NumericalCollisionError("integrate_kepler: |x| fell below the collision floor");
  State d;
  d.head<3>() = r * y.tail<3>();
  d.tail<3>() = -x / (r * r);
  return d;
}

// Dormand–Prince 5(4); the flow is autonomous so the c_i nodes are not needed
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct StepResult {
  State y;
  double error = 0.0;
};

StepResult dopri_step(const State& y, double h, double floor) {
  const State k1 = rhs(y, floor);
  const State k2 = rhs(y + h * a21 * k1, floor);
  const State k3 = rhs(y + h * (a31 * k1 + a32 * k2), floor);
  const State k4 = rhs(y + h * (a41 * k1 + a42 * k2 + a43 * k3), floor);
  const State k5 = rhs(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), floor);
  const State k6 = rhs(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), floor);
  const State y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
  const State k7 = rhs(y5, floor);
  const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    worst = std::max(worst, std::abs(err[i]));
  }
  // error per unit step: keeps the pericenter passages of eccentric orbits from dominating
  return {y5, worst / std::max(std::abs(h), 1e-300)};
}

// Adaptive integration from s0 to s1; `observe(s, y)` sees every accepted step.
template <class Observer>
State evolve(State y, double s0, double s1, double tol, const KeplerOptions& opt, double& h, std::size_t& rejected,
             Observer&& observe) {
  if (!(tol > 0.0)) throw DomainError("integrate_kepler: tolerance must be positive");
  const double dir = s1 >= s0 ? 1.0 : -1.0;
  double s = s0;
  h = dir * std::min(std::abs(h), std::abs(s1 - s0));
  std::size_t steps = 0;
  while (dir * (s1 - s) > 0.0) {
    if (++steps > opt.max_steps) throw AccuracyError("integrate_kepler: step budget exhausted");
    bool last = false;
    if (dir * (s + h - s1) >= 0.0) {
      h = s1 - s;
      last = true;
    }
    StepResult st;
    bool ok = false;
    try {
      st = dopri_step(y, h, opt.collision_floor);
      ok = st.error <= tol && std::abs(energy_of(st.y) - energy_of(y)) <= 10.0 * tol;
    } catch (const NumericalCollisionError&) {
      // an intermediate stage dipped below the floor; retry smaller unless the step is already tiny
      if (std::abs(h) < 1e-14) throw;
      st.error = 1e10 * tol;
    }
    const double factor = st.error > 0.0 ? 0.9 * std::pow(tol / st.error, 0.2) : 5.0;
    if (ok) {
      y = st.y;
      s = last ? s1 : s + h;
      observe(s, y);
      h *= std::clamp(factor, 0.2, 5.0);
    } else {
      ++rejected;
      h *= std::clamp(factor, 0.1, 0.5);
      if (std::abs(h) < 1e-16 * (1.0 + std::abs(s)))
        throw NumericalCollisionError("integrate_kepler: step size underflow near a collision");
    }
  }
  return y;
}

void check_finite(const PhasePoint& pt, const char* who) {
  if (!pt.x.allFinite() || !pt.p.allFinite()) throw DomainError(std::string(who) + ": non-finite phase point");
}

}  // namespace

KeplerConstants kepler_constants(const PhasePoint& pt) {
  const double r = pt.x.norm();
  if (!(r > 0.0)) throw SingularityError("kepler_constants: |x| = 0");
  KeplerConstants k;
  k.energy = 0.5 * pt.p.squaredNorm() - 1.0 / r;
  k.ell = pt.x.cross(pt.p);
  k.rl = pt.p.cross(k.ell) - pt.x / r;
  return k;
}

SpherePoint moser_forward(const PhasePoint& pt) {
  const Vec3 y = -pt.x;
  const double p2 = pt.p.squaredNorm();
  const double yp = y.dot(pt.p);
  SpherePoint sp;
  sp.omega.head<3>() = (2.0 / (p2 + 1.0)) * pt.p;
  sp.omega[3] = (p2 - 1.0) / (p2 + 1.0);
  sp.xi.head<3>() = 0.5 * (p2 + 1.0) * y - yp * pt.p;
  sp.xi[3] = yp;
  return sp;
}

PhasePoint moser_inverse(const SpherePoint& sp) {
  const double d = 1.0 - sp.omega[3];
  if (!(d > 0.0)) throw NorthPoleError("moser_inverse: omega is the north pole");
  PhasePoint pt;
  pt.p = sp.omega.head<3>() / d;
  const Vec3 y = d * sp.xi.head<3>() + sp.xi[3] * sp.omega.head<3>();
  pt.x = -y;
  return pt;
}

double symplectic_check(const PhasePoint& pt, double radius, RandomStream& rng, int loops, int segments) {
  if (radius < 0.0) throw DomainError("symplectic_check: loop radius must be non-negative");
  if (loops < 1 || segments < 3) throw DomainError("symplectic_check: need loops >= 1 and segments >= 3");
  check_finite(pt, "symplectic_check");
  if (radius == 0.0) return 0.0;
  using V6 = Eigen::Matrix<double, 6, 1>;
  const V6 z0 = pack(pt);
  double worst = 0.0;
  for (int loop = 0; loop < loops; ++loop) {
    V6 e1, e2;
    for (;;) {
      for (int i = 0; i < 6; ++i) e1[i] = rng.normal();
      for (int i = 0; i < 6; ++i) e2[i] = rng.normal();
      const double n1 = e1.norm();
      if (n1 < 1e-8) continue;
      e1 /= n1;
      e2 -= e2.dot(e1) * e1;
      const double n2 = e2.norm();
      if (n2 < 1e-8) continue;
      e2 /= n2;
      break;
    }
    auto at = [&](double t) { return unpack(z0 + radius * (std::cos(t) * e1 + std::sin(t) * e2)); };
    const double dt = 2.0 * std::numbers::pi / segments;
    double lhs = 0.0, rhs_sum = 0.0;
    PhasePoint prev = at(0.0);
    SpherePoint prev_sp = moser_forward(prev);
    for (int k = 0; k < segments; ++k) {
      const PhasePoint next = at((k + 1) * dt);
      const SpherePoint next_sp = moser_forward(next);
      const PhasePoint mid = at((k + 0.5) * dt);
      const SpherePoint mid_sp = moser_forward(mid);
      lhs += mid_sp.xi.dot(next_sp.omega - prev_sp.omega);
      rhs_sum += (-mid.x).dot(next.p - prev.p);
      prev = next;
      prev_sp = next_sp;
    }
    worst = std::max(worst, std::abs(lhs - rhs_sum));
  }
  return worst;
}

Trajectory integrate_kepler(const PhasePoint& pt0, double s_max, double tol, const KeplerOptions& options) {
  check_finite(pt0, "integrate_kepler");
  if (!(pt0.x.norm() > 0.0)) throw SingularityError("integrate_kepler: |x| = 0");
  Trajectory tr;
  const State y0 = pack(pt0);
  tr.off_shell = std::abs(energy_of(y0) + 0.5) > 1e-9;
  tr.s.push_back(0.0);
  tr.points.push_back(pt0);
  double h = options.initial_step;
  evolve(y0, 0.0, s_max, tol, options, h, tr.rejected_steps, [&](double s, const State& y) {
    tr.s.push_back(s);
    tr.points.push_back(unpack(y));
  });
  return tr;
}

double regularized_period(const PhasePoint& pt0, double tol, const KeplerOptions& options) {
  check_finite(pt0, "regularized_period");
  const KeplerConstants k = kepler_constants(pt0);
  if (k.ell.norm() <= kCollisionEll) throw CollisionOrbitError("regularized_period: collision orbit, angle undefined");
  const Vec3 n = k.ell.normalized();
  const Vec3 u = pt0.x.normalized();
  const Vec3 w = n.cross(u);
  const State y0 = pack(pt0);
  const Vec3 v0 = pt0.x.norm() * pt0.p;

  // march until the in-plane polar angle of x has swept 2π
  double swept = 0.0, last_angle = 0.0, s_found = -1.0;
  State y_found = y0;
  double h = options.initial_step;
  std::size_t rejected = 0;
  struct Found {};
  try {
    evolve(y0, 0.0, 1e6, tol, options, h, rejected, [&](double s, const State& y) {
      const Vec3 x = y.head<3>();
      const double ang = std::atan2(w.dot(x), u.dot(x));
      double d = ang - last_angle;
      if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
      if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
      swept += d;
      last_angle = ang;
      if (std::abs(swept) >= 2.0 * std::numbers::pi) {
        s_found = s;
        y_found = y;
        throw Found{};
      }
    });
  } catch (const Found&) {
  }
  if (s_found < 0.0) throw AccuracyError("regularized_period: orbit did not close");

  // Newton on g(s) = (x(s) - x0)·v0
  double s = s_found;
  State y = y_found;
  for (int iter = 0; iter < 30; ++iter) {
    const Vec3 x = y.head<3>();
    const double g = (x - pt0.x).dot(v0);
    const double dg = (x.norm() * y.tail<3>()).dot(v0);
    const double ds = -g / dg;
    y = evolve(y, s, s + ds, tol, options, h, rejected, [](double, const State&) {});
    s += ds;
    if (std::abs(ds) <= 1e-14 * std::abs(s)) break;
  }
  return s;
}

OrbitElements orbit_elements_from_angles(const OrbitAngles& ang) {
  const double st = std::sin(ang.theta), ct = std::cos(ang.theta);
  const double sp = std::sin(ang.phi), cp = std::cos(ang.phi);
  const Vec3 u_hat(sp, -cp, 0.0);
  const Vec3 v_hat(ct * cp, ct * sp, -st);
  OrbitElements el;
  el.ell = std::cos(ang.psi) * Vec3(st * cp, st * sp, ct);
  el.rl = std::sin(ang.psi) * (std::cos(ang.gamma) * u_hat + std::sin(ang.gamma) * v_hat);
  el.angles = ang;
  return el;
}

PhasePoint orbit_point_from_elements(const OrbitElements& el) {
  const double ell = el.ell.norm();
  if (!(ell > kCollisionEll)) throw CollisionOrbitError("orbit_point_from_elements: |ell| = 0");
  const Vec3 n = el.ell / ell;
  const double a = el.rl.norm();
  Vec3 a_hat;
  if (a > 1e-300) {
    a_hat = el.rl / a;
  } else {
    // circular orbit: the pericenter direction comes from γ
    const auto& g = el.angles;
    const Vec3 u_hat(std::sin(g.phi), -std::cos(g.phi), 0.0);
    const Vec3 v_hat(std::cos(g.theta) * std::cos(g.phi), std::cos(g.theta) * std::sin(g.phi), -std::sin(g.theta));
    a_hat = std::cos(g.gamma) * u_hat + std::sin(g.gamma) * v_hat;
    a_hat -= a_hat.dot(n) * n;
    if (a_hat.norm() < 1e-8) a_hat = n.unitOrthogonal();
    a_hat.normalize();
  }
  const Vec3 b_hat = n.cross(a_hat);
  const double cb = std::cos(el.angles.beta), sb = std::sin(el.angles.beta);
  PhasePoint pt;
  pt.p = (-sb * a_hat + (a + cb) * b_hat) / ell;
  const double r = 2.0 / (pt.p.squaredNorm() + 1.0);
  pt.x = r * (cb * a_hat + sb * b_hat);
  return pt;
}

PhasePoint orbit_point_from_elements(const OrbitAngles& angles) {
  return orbit_point_from_elements(orbit_elements_from_angles(angles));
}

CoherentIndex sample_A(RandomStream& rng) {
  for (;;) {
    Vec4 g1, g2;
    for (int i = 0; i < 4; ++i) g1[i] = rng.normal();
    for (int i = 0; i < 4; ++i) g2[i] = rng.normal();
    const double n1 = g1.norm();
    if (n1 < 1e-12) continue;
    CoherentIndex alpha;
    alpha.a = g1 / n1;
    Vec4 b = g2 - g2.dot(alpha.a) * alpha.a;
    const double nb = b.norm();
    if (nb < 1e-10 * (1.0 + g2.norm())) continue;
    alpha.b = b / nb;
    return alpha;
  }
}

double ell3_alpha(const CoherentIndex& alpha) { return alpha.a[0] * alpha.b[1] - alpha.a[1] * alpha.b[0]; }

SpherePoint sigma(const CoherentIndex& alpha) { return {alpha.a, -alpha.b}; }
CoherentIndex sigma_inverse(const SpherePoint& sp) { return {sp.omega, -sp.xi}; }

std::vector<double> sample_ell3(std::size_t count, std::uint64_t seed, Execution exec) {
  std::vector<double> out(count);
  const std::size_t blocks = (count + kSampleBlock - 1) / kSampleBlock;
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    RandomStream rng(seed, static_cast<std::uint64_t>(b));
    const std::size_t lo = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t hi = std::min(count, lo + kSampleBlock);
    for (std::size_t i = lo; i < hi; ++i) out[i] = ell3_alpha(sample_A(rng));
  }
  return out;
}

}  // namespace zeeman
