#include "zeeman/spectral_cluster.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <string>

#include "zeeman/errors.hpp"

namespace zeeman {

ClusterSeparationError::ClusterSeparationError(std::size_t found, std::size_t expected)
    : Error("cluster separation failed: " + std::to_string(found) + " eigenvalues inside the contour, expected " +
            std::to_string(expected)),
      found_(found),
      expected_(expected) {}

SubclusterOverlapError::SubclusterOverlapError(double scaled_shift, double distance, double radius)
    : Error("sub-cluster overlap: scaled shift " + std::to_string(scaled_shift) + " lies " +
            std::to_string(distance) + " from its center, radius " + std::to_string(radius)),
      scaled_shift_(scaled_shift),
      distance_(distance) {}

namespace {

struct BlockEigen {
  int m = 0;
  std::vector<double> scaled;
};

std::vector<BlockEigen> first_order_blocks(int N, const ScalingSchedule& schedule, Execution exec) {
  const ShellMatrix W = shell_matrix_W_scaled(N, schedule, exec);
  std::vector<BlockEigen> out(W.blocks.size());
  const long nb = static_cast<long>(W.blocks.size());
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    const auto& blk = W.blocks[static_cast<std::size_t>(b)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk.matrix, Eigen::EigenvaluesOnly);
    out[b].m = blk.m;
    out[b].scaled.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  }
  return out;
}

// Shell-N eigenvalues of one scaled band block through the Schur complement
//   S(z) = A - C (D - z)^{-1} Cᵀ,  z = eigenvalue of S(z),
// solved by fixed-point iteration per eigenvalue. The large shell gaps sit in
// D, so A keeps its O(1) entries and no precision is lost to E_N.
std::vector<double> feshbach_eigenvalues(const Eigen::MatrixXd& block, const std::vector<Eigen::Index>& inner,
                                         const std::vector<Eigen::Index>& outer) {
  const auto ni = static_cast<Eigen::Index>(inner.size());
  const auto no = static_cast<Eigen::Index>(outer.size());
  if (ni == 0) return {};
  Eigen::MatrixXd A(ni, ni), C(ni, no), D(no, no);
  for (Eigen::Index i = 0; i < ni; ++i) {
    for (Eigen::Index j = 0; j < ni; ++j) A(i, j) = block(inner[i], inner[j]);
    for (Eigen::Index j = 0; j < no; ++j) C(i, j) = block(inner[i], outer[j]);
  }
  for (Eigen::Index i = 0; i < no; ++i)
    for (Eigen::Index j = 0; j < no; ++j) D(i, j) = block(outer[i], outer[j]);

  auto schur = [&](double z) -> Eigen::MatrixXd {
    if (no == 0) return A;
    Eigen::MatrixXd Dz = D;
    Dz.diagonal().array() -= z;
    const Eigen::MatrixXd X = Dz.ldlt().solve(C.transpose());
    Eigen::MatrixXd S = A - C * X;
    return 0.5 * (S + S.transpose());
  };

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(schur(0.0), Eigen::EigenvaluesOnly);
  std::vector<double> values(es.eigenvalues().data(), es.eigenvalues().data() + ni);
  if (no == 0) return values;
  for (Eigen::Index j = 0; j < ni; ++j) {
    double z = values[j];
    for (int iter = 0; iter < 50; ++iter) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ej(schur(z), Eigen::EigenvaluesOnly);
      const double next = ej.eigenvalues()[j];
      const bool done = std::abs(next - z) <= 1e-14 * (1.0 + std::abs(z));
      z = next;
      if (done) break;
    }
    values[j] = z;
  }
  std::sort(values.begin(), values.end());
  return values;
}

std::vector<BlockEigen> multishell_blocks(int N, const ScalingSchedule& schedule, const ClusterOptions& options,
                                          std::size_t& count) {
  const BandMatrix band =
      multishell_band_matrix(N, options.delta, schedule, BandFrame::scaled, options.memory_budget_bytes, options.exec);
  const double unit = schedule.shift_unit(N);
  const double radius = contour_radius(N);
  std::vector<BlockEigen> out(band.blocks.size());
  std::vector<std::size_t> inside(band.blocks.size(), 0);
  const long nb = static_cast<long>(band.blocks.size());
#pragma omp parallel for schedule(dynamic) if (options.exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    const auto& blk = band.blocks[static_cast<std::size_t>(b)];
    // counting happens in the E_N-shifted frame
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(blk.matrix * unit, Eigen::EigenvaluesOnly);
    inside[b] = static_cast<std::size_t>((es.eigenvalues().array().abs() < radius).count());

    std::vector<Eigen::Index> inner, outer;
    for (Eigen::Index i = 0; i < blk.matrix.rows(); ++i) {
      const auto& s = band.states[blk.offset + static_cast<std::size_t>(i)];
      (s.shell == N ? inner : outer).push_back(i);
    }
    out[b].m = blk.m;
    out[b].scaled = feshbach_eigenvalues(blk.matrix, inner, outer);
  }
  count = std::accumulate(inside.begin(), inside.end(), std::size_t{0});
  return out;
}

int nearest_m(int N, double B, double scaled) {
  const long m = std::lround(-scaled * 2.0 * (N + 1) / B);
  return static_cast<int>(std::clamp<long>(m, -N, N));
}

}  // namespace

double contour_radius(int N) { return 0.25 * (shell_energy(N + 1) - shell_energy(N)); }

ClusterSpectrum cluster_eigenvalues(int N, const ScalingSchedule& schedule, const ClusterOptions& options) {
  if (N < 1) throw DomainError("cluster_eigenvalues: N must be at least 1");
  if (options.mode == ClusterMode::multishell && options.delta < 0)
    throw DomainError("cluster_eigenvalues: band half-width must be non-negative");

  ClusterSpectrum spec;
  spec.N = N;
  spec.schedule = schedule;
  const double unit = schedule.shift_unit(N);
  const double nn = static_cast<double>(N);
  spec.support_excess_bound = schedule.scaled_diamagnetic_coefficient(N) * nn * nn * nn * nn;

  std::vector<BlockEigen> blocks;
  if (options.mode == ClusterMode::first_order) {
    blocks = first_order_blocks(N, schedule, options.exec);
  } else {
    std::size_t count = 0;
    blocks = multishell_blocks(N, schedule, options, count);
    spec.contour_count = count;
    spec.contour_radius = contour_radius(N);
    if (count != shell_dimension(N)) throw ClusterSeparationError(count, shell_dimension(N));
  }

  std::vector<std::pair<double, int>> all;
  all.reserve(shell_dimension(N));
  for (const auto& b : blocks)
    for (double v : b.scaled) all.emplace_back(v, b.m);
  std::sort(all.begin(), all.end());
  for (const auto& [v, m] : all) {
    spec.scaled_shifts.push_back(v);
    spec.shifts.push_back(v * unit);
    spec.block_m.push_back(m);
  }

  if (schedule.B > 0.0) {
    const double radius = subcluster_radius(N, schedule.B);
    std::vector<int> labels;
    labels.reserve(all.size());
    bool ok = true;
    for (double v : spec.scaled_shifts) {
      const int m = nearest_m(N, schedule.B, v);
      if (std::abs(v - subcluster_center(N, schedule.B, m)) >= radius) {
        ok = false;
        break;
      }
      labels.push_back(m);
    }
    if (ok) spec.subcluster_of = std::move(labels);
  }
  return spec;
}

double EmpiricalMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

double EmpiricalMeasure::integrate(const std::function<double(double)>& f) const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight * f(p.value);
  return s;
}

EmpiricalMeasure scaled_shift_measure(const ClusterSpectrum& spectrum) {
  EmpiricalMeasure mu;
  const double w = 1.0 / static_cast<double>(spectrum.scaled_shifts.size());
  mu.points.reserve(spectrum.scaled_shifts.size());
  for (double v : spectrum.scaled_shifts) mu.points.push_back({v, w});
  return mu;
}

double subcluster_center(int N, double B, int m) { return -0.5 * B * m / (N + 1.0); }
double subcluster_radius(int N, double B) { return B / 8.0 / (N + 1.0); }

std::map<int, std::vector<double>> subcluster_assignment(const ClusterSpectrum& spectrum) {
  const double B = spectrum.schedule.B;
  if (!(B > 0.0)) throw DomainError("subcluster_assignment: needs B > 0");
  const int N = spectrum.N;
  const double radius = subcluster_radius(N, B);
  std::map<int, std::vector<double>> groups;
  for (int m = -N; m <= N; ++m) groups[m];
  for (double v : spectrum.scaled_shifts) {
    const int m = nearest_m(N, B, v);
    const double d = std::abs(v - subcluster_center(N, B, m));
    if (d >= radius) throw SubclusterOverlapError(v, d, radius);
    groups[m].push_back(v);
  }
  return groups;
}

double max_center_distance(const ClusterSpectrum& spectrum) {
  const double B = spectrum.schedule.B;
  double worst = 0.0;
  for (double v : spectrum.scaled_shifts) {
    const double center = B > 0.0 ? subcluster_center(spectrum.N, B, nearest_m(spectrum.N, B, v)) : 0.0;
    worst = std::max(worst, std::abs(v - center));
  }
  return worst;
}

double trace_average(int N, double B, const std::function<double(double)>& rho) {
  if (N < 0) throw DomainError("trace_average: N must be non-negative");
  const double n1 = N + 1.0;
  double s = 0.0;
  for (int m = -N; m <= N; ++m) s += (n1 - std::abs(m)) * rho(-0.5 * B * m / n1);
  return s / (n1 * n1);
}

double riemann_sum_limit(int N, double B, const std::function<double(double)>& rho) {
  if (N < 0) throw DomainError("riemann_sum_limit: N must be non-negative");
  const double n1 = N + 1.0;
  double s = 0.0;
  for (int m = -(N + 1); m <= N; ++m) s += (1.0 - std::abs(m) / n1) * rho(-0.5 * B * m / n1);
  return s / n1;
}

ReferenceCdf ReferenceCdf::triangular(double c) {
  if (c < 0.0) throw DomainError("triangular law needs a non-negative half-width");
  ReferenceCdf ref;
  if (c == 0.0) {
    ref.cdf = [](double x) { return x >= 0.0 ? 1.0 : 0.0; };
    ref.left_limit = [](double x) { return x > 0.0 ? 1.0 : 0.0; };
    ref.jumps = {0.0};
    return ref;
  }
  ref.cdf = [c](double x) {
    if (x <= -c) return 0.0;
    if (x >= c) return 1.0;
    const double t = x / c;
    return t <= 0.0 ? 0.5 * (1.0 + t) * (1.0 + t) : 1.0 - 0.5 * (1.0 - t) * (1.0 - t);
  };
  return ref;
}

namespace {

struct Steps {
  std::vector<double> x;
  std::vector<double> cum;  // F(x_k), ties merged
};

Steps steps_of(const EmpiricalMeasure& mu) {
  std::vector<EmpiricalPoint> pts = mu.points;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  Steps s;
  double acc = 0.0;
  for (const auto& p : pts) {
    acc += p.weight;
    if (!s.x.empty() && s.x.back() == p.value) {
      s.cum.back() = acc;
    } else {
      s.x.push_back(p.value);
      s.cum.push_back(acc);
    }
  }
  // renormalize so F reaches exactly 1 after the last atom
  if (acc > 0.0)
    for (auto& c : s.cum) c /= acc;
  return s;
}

// F(x) and F(x-) of a step function.
double step_at(const Steps& s, double x) {
  const auto it = std::upper_bound(s.x.begin(), s.x.end(), x);
  return it == s.x.begin() ? 0.0 : s.cum[static_cast<std::size_t>(it - s.x.begin()) - 1];
}
double step_before(const Steps& s, double x) {
  const auto it = std::lower_bound(s.x.begin(), s.x.end(), x);
  return it == s.x.begin() ? 0.0 : s.cum[static_cast<std::size_t>(it - s.x.begin()) - 1];
}

}  // namespace

ReferenceCdf ReferenceCdf::from_measure(const EmpiricalMeasure& measure) {
  auto s = std::make_shared<Steps>(steps_of(measure));
  ReferenceCdf ref;
  ref.cdf = [s](double x) { return step_at(*s, x); };
  ref.left_limit = [s](double x) { return step_before(*s, x); };
  ref.jumps = s->x;
  return ref;
}

double ks_distance(const EmpiricalMeasure& measure, const ReferenceCdf& reference) {
  const Steps s = steps_of(measure);
  std::vector<double> xs = s.x;
  xs.insert(xs.end(), reference.jumps.begin(), reference.jumps.end());
  double d = 0.0;
  for (double x : xs) {
    d = std::max(d, std::abs(step_at(s, x) - reference.cdf(x)));
    d = std::max(d, std::abs(step_before(s, x) - reference.left(x)));
  }
  return std::clamp(d, 0.0, 1.0);
}

}  // namespace zeeman
