#include "zeeman/hydrogenic_shell.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>

#include "zeeman/errors.hpp"
#include "zeeman/quadrature.hpp"

namespace zeeman {

namespace {

constexpr double kRadialTolerance = 1e-10;
constexpr int kMaxRadialDoublings = 5;

const quadrature::Rule& laguerre_rule(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<const quadrature::Rule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<const quadrature::Rule>(quadrature::gauss_laguerre_scaled(n));
  return *slot;
}

// log|R_{n,l}(r)| and its sign, R normalized with ∫ R² r² dr = 1.
struct LogRadial {
  double log_abs = -INFINITY;
  double sign = 0.0;
};

LogRadial log_radial(int n, int l, double r) {
  const double t = 2.0 * r / n;
  const auto L = quadrature::laguerre_scaled(n - l - 1, 2.0 * l + 1.0, t);
  if (L.mantissa == 0.0) return {};
  const double log_norm = 1.5 * std::log(2.0 / n) +
                          0.5 * (std::lgamma(n - l) - std::log(2.0 * n) - std::lgamma(n + l + 1.0));
  LogRadial out;
  out.log_abs = log_norm - 0.5 * t + l * std::log(t) + std::log(std::abs(L.mantissa)) + L.log_scale;
  out.sign = L.mantissa > 0 ? 1.0 : -1.0;
  return out;
}

struct RadialSums {
  double value = 0.0;
  double bound = 0.0;  // sqrt(∫R₁²r⁴ ∫R₂²r⁴)
};

RadialSums radial_sums(int n, int l, int n2, int l2, std::size_t nodes) {
  const auto& rule = laguerre_rule(nodes);
  const double c = 1.0 / n + 1.0 / n2;
  double value = 0.0, a11 = 0.0, a22 = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double r = rule.nodes[i] / c;
    const auto R1 = log_radial(n, l, r);
    const auto R2 = log_radial(n2, l2, r);
    const double log_common = std::log(rule.weights[i]) + 4.0 * std::log(r) - std::log(c);
    if (R1.sign != 0.0 && R2.sign != 0.0)
      value += R1.sign * R2.sign * std::exp(log_common + R1.log_abs + R2.log_abs);
    // the diagonal sums below are only a tolerance scale, not exact here
    if (R1.sign != 0.0) a11 += std::exp(log_common + 2.0 * R1.log_abs);
    if (R2.sign != 0.0) a22 += std::exp(log_common + 2.0 * R2.log_abs);
  }
  return {value, std::sqrt(a11 * a22)};
}

void check_shell_labels(int n, int l, const char* what) {
  if (n < 1 || l < 0 || l > n - 1)
    throw DomainError(std::string(what) + ": need 0 <= l <= n-1, got n=" + std::to_string(n) +
                      ", l=" + std::to_string(l));
}

double ladder(int l, int m) {
  // c_{l,m} = sqrt(((l+1)² - m²) / ((2l+1)(2l+3))); vanishes when Y_{l,m} is absent
  if (l < 0 || l < std::abs(m)) return 0.0;
  return std::sqrt(((l + 1.0) * (l + 1.0) - double(m) * m) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}

std::vector<MBlock> empty_blocks(int N) {
  std::vector<MBlock> blocks;
  std::size_t offset = 0;
  for (int m = -N; m <= N; ++m) {
    const auto size = static_cast<Eigen::Index>(N + 1 - std::abs(m));
    blocks.push_back({m, offset, Eigen::MatrixXd::Zero(size, size)});
    offset += static_cast<std::size_t>(size);
  }
  return blocks;
}

template <class Blocks>
std::size_t block_index_of(const Blocks& blocks, std::size_t i) {
  auto it = std::upper_bound(blocks.begin(), blocks.end(), i,
                             [](std::size_t v, const MBlock& b) { return v < b.offset; });
  return static_cast<std::size_t>(std::distance(blocks.begin(), it)) - 1;
}

template <class Blocks>
double block_entry(const Blocks& blocks, std::size_t i, std::size_t j) {
  const auto bi = block_index_of(blocks, i);
  const auto& b = blocks[bi];
  const auto size = static_cast<std::size_t>(b.matrix.rows());
  if (j < b.offset || j >= b.offset + size) return 0.0;
  return b.matrix(static_cast<Eigen::Index>(i - b.offset), static_cast<Eigen::Index>(j - b.offset));
}

template <class Blocks>
Eigen::MatrixXd blocks_to_dense(const Blocks& blocks, std::size_t dim) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (const auto& b : blocks)
    out.block(static_cast<Eigen::Index>(b.offset), static_cast<Eigen::Index>(b.offset), b.matrix.rows(),
              b.matrix.cols()) = b.matrix;
  return out;
}

// Radial ⟨r²⟩ table for one shell: diag[l] = (l,l), up[l] = (l,l+2).
struct ShellRadialTable {
  std::vector<double> diag;
  std::vector<double> up;
};

ShellRadialTable shell_radial_table(int N, Execution exec) {
  const int n = N + 1;
  ShellRadialTable table{std::vector<double>(static_cast<std::size_t>(n)),
                         std::vector<double>(static_cast<std::size_t>(n), 0.0)};
  // warm the rule cache outside the parallel region
  radial_integral_r2(n, 0, 0);
  const bool par = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int l = 0; l <= N; ++l) {
    table.diag[static_cast<std::size_t>(l)] = radial_integral_r2(n, l, l);
    if (l + 2 <= N) table.up[static_cast<std::size_t>(l)] = radial_integral_r2(n, l, l + 2);
  }
  return table;
}

double rho2_angular_factor(int l, int l2, int m) {
  return (l == l2 ? 1.0 : 0.0) - angular_cos2_element(l, l2, m);
}

}  // namespace

std::size_t shell_dimension(int N) {
  if (N < 0) throw DomainError("shell index N must be >= 0");
  return static_cast<std::size_t>(N + 1) * static_cast<std::size_t>(N + 1);
}

std::vector<ShellState> enumerate_shell(int N) {
  std::vector<ShellState> states;
  states.reserve(shell_dimension(N));
  for (int m = -N; m <= N; ++m)
    for (int l = std::abs(m); l <= N; ++l) states.push_back({N, l, m});
  return states;
}

double shell_energy(int N) { return -0.5 / ((N + 1.0) * (N + 1.0)); }

double ScalingSchedule::h(int N) const { return 1.0 / (N + 1.0); }
double ScalingSchedule::epsilon(int N) const { return std::pow(h(N), q); }
double ScalingSchedule::lambda(int N) const { return std::pow(h(N), 3) * epsilon(N) * B; }
double ScalingSchedule::shift_unit(int N) const { return h(N) * h(N) * epsilon(N); }
double ScalingSchedule::scaled_diamagnetic_coefficient(int N) const {
  if (!diamagnetic) return 0.0;
  return std::pow(h(N), 4) * epsilon(N) * B * B / 8.0;
}
double ScalingSchedule::scaled_paramagnetic_coefficient(int N) const { return h(N) * B / 2.0; }

double ShellMatrix::operator()(std::size_t i, std::size_t j) const { return block_entry(blocks, i, j); }

const MBlock& ShellMatrix::block(int m) const {
  if (std::abs(m) > N) throw DomainError("ShellMatrix::block: |m| > N");
  return blocks[static_cast<std::size_t>(m + N)];
}

Eigen::MatrixXd ShellMatrix::dense() const { return blocks_to_dense(blocks, dimension()); }

double ShellMatrix::operator_norm() const {
  double norm = 0.0;
  for (const auto& b : blocks) {
    if (b.matrix.size() == 0) continue;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix, Eigen::EigenvaluesOnly);
    norm = std::max(norm, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return norm;
}

double radial_integral_r2(int n, int l, int n2, int l2) {
  check_shell_labels(n, l, "radial_integral_r2");
  check_shell_labels(n2, l2, "radial_integral_r2");
  const int dl = std::abs(l - l2);
  if (dl != 0 && dl != 2)
    throw DomainError("radial_integral_r2: only |l - l2| in {0, 2} is supported, got l=" +
                      std::to_string(l) + ", l2=" + std::to_string(l2));
  // integrand is e^{-u} times a polynomial of degree n + n2 + 2 in u
  std::size_t nodes = static_cast<std::size_t>(n + n2 + 4) / 2 + 1;
  auto coarse = radial_sums(n, l, n2, l2, nodes);
  for (int k = 0; k < kMaxRadialDoublings; ++k) {
    nodes *= 2;
    const auto fine = radial_sums(n, l, n2, l2, nodes);
    if (std::abs(fine.value - coarse.value) <= kRadialTolerance * fine.bound) return fine.value;
    coarse = fine;
  }
  throw AccuracyError("radial_integral_r2: no 1e-10 stabilization for n=" + std::to_string(n) +
                      ", n2=" + std::to_string(n2));
}

double angular_cos2_element(int l, int l2, int m) {
  if (l < 0 || l2 < 0 || std::abs(m) > std::min(l, l2))
    throw DomainError("angular_cos2_element: need |m| <= min(l, l2)");
  if (l == l2) return ladder(l, m) * ladder(l, m) + ladder(l - 1, m) * ladder(l - 1, m);
  if (std::abs(l - l2) == 2) {
    const int lo = std::min(l, l2);
    return ladder(lo, m) * ladder(lo + 1, m);
  }
  throw DomainError("angular_cos2_element: only |l - l2| in {0, 2} couples through cos²θ");
}

ShellMatrix shell_matrix_L3(int N) {
  ShellMatrix out{N, enumerate_shell(N), empty_blocks(N)};
  for (auto& b : out.blocks) b.matrix.diagonal().setConstant(b.m);
  return out;
}

ShellMatrix shell_matrix_rho2(int N, Execution exec) {
  ShellMatrix out{N, enumerate_shell(N), empty_blocks(N)};
  const auto radial = shell_radial_table(N, exec);
  const bool par = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int bi = 0; bi < static_cast<int>(out.blocks.size()); ++bi) {
    auto& b = out.blocks[static_cast<std::size_t>(bi)];
    const int lmin = std::abs(b.m);
    for (int l = lmin; l <= N; ++l) {
      const auto i = static_cast<Eigen::Index>(l - lmin);
      b.matrix(i, i) = radial.diag[static_cast<std::size_t>(l)] * rho2_angular_factor(l, l, b.m);
      if (l + 2 <= N) {
        const double v = radial.up[static_cast<std::size_t>(l)] * rho2_angular_factor(l, l + 2, b.m);
        b.matrix(i, i + 2) = v;
        b.matrix(i + 2, i) = v;
      }
    }
  }
  return out;
}

namespace {

ShellMatrix combine_W(int N, double dia, double para, bool need_rho2, Execution exec) {
  ShellMatrix out = need_rho2 ? shell_matrix_rho2(N, exec) : ShellMatrix{N, enumerate_shell(N), empty_blocks(N)};
  for (auto& b : out.blocks) {
    b.matrix *= dia;
    b.matrix.diagonal().array() -= para * b.m;
  }
  return out;
}

}  // namespace

ShellMatrix shell_matrix_W(int N, const ScalingSchedule& schedule, Execution exec) {
  const double lambda = schedule.lambda(N);
  const double dia = schedule.diamagnetic ? lambda * lambda / 8.0 : 0.0;
  return combine_W(N, dia, lambda / 2.0, dia != 0.0, exec);
}

ShellMatrix shell_matrix_W_scaled(int N, const ScalingSchedule& schedule, Execution exec) {
  const double dia = schedule.scaled_diamagnetic_coefficient(N);
  return combine_W(N, dia, schedule.scaled_paramagnetic_coefficient(N), dia != 0.0, exec);
}

double BandMatrix::operator()(std::size_t i, std::size_t j) const { return block_entry(blocks, i, j); }

Eigen::MatrixXd BandMatrix::dense() const { return blocks_to_dense(blocks, dimension()); }

std::size_t band_storage_bytes(int N, int delta) {
  std::size_t bytes = 0;
  const int top = N + delta;
  for (int m = -top; m <= top; ++m) {
    std::size_t size = 0;
    for (int shell = N - delta; shell <= top; ++shell)
      if (std::abs(m) <= shell) size += static_cast<std::size_t>(shell + 1 - std::abs(m));
    bytes += size * size * sizeof(double);
  }
  return bytes;
}

BandMatrix multishell_band_matrix(int N, int delta, const ScalingSchedule& schedule, BandFrame frame,
                                  std::size_t memory_budget_bytes, Execution exec) {
  if (delta < 0) throw DomainError("multishell_band_matrix: band half-width must be >= 0");
  if (N - delta < 0) throw DomainError("multishell_band_matrix: need N - delta >= 0");
  const std::size_t required = band_storage_bytes(N, delta);
  if (required > memory_budget_bytes)
    throw ResourceError("multishell_band_matrix: band needs " + std::to_string(required) +
                            " bytes, budget is " + std::to_string(memory_budget_bytes),
                        required);

  const int lo = N - delta, top = N + delta;
  double dia = 0.0, para = 0.0, energy_unit = 1.0;
  if (frame == BandFrame::scaled) {
    dia = schedule.scaled_diamagnetic_coefficient(N);
    para = schedule.scaled_paramagnetic_coefficient(N);
    energy_unit = schedule.shift_unit(N);
  } else {
    const double lambda = schedule.lambda(N);
    dia = schedule.diamagnetic ? lambda * lambda / 8.0 : 0.0;
    para = lambda / 2.0;
  }

  // cross-shell radial table, keyed by (shell1, l1, shell2, l2) with shell1 <= shell2
  using Key = std::tuple<int, int, int, int>;
  std::map<Key, double> radial;
  if (dia != 0.0) {
    std::vector<Key> keys;
    for (int s1 = lo; s1 <= top; ++s1)
      for (int s2 = s1; s2 <= top; ++s2)
        for (int l1 = 0; l1 <= s1; ++l1)
          for (int l2 : {l1 - 2, l1, l1 + 2})
            if (l2 >= 0 && l2 <= s2) keys.emplace_back(s1, l1, s2, l2);
    std::vector<double> values(keys.size());
    radial_integral_r2(lo + 1, 0, 0);
    const bool par = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
    for (std::size_t k = 0; k < keys.size(); ++k) {
      const auto [s1, l1, s2, l2] = keys[k];
      values[k] = radial_integral_r2(s1 + 1, l1, s2 + 1, l2);
    }
    for (std::size_t k = 0; k < keys.size(); ++k) radial.emplace(keys[k], values[k]);
  }
  auto radial_at = [&](int s1, int l1, int s2, int l2) {
    if (s1 > s2) std::swap(s1, s2), std::swap(l1, l2);
    return radial.at({s1, l1, s2, l2});
  };

  BandMatrix out;
  out.N = N;
  out.delta = delta;
  out.frame = frame;
  std::vector<std::vector<BandState>> block_states;
  std::size_t offset = 0;
  for (int m = -top; m <= top; ++m) {
    std::vector<BandState> bs;
    for (int shell = lo; shell <= top; ++shell)
      for (int l = std::abs(m); l <= shell; ++l) bs.push_back({shell, l, m});
    if (bs.empty()) continue;
    const auto size = static_cast<Eigen::Index>(bs.size());
    out.blocks.push_back({m, offset, Eigen::MatrixXd::Zero(size, size)});
    offset += bs.size();
    out.states.insert(out.states.end(), bs.begin(), bs.end());
    block_states.push_back(std::move(bs));
  }

  const bool par = exec == Execution::parallel;
#pragma omp parallel for schedule(dynamic) if (par)
  for (int bi = 0; bi < static_cast<int>(out.blocks.size()); ++bi) {
    auto& b = out.blocks[static_cast<std::size_t>(bi)];
    const auto& bs = block_states[static_cast<std::size_t>(bi)];
    const auto size = static_cast<Eigen::Index>(bs.size());
    for (Eigen::Index i = 0; i < size; ++i) {
      const auto& si = bs[static_cast<std::size_t>(i)];
      double diag = 0.0;
      switch (frame) {
        case BandFrame::absolute: diag = shell_energy(si.shell); break;
        case BandFrame::shifted:
        case BandFrame::scaled:
          diag = si.shell == N ? 0.0
                               : 0.5 * (1.0 / ((N + 1.0) * (N + 1.0)) -
                                        1.0 / ((si.shell + 1.0) * (si.shell + 1.0))) /
                                     energy_unit;
          break;
      }
      b.matrix(i, i) = diag - para * b.m;
      if (dia == 0.0) continue;
      for (Eigen::Index j = i; j < size; ++j) {
        const auto& sj = bs[static_cast<std::size_t>(j)];
        const int dl = std::abs(si.l - sj.l);
        if (dl != 0 && dl != 2) continue;
        const double v = dia * radial_at(si.shell, si.l, sj.shell, sj.l) * rho2_angular_factor(si.l, sj.l, b.m);
        b.matrix(i, j) += v;
        if (j != i) b.matrix(j, i) += v;
      }
    }
  }
  return out;
}

}  // namespace zeeman
