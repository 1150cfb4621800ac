// Serial reference loops against the OpenMP kernels. Both paths produce
// bitwise identical results; only wall time differs.

#include <benchmark/benchmark.h>

#include "zeeman/coherent_states.hpp"
#include "zeeman/spectral_cluster.hpp"
#include "zeeman/szego_measures.hpp"

using namespace zeeman;

namespace {

Execution mode(const benchmark::State& st) { return st.range(0) ? Execution::parallel : Execution::serial; }

void label(benchmark::State& st) { st.SetLabel(st.range(0) ? "parallel" : "serial"); }

void BM_ShellRho2(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(shell_matrix_rho2(60, mode(st)).operator_norm());
  label(st);
}

void BM_ClusterFirstOrder(benchmark::State& st) {
  ScalingSchedule s;
  ClusterOptions o;
  o.exec = mode(st);
  for (auto _ : st) benchmark::DoNotOptimize(cluster_eigenvalues(100, s, o).shifts.back());
  label(st);
}

void BM_QuadricMC(benchmark::State& st) {
  const auto rho = TestFunction::monomial(2);
  for (auto _ : st) benchmark::DoNotOptimize(rhs_quadric_mc(rho, 2.0, 200'000, 1, mode(st)).value);
  label(st);
}

void BM_Pushforward(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(liouville_pushforward_check(100'000, 1, mode(st)).ks_vs_triangular);
  label(st);
}

void BM_HaarGrid(benchmark::State& st) {
  const HaarGridSpec g{48, 4, 2, 2, 1024, 2};
  for (auto _ : st) benchmark::DoNotOptimize(haar_density_normalization(g, mode(st)).value);
  label(st);
}

void BM_AngleDensity(benchmark::State& st) {
  const auto rho = TestFunction::parse("table:-0.5:0,0:1,0.5:0");
  for (auto _ : st) benchmark::DoNotOptimize(rhs_angle_density(rho, 1.0, mode(st)));
  label(st);
}

void BM_S3Quadrature(benchmark::State& st) {
  const auto grid = make_s3_grid(QuadratureSpec::for_degree(40, 2));
  const auto f = [](const Vec4& w) { return cplx(std::pow(w[0] * w[0] + 0.3 * w[1], 20), 0.0); };
  for (auto _ : st) benchmark::DoNotOptimize(s3_quadrature(f, grid, mode(st)));
  label(st);
}

void BM_ResolutionOfIdentity(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(resolution_of_identity_check(3, 20'000, 1, mode(st)).deviation);
  label(st);
}

}  // namespace

BENCHMARK(BM_ShellRho2)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClusterFirstOrder)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_QuadricMC)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pushforward)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HaarGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AngleDensity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_S3Quadrature)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResolutionOfIdentity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
