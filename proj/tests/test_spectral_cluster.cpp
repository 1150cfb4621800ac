#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/spectral_cluster.hpp"

using namespace zeeman;

namespace {

ScalingSchedule no_diamagnetic(double B, double q = 17.0) {
  ScalingSchedule s{B, q};
  s.diamagnetic = false;
  return s;
}

}  // namespace

TEST_CASE("without the diamagnetic term the shifts are -(λ/2)m with multiplicity N+1-|m|") {
  for (int N : {1, 4, 9}) {
    const auto sched = no_diamagnetic(1.0);
    const auto spec = cluster_eigenvalues(N, sched);
    REQUIRE(spec.shifts.size() == shell_dimension(N));
    std::map<int, int> mult;
    for (std::size_t j = 0; j < spec.shifts.size(); ++j) {
      const int m = spec.block_m[j];
      ++mult[m];
      CHECK(spec.scaled_shifts[j] == doctest::Approx(-0.5 * m / (N + 1.0)).epsilon(1e-14));
      CHECK(spec.shifts[j] == doctest::Approx(-0.5 * sched.lambda(N) * m).epsilon(1e-13));
    }
    for (int m = -N; m <= N; ++m) CHECK(mult[m] == N + 1 - std::abs(m));
    CHECK(std::is_sorted(spec.shifts.begin(), spec.shifts.end()));
  }
}

TEST_CASE("zero field gives zero shifts") {
  const auto spec = cluster_eigenvalues(6, ScalingSchedule{0.0});
  for (double v : spec.shifts) CHECK(v == 0.0);
  CHECK(spec.subcluster_of.empty());
  const auto mu = scaled_shift_measure(spec);
  CHECK(ks_distance(mu, ReferenceCdf::triangular(0.0)) == 0.0);
}

TEST_CASE("spectral symmetry without the diamagnetic term") {
  const auto spec = cluster_eigenvalues(11, no_diamagnetic(1.3));
  const auto& s = spec.scaled_shifts;
  for (std::size_t j = 0; j < s.size(); ++j) CHECK(s[j] == -s[s.size() - 1 - j]);
}

TEST_CASE("first-order and multishell agree at N=20, q=17") {
  const ScalingSchedule sched{1.0, 17.0};
  const auto first = cluster_eigenvalues(20, sched);
  const auto multi = cluster_eigenvalues(20, sched, {ClusterMode::multishell, 2});
  REQUIRE(multi.contour_count == shell_dimension(20));
  double worst = 0.0;
  for (std::size_t j = 0; j < first.shifts.size(); ++j)
    worst = std::max(worst, std::abs(first.shifts[j] - multi.shifts[j]));
  CHECK(worst <= 1e-3 * sched.shift_unit(20));
}

TEST_CASE("multishell Schur reduction matches a direct dense solve where the latter is accurate") {
  // at small q the shifts are large enough for the shifted-frame eigenvalues to resolve them
  for (int N : {2, 4, 6}) {
    const ScalingSchedule sched{1.0, 3.0};
    const auto spec = cluster_eigenvalues(N, sched, {ClusterMode::multishell, 2});
    const auto band = multishell_band_matrix(N, 2, sched, BandFrame::shifted);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(band.dense(), Eigen::EigenvaluesOnly);
    std::vector<double> inside;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(es.eigenvalues()[i]) < contour_radius(N)) inside.push_back(es.eigenvalues()[i]);
    REQUIRE(inside.size() == spec.shifts.size());
    for (std::size_t j = 0; j < inside.size(); ++j)
      CHECK(spec.shifts[j] == doctest::Approx(inside[j]).epsilon(1e-9).scale(1e-12));
    // and the second-order correction is visible: first order differs
    const auto first = cluster_eigenvalues(N, sched);
    double diff = 0.0;
    for (std::size_t j = 0; j < inside.size(); ++j) diff = std::max(diff, std::abs(first.shifts[j] - inside[j]));
    CHECK(diff > 0.0);
  }
}

TEST_CASE("multishell count mismatch raises a cluster-separation error") {
  const ScalingSchedule strong{2000.0, 0.0};
  try {
    cluster_eigenvalues(2, strong, {ClusterMode::multishell, 1});
    FAIL("expected ClusterSeparationError");
  } catch (const ClusterSeparationError& e) {
    CHECK(e.expected() == 9);
    CHECK(e.found() != 9);
  }
  CHECK_THROWS_AS(cluster_eigenvalues(0, ScalingSchedule{}), DomainError);
  CHECK_THROWS_AS(cluster_eigenvalues(3, ScalingSchedule{}, {ClusterMode::multishell, -1}), DomainError);
}

TEST_CASE("serial and parallel clusters are identical") {
  const ScalingSchedule sched{1.0, 2.0};
  const auto a = cluster_eigenvalues(15, sched, {ClusterMode::first_order, 2, kDefaultMemoryBudget, Execution::serial});
  const auto b = cluster_eigenvalues(15, sched, {ClusterMode::first_order, 2, kDefaultMemoryBudget, Execution::parallel});
  CHECK(a.shifts == b.shifts);
}

TEST_CASE("scaled_shift_measure") {
  const auto spec = cluster_eigenvalues(1, no_diamagnetic(2.0));
  const auto mu = scaled_shift_measure(spec);
  REQUIRE(mu.points.size() == 4);
  const double expected[] = {-0.5, 0.0, 0.0, 0.5};
  for (int i = 0; i < 4; ++i) {
    CHECK(mu.points[i].value == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(mu.points[i].weight == 0.25);
  }
  const auto big = scaled_shift_measure(cluster_eigenvalues(30, ScalingSchedule{}));
  CHECK(std::abs(big.total_weight() - 1.0) <= 1e-12);
}

TEST_CASE("sub-cluster sizes N+1-|m|") {
  const auto spec = cluster_eigenvalues(2, ScalingSchedule{1.0, 17.0});
  const auto groups = subcluster_assignment(spec);
  std::vector<std::size_t> sizes;
  for (int m = 2; m >= -2; --m) sizes.push_back(groups.at(m).size());
  CHECK(sizes == std::vector<std::size_t>{1, 2, 3, 2, 1});

  for (int N = 1; N <= 30; ++N) {
    const auto s = cluster_eigenvalues(N, ScalingSchedule{1.0, 17.0});
    const auto g = subcluster_assignment(s);
    for (int m = -N; m <= N; ++m) CHECK(g.at(m).size() == static_cast<std::size_t>(N + 1 - std::abs(m)));
    CHECK(s.subcluster_of == s.block_m);
  }
}

TEST_CASE("sub-cluster distances") {
  CHECK(max_center_distance(cluster_eigenvalues(9, no_diamagnetic(1.0))) <= 1e-15);
  const auto spec = cluster_eigenvalues(20, ScalingSchedule{1.0, 17.0});
  CHECK(max_center_distance(spec) <= 1e-6);
  CHECK(max_center_distance(spec) < subcluster_radius(20, 1.0));
  CHECK(spec.support_excess_bound < 1e-10);
}

TEST_CASE("an ambiguous shift raises a sub-cluster overlap error") {
  ClusterSpectrum fake;
  fake.N = 3;
  fake.schedule = ScalingSchedule{1.0};
  const double midway = 0.5 * (subcluster_center(3, 1.0, 0) + subcluster_center(3, 1.0, 1));
  fake.scaled_shifts = {midway};
  try {
    subcluster_assignment(fake);
    FAIL("expected SubclusterOverlapError");
  } catch (const SubclusterOverlapError& e) {
    CHECK(e.scaled_shift() == midway);
    CHECK(e.distance() == doctest::Approx(subcluster_radius(3, 1.0) * 2.0));
  }
  fake.schedule.B = 0.0;
  CHECK_THROWS_AS(subcluster_assignment(fake), DomainError);
}

TEST_CASE("trace_average examples") {
  for (int N : {1, 7, 50}) {
    CHECK(trace_average(N, 1.0, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(trace_average(N, 1.0, [](double x) { return x; })) <= 1e-16);
  }
  const auto sq = [](double x) { return x * x; };
  const double limit = oracle::triangular(sq, 2.0);
  CHECK(limit == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(std::abs(trace_average(4000, 2.0, sq) - limit) < 1e-3);
}

TEST_CASE("trace identity against an eigendecomposition of -(B/2)h L3") {
  const double B = 1.7;
  const std::vector<std::vector<double>> polys = {
      {0.3, -1.0, 2.0}, {0, 0, 0, 1}, {1, 1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 0, 0, -4.5}};
  for (int N : {3, 8, 15}) {
    const Eigen::MatrixXd A = -0.5 * B / (N + 1.0) * shell_matrix_L3(N).dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    for (const auto& c : polys) {
      auto Q = [&](double x) {
        double v = 0.0;
        for (std::size_t k = c.size(); k-- > 0;) v = v * x + c[k];
        return v;
      };
      double tr = 0.0;
      for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) tr += Q(es.eigenvalues()[i]);
      tr /= static_cast<double>(shell_dimension(N));
      CHECK(trace_average(N, B, Q) == doctest::Approx(tr).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("riemann_sum_limit") {
  CHECK(std::abs(riemann_sum_limit(100, 1.0, [](double) { return 1.0; }) - 1.0) <= 1e-2);
  for (int N : {10, 100}) {
    const double B = 1.5;
    CHECK(std::abs(riemann_sum_limit(N, B, [](double x) { return x; })) <= 0.5 * B / (N + 1.0));
    const auto f = [](double x) { return std::cos(3 * x) + x * x * x; };
    CHECK(std::abs(riemann_sum_limit(N, B, f) - trace_average(N, B, f)) <= 4.0 / N);
  }
}

TEST_CASE("ks_distance examples") {
  EmpiricalMeasure a;
  a.points = {{-0.2, 0.25}, {0.1, 0.5}, {0.4, 0.25}};
  CHECK(ks_distance(a, ReferenceCdf::from_measure(a)) == 0.0);

  EmpiricalMeasure b = a;
  b.points[1].value = 0.15;
  CHECK(ks_distance(a, ReferenceCdf::from_measure(b)) == doctest::Approx(0.5));

  EmpiricalMeasure point;
  point.points = {{0.0, 1.0}};
  CHECK(ks_distance(point, ReferenceCdf::triangular(1.0)) == doctest::Approx(0.5).epsilon(1e-15));

  const int N = 200;
  const auto mu = scaled_shift_measure(cluster_eigenvalues(N, no_diamagnetic(1.0)));
  const double d = ks_distance(mu, ReferenceCdf::triangular(0.5));
  CHECK(d <= 1.0 / (N + 1) + 1e-12);
  CHECK(d > 0.0);
}

TEST_CASE("triangular cdf") {
  const auto t = ReferenceCdf::triangular(0.5);
  CHECK(t.cdf(-0.5) == 0.0);
  CHECK(t.cdf(0.0) == doctest::Approx(0.5));
  CHECK(t.cdf(0.5) == 1.0);
  CHECK(t.cdf(0.25) == doctest::Approx(0.875));
  // derivative is the triangular density 2(1-|x|/c)/(2c)
  const double x = -0.1, e = 1e-6;
  CHECK((t.cdf(x + e) - t.cdf(x - e)) / (2 * e) == doctest::Approx((1.0 - 0.2) / 0.5).epsilon(1e-6));
}

TEST_CASE("KS distance to the triangular law shrinks with N") {
  double prev = 1.0;
  for (int N : {10, 20, 40}) {
    const double d = ks_distance(scaled_shift_measure(cluster_eigenvalues(N, ScalingSchedule{})),
                                 ReferenceCdf::triangular(0.5));
    CHECK(d <= 1.2 * prev);
    CHECK(d <= 1.0 / (N + 1) + 1e-9);
    prev = d;
  }
}
