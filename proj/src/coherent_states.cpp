#include "zeeman/coherent_states.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <string>

#include "zeeman/errors.hpp"
#include "zeeman/quadrature.hpp"
#include "zeeman/random.hpp"

namespace zeeman {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

// Polynomials in u = α·ω, v = ω₁α₂ - ω₂α₁, w = ω₁α₁ + ω₂α₂.
using Exponents = std::array<int, 3>;
using UVWPoly = std::map<Exponents, cplx>;

// L̃₃ = -i(ω₁∂₂ - ω₂∂₁) is a derivation with L̃₃u = -i v, L̃₃v = i w, L̃₃w = -i v.
UVWPoly apply_L3(const UVWPoly& p) {
  UVWPoly out;
  for (const auto& [e, c] : p) {
    const auto [a, b, d] = e;
    if (a > 0) out[{a - 1, b + 1, d}] += c * static_cast<double>(a) * (-kI);
    if (b > 0) out[{a, b - 1, d + 1}] += c * static_cast<double>(b) * kI;
    if (d > 0) out[{a, b + 1, d - 1}] += c * static_cast<double>(d) * (-kI);
  }
  for (auto it = out.begin(); it != out.end();) it = (it->second == cplx{}) ? out.erase(it) : std::next(it);
  return out;
}

cplx ipow(cplx z, int k) {
  cplx r{1.0, 0.0};
  for (int i = 0; i < k; ++i) r *= z;
  return r;
}

double multinomial(int N, const std::array<int, 4>& k) {
  double r = std::lgamma(N + 1.0);
  for (int j : k) r -= std::lgamma(j + 1.0);
  return std::round(std::exp(r));
}

std::vector<std::array<int, 4>> monomials_of_degree(int N) {
  std::vector<std::array<int, 4>> out;
  if (N < 0) return out;
  for (int a = N; a >= 0; --a)
    for (int b = N - a; b >= 0; --b)
      for (int c = N - a - b; c >= 0; --c) out.push_back({a, b, c, N - a - b - c});
  return out;
}

double monomial_value(const Vec4& w, const std::array<int, 4>& k) {
  double r = 1.0;
  for (int j = 0; j < 4; ++j)
    for (int e = 0; e < k[j]; ++e) r *= w[j];
  return r;
}

}  // namespace

int QuadratureSpec::exactness_degree() const {
  return std::min({n_phi - 1, 2 * n_theta - 1, 2 * n_chi - 1});
}

QuadratureSpec QuadratureSpec::for_degree(int N, int m) {
  return {N + m + 4, N + m + 4, 2 * N + 2 * m + 8};
}

S3Grid make_s3_grid(const QuadratureSpec& spec) {
  if (spec.n_chi < 1 || spec.n_theta < 1 || spec.n_phi < 1)
    throw DomainError("make_s3_grid: node counts must be positive");
  const auto chi = quadrature::gauss_chebyshev_u(static_cast<std::size_t>(spec.n_chi));
  const auto theta = quadrature::gauss_legendre(static_cast<std::size_t>(spec.n_theta));
  const auto phi = quadrature::periodic_trapezoid(static_cast<std::size_t>(spec.n_phi), 2.0 * kPi);
  S3Grid g;
  g.spec = spec;
  g.nodes.reserve(chi.size() * theta.size() * phi.size());
  g.weights.reserve(g.nodes.capacity());
  for (std::size_t i = 0; i < chi.size(); ++i) {
    const double cc = chi.nodes[i], sc = std::sqrt(std::max(0.0, 1.0 - cc * cc));
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double ct = theta.nodes[j], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (std::size_t k = 0; k < phi.size(); ++k) {
        const double ph = phi.nodes[k];
        g.nodes.emplace_back(sc * st * std::cos(ph), sc * st * std::sin(ph), sc * ct, cc);
        g.weights.push_back(chi.weights[i] * theta.weights[j] * phi.weights[k]);
      }
    }
  }
  return g;
}

cplx s3_quadrature(const std::function<cplx(const Vec4&)>& f, const S3Grid& grid, Execution exec) {
  std::vector<cplx> values(grid.nodes.size());
  const long n = static_cast<long>(grid.nodes.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (long i = 0; i < n; ++i) values[i] = f(grid.nodes[i]);
  cplx sum{};
  for (std::size_t i = 0; i < values.size(); ++i) sum += grid.weights[i] * values[i];
  return sum;
}

cplx s3_quadrature(const std::function<cplx(const Vec4&)>& f, const QuadratureSpec& spec, Execution exec) {
  return s3_quadrature(f, make_s3_grid(spec), exec);
}

double a_N(int N) {
  if (N < 0) throw DomainError("a_N: N must be non-negative");
  return std::sqrt((N + 1.0) / (2.0 * kPi * kPi));
}

CVec4 complex_alpha(const CoherentIndex& alpha) {
  CVec4 z;
  for (int i = 0; i < 4; ++i) z[i] = cplx(alpha.a[i], alpha.b[i]);
  return z;
}

double coherent_norm_integral(const CoherentIndex& alpha, int N, const S3Grid& grid) {
  const CVec4 z = complex_alpha(alpha);
  return s3_quadrature(
             [&](const Vec4& w) {
               const cplx u = z[0] * w[0] + z[1] * w[1] + z[2] * w[2] + z[3] * w[3];
               return cplx(std::pow(std::norm(u), N), 0.0);
             },
             grid)
      .real();
}

cplx expectation_L3_power_complex(const CoherentIndex& alpha, int N, int m, double B, const S3Grid& grid) {
  if (N < 0 || m < 0) throw DomainError("expectation_L3_power: need N >= 0 and m >= 0");
  if (grid.spec.exactness_degree() < 2 * N + 2 * m)
    throw AccuracyError("expectation_L3_power: quadrature exactness degree " +
                        std::to_string(grid.spec.exactness_degree()) + " below " + std::to_string(2 * N + 2 * m));
  const double factor = -0.5 * B / (N + 1.0);  // h B̃
  UVWPoly p{{{N, 0, 0}, cplx{1.0, 0.0}}};
  for (int k = 0; k < m; ++k) {
    p = apply_L3(p);
    for (auto& [e, c] : p) c *= factor;
  }
  const CVec4 z = complex_alpha(alpha);
  std::vector<std::pair<Exponents, cplx>> terms(p.begin(), p.end());
  const double a2 = a_N(N) * a_N(N);
  return a2 * s3_quadrature(
                  [&](const Vec4& w) {
                    const cplx u = z[0] * w[0] + z[1] * w[1] + z[2] * w[2] + z[3] * w[3];
                    const cplx v = w[0] * z[1] - w[1] * z[0];
                    const cplx ww = w[0] * z[0] + w[1] * z[1];
                    cplx s{};
                    for (const auto& [e, c] : terms) s += c * ipow(u, e[0]) * ipow(v, e[1]) * ipow(ww, e[2]);
                    return std::conj(ipow(u, N)) * s;
                  },
                  grid);
}

double expectation_L3_power(const CoherentIndex& alpha, int N, int m, double B) {
  return expectation_L3_power_complex(alpha, N, m, B, make_s3_grid(QuadratureSpec::for_degree(N, m))).real();
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_slope: need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceTable prop51_convergence(const CoherentIndex& alpha, int m, double B, const std::vector<int>& N_list) {
  if (!std::is_sorted(N_list.begin(), N_list.end()) ||
      std::adjacent_find(N_list.begin(), N_list.end()) != N_list.end())
    throw DomainError("prop51_convergence: N_list must be strictly increasing");
  const double limit = std::pow(-0.5 * B * ell3_alpha(alpha), m);
  ConvergenceTable t;
  std::vector<double> xs, ys;
  for (int N : N_list) {
    const double v = expectation_L3_power(alpha, N, m, B);
    t.rows.push_back({N, v, std::abs(v - limit)});
    xs.push_back(N);
    ys.push_back(t.rows.back().error);
  }
  t.slope = N_list.size() >= 2 ? loglog_slope(xs, ys) : std::numeric_limits<double>::quiet_NaN();
  return t;
}

HarmonicBasis harmonic_basis(int N) {
  if (N < 0) throw DomainError("harmonic_basis: N must be non-negative");
  HarmonicBasis hb;
  hb.monomials = monomials_of_degree(N);
  const auto lower = monomials_of_degree(N - 2);
  const auto nm = static_cast<Eigen::Index>(hb.monomials.size());
  Eigen::MatrixXd kernel;
  if (lower.empty()) {
    kernel = Eigen::MatrixXd::Identity(nm, nm);
  } else {
    std::map<std::array<int, 4>, Eigen::Index> index;
    for (std::size_t i = 0; i < lower.size(); ++i) index[lower[i]] = static_cast<Eigen::Index>(i);
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(lower.size()), nm);
    for (Eigen::Index c = 0; c < nm; ++c) {
      const auto& k = hb.monomials[static_cast<std::size_t>(c)];
      for (int j = 0; j < 4; ++j) {
        if (k[j] < 2) continue;
        auto t = k;
        t[j] -= 2;
        lap(index.at(t), c) += k[j] * (k[j] - 1.0);
      }
    }
    kernel = Eigen::FullPivLU<Eigen::MatrixXd>(lap).kernel();
  }
  const auto dim = static_cast<Eigen::Index>((N + 1) * (N + 1));
  if (kernel.cols() != dim)
    throw BasisConstructionError("harmonic_basis: kernel of the Laplacian has wrong dimension",
                                 std::abs(static_cast<double>(kernel.cols() - dim)));

  const S3Grid grid = make_s3_grid(QuadratureSpec::for_degree(N, 0));
  // values of the monomials at the nodes
  Eigen::MatrixXd V(static_cast<Eigen::Index>(grid.nodes.size()), nm);
  for (Eigen::Index r = 0; r < V.rows(); ++r)
    for (Eigen::Index c = 0; c < nm; ++c)
      V(r, c) = monomial_value(grid.nodes[static_cast<std::size_t>(r)], hb.monomials[static_cast<std::size_t>(c)]);
  const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), static_cast<Eigen::Index>(grid.weights.size()));
  const Eigen::MatrixXd Yv = V * kernel;  // basis values, nodes × dim
  const Eigen::MatrixXd G = Yv.transpose() * w.asDiagonal() * Yv;
  // Löwdin orthonormalization G^{-1/2}
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw BasisConstructionError("harmonic_basis: singular Gram matrix", es.eigenvalues().minCoeff());
  const Eigen::MatrixXd Ginv =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const Eigen::MatrixXd C = kernel * Ginv;  // monomials × dim
  const Eigen::MatrixXd Yo = V * C;
  const Eigen::MatrixXd G2 = Yo.transpose() * w.asDiagonal() * Yo;
  hb.gram_deviation = (G2 - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (hb.gram_deviation > 1e-8)
    throw BasisConstructionError("harmonic_basis: Gram matrix not the identity", hb.gram_deviation);
  hb.coefficients = C.transpose();
  return hb;
}

ResolutionResult resolution_of_identity_check(int N, std::size_t n_samples, std::uint64_t seed, Execution exec) {
  if (N < 0) throw DomainError("resolution_of_identity_check: N must be non-negative");
  if (n_samples == 0) throw DomainError("resolution_of_identity_check: need samples");
  const HarmonicBasis hb = harmonic_basis(N);
  const auto dim = hb.coefficients.rows();
  const auto nm = static_cast<Eigen::Index>(hb.monomials.size());

  // T(i, k) = ∫ Y_i ω^k dΩ, so ⟨Y_i, Φ_α⟩ = a Σ_k multinom(N,k) α^k T(i,k)
  const S3Grid grid = make_s3_grid(QuadratureSpec::for_degree(N, 0));
  Eigen::MatrixXd V(static_cast<Eigen::Index>(grid.nodes.size()), nm);
  for (Eigen::Index r = 0; r < V.rows(); ++r)
    for (Eigen::Index c = 0; c < nm; ++c)
      V(r, c) = monomial_value(grid.nodes[static_cast<std::size_t>(r)], hb.monomials[static_cast<std::size_t>(c)]);
  const Eigen::Map<const Eigen::VectorXd> w(grid.weights.data(), static_cast<Eigen::Index>(grid.weights.size()));
  const Eigen::MatrixXd T = hb.coefficients * V.transpose() * w.asDiagonal() * V;  // dim × nm
  Eigen::VectorXd mult(nm);
  for (Eigen::Index c = 0; c < nm; ++c) mult[c] = multinomial(N, hb.monomials[static_cast<std::size_t>(c)]);
  const double a = a_N(N);

  const std::size_t blocks = (n_samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Eigen::MatrixXcd> partial(blocks);
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    RandomStream rng(seed, static_cast<std::uint64_t>(b));
    Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
    const std::size_t lo = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t hi = std::min(n_samples, lo + kSampleBlock);
    Eigen::VectorXcd am(nm);
    for (std::size_t s = lo; s < hi; ++s) {
      const CVec4 z = complex_alpha(sample_A(rng));
      for (Eigen::Index c = 0; c < nm; ++c) {
        const auto& k = hb.monomials[static_cast<std::size_t>(c)];
        am[c] = mult[c] * ipow(z[0], k[0]) * ipow(z[1], k[1]) * ipow(z[2], k[2]) * ipow(z[3], k[3]);
      }
      const Eigen::VectorXcd coef = a * (T.cast<cplx>() * am);
      acc.noalias() += coef * coef.adjoint();
    }
    partial[b] = std::move(acc);
  }
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& p : partial) M += p;
  M *= static_cast<double>(dim) / static_cast<double>(n_samples);

  ResolutionResult r;
  r.dimension = static_cast<std::size_t>(dim);
  r.samples = n_samples;
  r.trace = M.trace().real();
  r.deviation = (M - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
  return r;
}

MomentumNormResult momentum_norm_check(const CoherentIndex& alpha, int N, int radial_nodes) {
  if (N < 0) throw DomainError("momentum_norm_check: N must be non-negative");
  const auto nr = static_cast<std::size_t>(radial_nodes > 0 ? radial_nodes : 2 * N + 40);
  const auto theta = quadrature::gauss_legendre(static_cast<std::size_t>(N + 4));
  const auto phi = quadrature::periodic_trapezoid(static_cast<std::size_t>(2 * N + 8), 2.0 * kPi);
  const CVec4 z = complex_alpha(alpha);
  const double n1 = N + 1.0;
  const double a = a_N(N);

  // ∫ |Ψ̂|² p² dΩ₂ · dp/du at (N+1)|p| = tan u
  auto radial_density = [&](double u) {
    const double pr = std::tan(u) / n1;
    const double dp_du = 1.0 / (n1 * std::cos(u) * std::cos(u));
    double ang = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double ct = theta.nodes[j], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (std::size_t k = 0; k < phi.size(); ++k) {
        const Vec3 p = pr * Vec3(st * std::cos(phi.nodes[k]), st * std::sin(phi.nodes[k]), ct);
        const Vec3 qv = n1 * p;
        const double q2 = qv.squaredNorm();
        Vec4 om;
        om.head<3>() = (2.0 / (q2 + 1.0)) * qv;
        om[3] = (q2 - 1.0) / (q2 + 1.0);
        const cplx dot = z[0] * om[0] + z[1] * om[1] + z[2] * om[2] + z[3] * om[3];
        const double pref = a * std::pow(n1, 1.5) * std::pow(2.0 / (q2 + 1.0), 2);
        ang += theta.weights[j] * phi.weights[k] * pref * pref * std::pow(std::norm(dot), N);
      }
    }
    return ang * pr * pr * dp_du;
  };
  auto mass_up_to = [&](double U) { return quadrature::gauss_legendre(nr, 0.0, U).integrate(radial_density); };

  MomentumNormResult r;
  const double total = mass_up_to(0.5 * kPi);
  r.deviation = total - 1.0;
  double lo = 0.0, hi = 0.5 * kPi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mass_up_to(mid) < 0.5 * total ? lo : hi) = mid;
  }
  r.median_scaled_radius = std::tan(0.5 * (lo + hi));
  return r;
}

}  // namespace zeeman
