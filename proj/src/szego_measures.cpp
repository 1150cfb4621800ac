#include "zeeman/szego_measures.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "zeeman/classical_kepler.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/quadrature.hpp"
#include "zeeman/random.hpp"
#include "zeeman/spectral_cluster.hpp"

namespace zeeman {

namespace {

constexpr double kPi = std::numbers::pi;
using GK = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
double adaptive(F&& f, double a, double b) {
  return GK::integrate(f, a, b, 12, 1e-14);
}

// Σ of integrals over [a, b] cut at the given interior points; `rule` integrates one piece.
template <class F, class Rule>
double pieces(F&& f, double a, double b, std::vector<double> cuts, Rule&& rule) {
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [&](double c) { return !(c > a && c < b); }), cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  double lo = a, s = 0.0;
  for (double c : cuts) {
    s += rule(f, lo, c);
    lo = c;
  }
  return s + rule(f, lo, b);
}

template <class F>
double adaptive_pieces(F&& f, double a, double b, std::vector<double> cuts) {
  return pieces(f, a, b, std::move(cuts), [](auto& g, double lo, double hi) { return adaptive(g, lo, hi); });
}

// fixed 30-point Gauss per piece: exact for the piecewise polynomials left after cutting at kinks
template <class F>
double gauss_pieces(F&& f, double a, double b, std::vector<double> cuts) {
  using G30 = boost::math::quadrature::gauss<double, 30>;
  return pieces(f, a, b, std::move(cuts), [](auto& g, double lo, double hi) { return G30::integrate(g, lo, hi); });
}

// u with -(B/2) u · k = x_break, i.e. the kinks of u ↦ ρ(-(B/2) k u)
std::vector<double> kinks(const std::vector<double>& breaks, double B, double k) {
  std::vector<double> out;
  if (B == 0.0 || k == 0.0) return out;
  for (double b : breaks) out.push_back(-2.0 * b / (B * k));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("TestFunction: bad number '" + s + "'");
  }
  if (used != s.size()) throw DomainError("TestFunction: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::string strip(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  return s;
}

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
  }
};

}  // namespace

TestFunction TestFunction::monomial(int degree) {
  if (degree < 0 || degree > kMaxMonomialDegree) throw DomainError("TestFunction: monomial degree must be in [0, 12]");
  TestFunction f;
  f.kind_ = Kind::monomial;
  f.coefficients_.assign(static_cast<std::size_t>(degree) + 1, 0.0);
  f.coefficients_.back() = 1.0;
  f.text_ = degree == 0 ? "1" : degree == 1 ? "x" : "x^" + std::to_string(degree);
  return f;
}

TestFunction TestFunction::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  for (double c : coefficients)
    if (!std::isfinite(c)) throw DomainError("TestFunction: non-finite coefficient");
  TestFunction f;
  f.kind_ = Kind::polynomial;
  f.coefficients_ = std::move(coefficients);
  f.text_ = "poly:";
  for (std::size_t i = 0; i < f.coefficients_.size(); ++i) f.text_ += (i ? "," : "") + fmt(f.coefficients_[i]);
  return f;
}

TestFunction TestFunction::tabulated(std::vector<double> x, std::vector<double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("TestFunction: table needs >= 2 matching points");
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) throw DomainError("TestFunction: non-finite table entry");
    if (i > 0 && !(x[i] > x[i - 1])) throw DomainError("TestFunction: table abscissae must increase strictly");
  }
  TestFunction f;
  f.kind_ = Kind::tabulated;
  f.table_x_ = std::move(x);
  f.table_y_ = std::move(y);
  f.text_ = "table:";
  for (std::size_t i = 0; i < f.table_x_.size(); ++i)
    f.text_ += (i ? "," : "") + fmt(f.table_x_[i]) + ":" + fmt(f.table_y_[i]);
  return f;
}

TestFunction TestFunction::parse(const std::string& text) {
  std::string s = strip(text);
  double scale = 1.0;
  if (const auto at = s.find('@'); at != std::string::npos) {
    scale = parse_number(s.substr(at + 1));
    s = s.substr(0, at);
  }
  TestFunction f;
  if (s == "1") {
    f = monomial(0);
  } else if (s == "x") {
    f = monomial(1);
  } else if (s.rfind("x^", 0) == 0) {
    const double d = parse_number(s.substr(2));
    if (d != std::floor(d)) throw DomainError("TestFunction: non-integer exponent in '" + text + "'");
    f = monomial(static_cast<int>(d));
  } else if (s.rfind("poly:", 0) == 0) {
    std::vector<double> c;
    for (const auto& item : split(s.substr(5), ',')) c.push_back(parse_number(item));
    if (c.empty()) throw DomainError("TestFunction: empty coefficient list");
    f = polynomial(std::move(c));
  } else if (s.rfind("table:", 0) == 0) {
    std::vector<double> x, y;
    for (const auto& item : split(s.substr(6), ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) throw DomainError("TestFunction: table entries are x:y");
      x.push_back(parse_number(item.substr(0, colon)));
      y.push_back(parse_number(item.substr(colon + 1)));
    }
    f = tabulated(std::move(x), std::move(y));
  } else {
    throw DomainError("TestFunction: cannot parse '" + text + "'");
  }
  return scale == 1.0 ? f : f.rescaled(scale);
}

double TestFunction::operator()(double x) const {
  x *= scale_;
  if (kind_ != Kind::tabulated) {
    double s = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) s = s * x + *it;
    return s;
  }
  if (x <= table_x_.front()) return table_y_.front();
  if (x >= table_x_.back()) return table_y_.back();
  const auto hi = static_cast<std::size_t>(std::upper_bound(table_x_.begin(), table_x_.end(), x) - table_x_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - table_x_[lo]) / (table_x_[hi] - table_x_[lo]);
  return (1.0 - t) * table_y_[lo] + t * table_y_[hi];
}

TestFunction TestFunction::rescaled(double c) const {
  if (!std::isfinite(c)) throw DomainError("TestFunction: non-finite scale");
  TestFunction f = *this;
  f.scale_ *= c;
  return f;
}

std::vector<double> TestFunction::breakpoints() const {
  std::vector<double> out;
  if (kind_ != Kind::tabulated || scale_ == 0.0) return out;
  for (double x : table_x_) out.push_back(x / scale_);
  return out;
}

int TestFunction::degree() const {
  if (kind_ == Kind::tabulated) return -1;
  return static_cast<int>(coefficients_.size()) - 1;
}

std::string TestFunction::describe() const { return scale_ == 1.0 ? text_ : text_ + "@" + fmt(scale_); }

double rhs_triangular(const TestFunction& rho, double B) {
  if (!(B >= 0.0)) throw DomainError("rhs_triangular: B must be non-negative");
  auto f = [&](double u) { return rho(-0.5 * B * u) * (1.0 - std::abs(u)); };
  auto cuts = kinks(rho.breakpoints(), B, 1.0);
  cuts.push_back(0.0);
  return adaptive_pieces(f, -1.0, 1.0, cuts);
}

McEstimate rhs_quadric_mc(const TestFunction& rho, double B, std::size_t n_samples, std::uint64_t seed,
                          Execution exec) {
  if (!(B >= 0.0)) throw DomainError("rhs_quadric_mc: B must be non-negative");
  if (n_samples < 1000) throw DomainError("rhs_quadric_mc: need at least 1000 samples");
  const std::size_t blocks = (n_samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Moments> partial(blocks);
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    RandomStream rng(seed, static_cast<std::uint64_t>(b));
    const std::size_t lo = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t hi = std::min(n_samples, lo + kSampleBlock);
    Moments m;
    for (std::size_t i = lo; i < hi; ++i) m.add(rho(-0.5 * B * ell3_alpha(sample_A(rng))));
    partial[static_cast<std::size_t>(b)] = m;
  }
  Moments total;
  for (const auto& m : partial) total.merge(m);
  McEstimate e;
  e.n = total.n;
  e.value = total.mean;
  const double var = total.n > 1 ? total.m2 / static_cast<double>(total.n - 1) : 0.0;
  e.std_error = std::sqrt(var / static_cast<double>(total.n));
  return e;
}

double rhs_angle_density(const TestFunction& rho, double B, Execution exec) {
  if (!(B >= 0.0)) throw DomainError("rhs_angle_density: B must be non-negative");
  // t = cosψ, x = cosθ: the density becomes t dt dx on (0,1)×(-1,1)
  const auto breaks = rho.breakpoints();
  std::vector<double> edges{-1.0, 1.0};
  for (int k = 1; k < 16; ++k) edges.push_back(-1.0 + k / 8.0);
  for (double x : kinks(breaks, B, 1.0)) edges.push_back(x);  // kink reaches t = 1
  std::sort(edges.begin(), edges.end());
  edges.erase(std::remove_if(edges.begin(), edges.end(), [](double x) { return x < -1.0 || x > 1.0; }), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const long tiles = static_cast<long>(edges.size()) - 1;
  std::vector<double> part(static_cast<std::size_t>(tiles));
#pragma omp parallel for schedule(dynamic) if (exec == Execution::parallel)
  for (long k = 0; k < tiles; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    auto outer = [&](double x) {
      return gauss_pieces([&](double t) { return t * rho(-0.5 * B * t * x); }, 0.0, 1.0, kinks(breaks, B, x));
    };
    part[ku] = adaptive(outer, edges[ku], edges[ku + 1]);
  }
  double s = 0.0;
  for (double v : part) s += v;
  return s;
}

PushforwardResult liouville_pushforward_check(std::size_t n_samples, std::uint64_t seed, Execution exec) {
  if (n_samples < 10000) throw DomainError("liouville_pushforward_check: need at least 1e4 samples");
  const std::size_t blocks = (n_samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<double> l_phase(n_samples), l_alpha(n_samples);
  std::vector<char> keep(n_samples, 1);
  std::vector<double> worst(blocks, 0.0);
  const long nb = static_cast<long>(blocks);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (long b = 0; b < nb; ++b) {
    RandomStream rng(seed, static_cast<std::uint64_t>(b));
    const std::size_t lo = static_cast<std::size_t>(b) * kSampleBlock;
    const std::size_t hi = std::min(n_samples, lo + kSampleBlock);
    double w = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const CoherentIndex alpha = sample_A(rng);
      const SpherePoint sp = sigma(alpha);
      l_alpha[i] = -ell3_alpha(alpha);
      if (1.0 - sp.omega[3] <= 1e-12) {
        keep[i] = 0;
        continue;
      }
      const PhasePoint pt = moser_inverse(sp);
      l_phase[i] = pt.x[0] * pt.p[1] - pt.x[1] * pt.p[0];
      w = std::max(w, std::abs(l_phase[i] - l_alpha[i]));
    }
    worst[static_cast<std::size_t>(b)] = w;
  }
  PushforwardResult r;
  r.n = n_samples;
  EmpiricalMeasure phase, alpha;
  for (std::size_t i = 0; i < n_samples; ++i) {
    if (!keep[i]) {
      ++r.skipped;
      continue;
    }
    phase.points.push_back({l_phase[i], 1.0});
    alpha.points.push_back({l_alpha[i], 1.0});
  }
  const double kept = static_cast<double>(phase.points.size());
  for (auto* m : {&phase, &alpha})
    for (auto& p : m->points) p.weight = 1.0 / kept;
  for (double w : worst) r.max_pointwise_error = std::max(r.max_pointwise_error, w);
  r.ks_vs_alpha = ks_distance(phase, ReferenceCdf::from_measure(alpha));
  r.ks_vs_triangular = ks_distance(phase, ReferenceCdf::triangular(1.0));
  return r;
}

double haar_density(const AngleState& s) {
  const double two_pi = 2.0 * kPi;
  const double c = std::cos(s.psi);
  return c * c * std::sin(s.psi) * std::sin(s.theta) /
         (two_pi * two_pi * two_pi * two_pi * (1.0 + std::sin(s.psi) * std::cos(s.beta)));
}

double geodesic_density(double psi, double theta) {
  return std::cos(psi) * std::sin(psi) * std::sin(theta);
}

HaarResult haar_density_normalization(const HaarGridSpec& spec, Execution exec) {
  if (spec.n_psi < 1 || spec.n_theta < 1 || spec.n_phi < 1 || spec.n_gamma < 1 || spec.n_beta < 1 || spec.n_delta < 1)
    throw DomainError("haar_density_normalization: node counts must be positive");
  const auto psi = quadrature::gauss_legendre(static_cast<std::size_t>(spec.n_psi), 0.0, 0.5 * kPi);
  const auto ct = quadrature::gauss_legendre(static_cast<std::size_t>(spec.n_theta));
  const auto phi = quadrature::periodic_trapezoid(static_cast<std::size_t>(spec.n_phi), 2.0 * kPi);
  const auto gam = quadrature::periodic_trapezoid(static_cast<std::size_t>(spec.n_gamma), 2.0 * kPi);
  const auto beta = quadrature::periodic_trapezoid(static_cast<std::size_t>(spec.n_beta), 2.0 * kPi);
  const auto del = quadrature::periodic_trapezoid(static_cast<std::size_t>(spec.n_delta), 2.0 * kPi);

  std::vector<double> part(psi.size()), low(psi.size());
  const long np = static_cast<long>(psi.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (long i = 0; i < np; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    double s = 0.0, mn = INFINITY;
    AngleState a;
    a.psi = psi.nodes[iu];
    for (std::size_t j = 0; j < ct.size(); ++j) {
      a.theta = std::acos(ct.nodes[j]);
      // dθ = dx / sinθ
      const double jac = ct.weights[j] / std::sin(a.theta);
      for (std::size_t k = 0; k < phi.size(); ++k) {
        a.phi = phi.nodes[k];
        for (std::size_t g = 0; g < gam.size(); ++g) {
          a.gamma = gam.nodes[g];
          for (std::size_t l = 0; l < beta.size(); ++l) {
            a.beta = beta.nodes[l];
            for (std::size_t d = 0; d < del.size(); ++d) {
              a.delta = del.nodes[d];
              const double rho = haar_density(a);
              mn = std::min(mn, rho);
              s += jac * phi.weights[k] * gam.weights[g] * beta.weights[l] * del.weights[d] * rho;
            }
          }
        }
      }
    }
    part[iu] = psi.weights[iu] * s;
    low[iu] = mn;
  }
  HaarResult r;
  r.spec = spec;
  r.min_density = INFINITY;
  for (std::size_t i = 0; i < part.size(); ++i) {
    r.value += part[i];
    r.min_density = std::min(r.min_density, low[i]);
  }
  return r;
}

HaarResult haar_density_normalization(double tol, const HaarGridSpec& start, Execution exec) {
  HaarGridSpec spec = start;
  HaarResult prev = haar_density_normalization(spec, exec);
  for (int it = 0; it < 12; ++it) {
    spec.n_beta *= 2;
    HaarResult cur = haar_density_normalization(spec, exec);
    if (std::abs(cur.value - prev.value) <= tol) return cur;
    prev = cur;
  }
  throw AccuracyError("haar_density_normalization: no stabilization after 12 doublings");
}

double beta_marginal(double psi) {
  if (!(psi >= 0.0 && psi < 0.5 * kPi)) throw DomainError("beta_marginal: psi must be in [0, pi/2)");
  const double s = std::sin(psi);
  auto trap = [&](std::size_t n) {
    return quadrature::periodic_trapezoid(n, 2.0 * kPi).integrate([&](double b) { return 1.0 / (1.0 + s * std::cos(b)); });
  };
  std::size_t n = 16;
  double prev = trap(n);
  for (int it = 0; it < 24; ++it) {
    n *= 2;
    const double cur = trap(n);
    if (std::abs(cur - prev) <= 1e-13 * std::abs(cur)) return cur;
    prev = cur;
  }
  throw AccuracyError("beta_marginal: trapezoid did not converge");
}

}  // namespace zeeman
