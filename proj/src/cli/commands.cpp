#include "zeeman/cli/commands.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <Eigen/Core>
#include <boost/version.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>

#include "zeeman/classical_kepler.hpp"
#include "zeeman/cli/io.hpp"
#include "zeeman/coherent_states.hpp"
#include "zeeman/errors.hpp"
#include "zeeman/spectral_cluster.hpp"
#include "zeeman/szego_measures.hpp"

#ifndef ZEEMAN_VERSION
#define ZEEMAN_VERSION "0.0.0"
#endif

namespace zeeman::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Common {
  std::string out_dir = ".";
  std::string format = "both";
  int threads = 0;
};

struct ClusterArgs {
  int N = 0;
  double B = 1.0;
  double q = 17.0;
  std::string mode = "first_order";
  int delta = 2;
  bool no_diamagnetic = false;
};

struct SzegoArgs {
  std::string rho;
  double B = 1.0;
  std::vector<int> N_list{25, 50, 100, 200, 400};
  std::size_t samples = 1'000'000;
  std::optional<std::uint64_t> seed;
};

struct CoherentArgs {
  int m = 1;
  double B = 1.0;
  std::vector<int> N_list{8, 16, 32, 64};
  std::string alpha = "random";
  std::optional<std::uint64_t> seed;
};

struct KeplerArgs {
  double ell = 0.05;
  double theta = 0.3, phi = 0.7, gamma = 1.1, beta = 0.0;
  double tol = 1e-10;
  double periods = 1.0;
  std::size_t stride = 1;
};

struct MeasuresArgs {
  std::size_t samples = 1'000'000;
  std::optional<std::uint64_t> seed;
  double haar_tol = 1e-7;
};

// Result of one command: files to write plus whether every check passed.
struct Outcome {
  std::vector<std::pair<std::string, io::Table>> tables;
  Json summary;
  bool passed = true;
};

Json check(Json& checks, const std::string& name, bool ok, Json detail = nullptr) {
  Json c;
  c["name"] = name;
  c["passed"] = ok;
  if (!detail.is_null()) c["detail"] = std::move(detail);
  checks.push_back(c);
  return c;
}

bool all_passed(const Json& checks) {
  for (const auto& c : checks)
    if (!c["passed"].get<bool>()) return false;
  return true;
}

Json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

[[noreturn]] void missing_seed() {
  throw DomainError("--seed is required for stochastic runs");
}

Outcome do_cluster(const ClusterArgs& a) {
  ScalingSchedule sched;
  sched.B = a.B;
  sched.q = a.q;
  sched.diamagnetic = !a.no_diamagnetic;
  ClusterOptions opt;
  opt.mode = a.mode == "multishell" ? ClusterMode::multishell : ClusterMode::first_order;
  opt.delta = a.delta;
  const ClusterSpectrum sp = cluster_eigenvalues(a.N, sched, opt);

  Outcome o;
  io::Table t;
  t.columns = {"j", "block_m", "shift", "scaled_shift", "subcluster"};
  for (std::size_t j = 0; j < sp.shifts.size(); ++j)
    t.add({j, sp.block_m[j], sp.shifts[j], sp.scaled_shifts[j],
           sp.subcluster_of.empty() ? Json(nullptr) : Json(sp.subcluster_of[j])});
  o.tables.emplace_back("cluster_spectrum", std::move(t));

  const auto measure = scaled_shift_measure(sp);
  Json& s = o.summary;
  s["command"] = "cluster";
  s["N"] = a.N;
  s["B"] = a.B;
  s["q"] = a.q;
  s["mode"] = a.mode;
  s["delta"] = a.delta;
  s["diamagnetic"] = sched.diamagnetic;
  s["dimension"] = sp.shifts.size();
  s["ks_triangular"] = ks_distance(measure, ReferenceCdf::triangular(0.5 * a.B));
  s["scaled_shift_min"] = sp.scaled_shifts.empty() ? 0.0 : sp.scaled_shifts.front();
  s["scaled_shift_max"] = sp.scaled_shifts.empty() ? 0.0 : sp.scaled_shifts.back();
  s["support_excess_bound"] = sp.support_excess_bound;
  if (opt.mode == ClusterMode::multishell) {
    s["contour_count"] = sp.contour_count;
    s["contour_radius"] = sp.contour_radius;
  }
  Json checks = Json::array();
  check(checks, "eigencount", sp.shifts.size() == shell_dimension(a.N),
        Json{{"found", sp.shifts.size()}, {"expected", shell_dimension(a.N)}});
  if (a.B > 0.0) {
    Json table = Json::array();
    try {
      const auto groups = subcluster_assignment(sp);
      bool sizes_ok = true;
      for (const auto& [m, members] : groups) {
        const double c = subcluster_center(a.N, a.B, m);
        double worst = 0.0;
        for (double v : members) worst = std::max(worst, std::abs(v - c));
        const auto expected = static_cast<std::size_t>(a.N + 1 - std::abs(m));
        sizes_ok = sizes_ok && members.size() == expected;
        table.push_back(Json{{"m", m}, {"size", members.size()}, {"expected", expected}, {"center", c},
                             {"max_distance", worst}});
      }
      s["subcluster_radius"] = subcluster_radius(a.N, a.B);
      s["max_center_distance"] = max_center_distance(sp);
      s["subclusters"] = table;
      check(checks, "subcluster_sizes", sizes_ok);
    } catch (const SubclusterOverlapError& e) {
      s["subclusters"] = nullptr;
      check(checks, "subcluster_sizes", false, e.what());
    }
  }
  s["checks"] = checks;
  o.passed = all_passed(checks);
  return o;
}

Outcome do_szego(const SzegoArgs& a) {
  if (!a.seed) missing_seed();
  const TestFunction rho = TestFunction::parse(a.rho);
  const auto f = [&](double x) { return rho(x); };
  const double tri = rhs_triangular(rho, a.B);
  const double ang = rhs_angle_density(rho, a.B);
  const McEstimate mc = rhs_quadric_mc(rho, a.B, a.samples, *a.seed);

  Outcome o;
  io::Table t;
  t.columns = {"N", "trace_average", "rhs_triangular", "rhs_angle_density", "rhs_quadric_mc", "gap"};
  double last_gap = 0.0, prev_gap = INFINITY;
  bool decreasing = true;
  for (int N : a.N_list) {
    const double lhs = trace_average(N, a.B, f);
    const double gap = std::abs(lhs - tri);
    decreasing = decreasing && gap <= prev_gap;
    prev_gap = last_gap = gap;
    t.add({N, lhs, tri, ang, mc.value, gap});
  }
  o.tables.emplace_back("szego_table", std::move(t));

  Json& s = o.summary;
  s["command"] = "szego";
  s["rho"] = rho.describe();
  s["B"] = a.B;
  s["N"] = a.N_list;
  Json reps = Json::array();
  reps.push_back(Json{{"rho", rho.describe()}, {"B", a.B}, {"representation", "triangular"}, {"value", tri}});
  reps.push_back(Json{{"rho", rho.describe()}, {"B", a.B}, {"representation", "angle_density"}, {"value", ang}});
  reps.push_back(Json{{"rho", rho.describe()},
                      {"B", a.B},
                      {"representation", "quadric_mc"},
                      {"value", mc.value},
                      {"std_error", mc.std_error},
                      {"n", mc.n}});
  s["rhs"] = reps;
  s["seed"] = *a.seed;
  s["gaps_decreasing"] = decreasing;
  s["final_gap"] = last_gap;
  Json checks = Json::array();
  if (!a.N_list.empty()) {
    const double bound = 3.0 / a.N_list.back();
    check(checks, "final_gap_within_3_over_N", last_gap <= bound, Json{{"bound", bound}});
  }
  check(checks, "triangular_vs_angle_density", std::abs(tri - ang) <= 1e-8, Json{{"difference", tri - ang}});
  check(checks, "triangular_vs_quadric_mc_3sigma", std::abs(tri - mc.value) <= 3.0 * mc.std_error + 1e-15,
        Json{{"difference", tri - mc.value}, {"std_error", mc.std_error}});
  s["checks"] = checks;
  o.passed = all_passed(checks);
  return o;
}

Outcome do_coherent(const CoherentArgs& a) {
  CoherentIndex alpha;
  if (a.alpha == "eigen") {
    alpha = {Vec4(1, 0, 0, 0), Vec4(0, -1, 0, 0)};
  } else {
    if (!a.seed) missing_seed();
    RandomStream rng(*a.seed, 0);
    alpha = sample_A(rng);
  }
  const ConvergenceTable ct = prop51_convergence(alpha, a.m, a.B, a.N_list);
  const double limit = std::pow(-0.5 * a.B * ell3_alpha(alpha), a.m);

  Outcome o;
  io::Table t;
  t.columns = {"N", "value", "limit", "error", "slope"};
  for (const auto& r : ct.rows) t.add({r.N, r.value, limit, r.error, ct.slope});
  o.tables.emplace_back("coherent_convergence", std::move(t));

  Json& s = o.summary;
  s["command"] = "coherent";
  s["alpha"] = Json{{"kind", a.alpha}, {"a", vec_json(alpha.a)}, {"b", vec_json(alpha.b)}};
  if (a.seed) s["seed"] = *a.seed;
  s["ell3"] = ell3_alpha(alpha);
  s["m"] = a.m;
  s["B"] = a.B;
  s["limit"] = limit;
  s["slope"] = ct.slope;
  Json checks = Json::array();
  if (a.m >= 1 && ct.rows.size() >= 2)
    check(checks, "slope_minus_one", std::abs(ct.slope + 1.0) <= 0.2, Json{{"slope", ct.slope}});
  s["checks"] = checks;
  o.passed = all_passed(checks);
  return o;
}

Outcome do_kepler(const KeplerArgs& a) {
  if (!(a.ell > 0.0 && a.ell <= 1.0)) throw DomainError("kepler: --ell must lie in (0, 1]");
  if (!(a.periods > 0.0)) throw DomainError("kepler: --periods must be positive");
  if (a.stride == 0) throw DomainError("kepler: --stride must be positive");
  OrbitAngles ang;
  ang.psi = std::acos(a.ell);
  ang.theta = a.theta;
  ang.phi = a.phi;
  ang.gamma = a.gamma;
  ang.beta = a.beta;
  const PhasePoint pt0 = orbit_point_from_elements(ang);
  const KeplerConstants k0 = kepler_constants(pt0);
  const double period = regularized_period(pt0, a.tol);
  const Trajectory tr = integrate_kepler(pt0, a.periods * kTwoPi, a.tol);

  Outcome o;
  io::Table t;
  t.columns = {"s", "x1", "x2", "x3", "p1", "p2", "p3", "energy"};
  double e_drift = 0.0, l_drift = 0.0, a_drift = 0.0;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    const auto& p = tr.points[i];
    const KeplerConstants k = kepler_constants(p);
    e_drift = std::max(e_drift, std::abs(k.energy - k0.energy));
    l_drift = std::max(l_drift, (k.ell - k0.ell).norm());
    a_drift = std::max(a_drift, (k.rl - k0.rl).norm());
    if (i % a.stride == 0 || i + 1 == tr.points.size())
      t.add({tr.s[i], p.x[0], p.x[1], p.x[2], p.p[0], p.p[1], p.p[2], k.energy});
  }
  o.tables.emplace_back("kepler_trajectory", std::move(t));

  Json& s = o.summary;
  s["command"] = "kepler";
  s["ell"] = a.ell;
  s["angles"] = Json{{"theta", a.theta}, {"phi", a.phi}, {"gamma", a.gamma}, {"beta", a.beta}};
  s["tol"] = a.tol;
  s["period"] = period;
  s["period_error"] = period - kTwoPi;
  s["s_max"] = a.periods * kTwoPi;
  s["steps"] = tr.points.size() - 1;
  s["rejected_steps"] = tr.rejected_steps;
  s["energy_drift"] = e_drift;
  s["ell_drift"] = l_drift;
  s["runge_lenz_drift"] = a_drift;
  const bool whole = std::abs(a.periods - std::round(a.periods)) == 0.0;
  if (whole)
    s["return_error"] = (tr.back().x - pt0.x).norm() + (tr.back().p - pt0.p).norm();
  Json checks = Json::array();
  check(checks, "period_2pi", std::abs(period - kTwoPi) <= 1e-6, Json{{"error", period - kTwoPi}});
  s["checks"] = checks;
  o.passed = all_passed(checks);
  return o;
}

Outcome do_measures(const MeasuresArgs& a) {
  if (!a.seed) missing_seed();
  const PushforwardResult pf = liouville_pushforward_check(a.samples, *a.seed);
  const HaarResult haar = haar_density_normalization(a.haar_tol);

  Outcome o;
  io::Table t;
  t.columns = {"psi", "beta_integral", "two_pi_over_cos_psi", "relative_error"};
  double worst = 0.0;
  for (int i = 1; i <= 15; ++i) {
    const double psi = 0.1 * i;
    const double v = beta_marginal(psi), ref = kTwoPi / std::cos(psi);
    worst = std::max(worst, std::abs(v - ref) / ref);
    t.add({psi, v, ref, (v - ref) / ref});
  }
  o.tables.emplace_back("measures_beta_marginal", std::move(t));

  Json& s = o.summary;
  s["command"] = "measures";
  s["samples"] = a.samples;
  s["seed"] = *a.seed;
  s["pushforward"] = Json{{"n", pf.n},
                          {"skipped", pf.skipped},
                          {"max_pointwise_error", pf.max_pointwise_error},
                          {"ks_vs_alpha", pf.ks_vs_alpha},
                          {"ks_vs_triangular", pf.ks_vs_triangular}};
  s["haar"] = Json{{"value", haar.value},
                   {"min_density", haar.min_density},
                   {"n_psi", haar.spec.n_psi},
                   {"n_beta", haar.spec.n_beta}};
  s["beta_marginal_max_relative_error"] = worst;
  const double kept = static_cast<double>(pf.n - pf.skipped);
  const double ks_bound = std::max(0.005, 1.63 / std::sqrt(kept));
  Json checks = Json::array();
  check(checks, "pointwise_ell3", pf.max_pointwise_error <= 1e-9);
  check(checks, "skipped_fraction", static_cast<double>(pf.skipped) <= 1e-6 * static_cast<double>(pf.n));
  check(checks, "ks_vs_triangular", pf.ks_vs_triangular <= ks_bound, Json{{"bound", ks_bound}});
  check(checks, "haar_normalization", std::abs(haar.value - 1.0) <= 1e-6);
  check(checks, "haar_density_nonnegative", haar.min_density >= 0.0);
  check(checks, "beta_marginal", worst <= 1e-8);
  s["checks"] = checks;
  o.passed = all_passed(checks);
  return o;
}

Json versions() {
  Json v;
  v["zeeman"] = ZEEMAN_VERSION;
#ifdef __VERSION__
  v["compiler"] = __VERSION__;
#endif
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["boost"] = BOOST_LIB_VERSION;
  v["openmp"] = _OPENMP;
  v["cli11"] = CLI11_VERSION;
  return v;
}

void write_outcome(const std::string& cmd, const Outcome& o, const Common& c, const std::string& config_echo,
                   double wall, std::ostream& out) {
  const fs::path dir(c.out_dir);
  std::vector<std::string> files;
  auto emit = [&](const std::string& name, const std::string& text) {
    io::write_text(dir / name, text);
    files.push_back(name);
  };
  for (const auto& [name, table] : o.tables) {
    if (c.format != "json") emit(name + ".csv", table.to_csv());
    if (c.format != "csv") emit(name + ".json", io::dump_json(table.to_json()));
  }
  emit(cmd + "_summary.json", io::dump_json(o.summary));
  Json m;
  m["command"] = cmd;
  m["config"] = config_echo;
  m["versions"] = versions();
  m["threads"] = omp_get_max_threads();
  m["wall_time_s"] = wall;
  m["passed"] = o.passed;
  m["files"] = files;
  io::write_text(dir / (cmd + "_manifest.json"), io::dump_json(m));
  for (const auto& f : files) out << "wrote " << (dir / f).string() << "\n";
  out << cmd << ": " << (o.passed ? "all checks passed" : "CHECK FAILED") << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zeeman cluster experiments"};
  app.require_subcommand(1);
  app.fallthrough();
  app.option_defaults()->always_capture_default();
  app.set_config("--config", "", "key = value config file; explicit flags win");
  Common common;
  if (const char* env = std::getenv("ZEEMAN_OUT_DIR"); env && *env) common.out_dir = env;
  app.add_option("--out", common.out_dir, "output directory (default $ZEEMAN_OUT_DIR or .)");
  app.add_option("--format", common.format, "columnar output format")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  app.add_option("--threads", common.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

  ClusterArgs ca;
  auto* cl = app.add_subcommand("cluster", "eigenvalue cluster of shell N");
  cl->add_option("--N", ca.N, "shell index")->required()->check(CLI::NonNegativeNumber);
  cl->add_option("--B", ca.B, "field strength")->check(CLI::NonNegativeNumber);
  cl->add_option("--q", ca.q, "weak-field exponent, eps = h^q")->check(CLI::NonNegativeNumber);
  cl->add_option("--mode", ca.mode)->check(CLI::IsMember({"first_order", "multishell"}));
  cl->add_option("--delta", ca.delta, "band half-width (multishell)")->check(CLI::NonNegativeNumber);
  cl->add_flag("--no-diamagnetic", ca.no_diamagnetic, "drop the rho^2 term");

  SzegoArgs sa;
  auto* sz = app.add_subcommand("szego", "trace averages against the three limit representations");
  sz->add_option("--rho", sa.rho, "1 | x | x^k | poly:c0,c1,... | table:x0:y0,...")->required();
  sz->add_option("--B", sa.B)->check(CLI::NonNegativeNumber);
  sz->add_option("--N", sa.N_list, "comma-separated shell indices")->delimiter(',');
  sz->add_option("--samples", sa.samples, "Monte Carlo samples")->check(CLI::Range(std::size_t{1000}, std::size_t{1} << 40));
  sz->add_option("--seed", sa.seed);

  CoherentArgs co;
  auto* ch = app.add_subcommand("coherent", "coherent-state expectation convergence");
  ch->add_option("--m", co.m, "power of L3")->check(CLI::NonNegativeNumber);
  ch->add_option("--B", co.B);
  ch->add_option("--N", co.N_list)->delimiter(',');
  ch->add_option("--alpha", co.alpha, "random (needs --seed) or eigen")->check(CLI::IsMember({"random", "eigen"}));
  ch->add_option("--seed", co.seed);

  KeplerArgs ka;
  auto* kp = app.add_subcommand("kepler", "regularized Kepler orbit and its period");
  kp->add_option("--ell", ka.ell, "|angular momentum| in (0, 1]");
  kp->add_option("--theta", ka.theta);
  kp->add_option("--phi", ka.phi);
  kp->add_option("--gamma", ka.gamma);
  kp->add_option("--beta", ka.beta);
  kp->add_option("--tol", ka.tol)->check(CLI::PositiveNumber);
  kp->add_option("--periods", ka.periods);
  kp->add_option("--stride", ka.stride, "keep every k-th step in the trajectory file");

  MeasuresArgs ma;
  auto* me = app.add_subcommand("measures", "pushforward, Haar and beta-marginal checks");
  me->add_option("--samples", ma.samples)->check(CLI::Range(std::size_t{10000}, std::size_t{1} << 40));
  me->add_option("--seed", ma.seed);
  me->add_option("--haar-tol", ma.haar_tol)->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kUsage;
  }

  if (common.threads > 0) omp_set_num_threads(common.threads);
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App* sub = app.get_subcommands().front();
  const std::string cmd = sub->get_name();
  try {
    Outcome o;
    if (sub == cl) o = do_cluster(ca);
    else if (sub == sz) o = do_szego(sa);
    else if (sub == ch) o = do_coherent(co);
    else if (sub == kp) o = do_kepler(ka);
    else o = do_measures(ma);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string echo = "out=\"" + common.out_dir + "\"\nformat=\"" + common.format + "\"\n" + sub->config_to_str(true, false);
    write_outcome(cmd, o, common, echo, wall, out);
    return o.passed ? kOk : kCheckFailed;
  } catch (const DomainError& e) {
    err << cmd << ": " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    err << cmd << ": " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << cmd << ": " << e.what() << "\n";
    return kCheckFailed;
  } catch (const std::exception& e) {
    err << cmd << ": " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace zeeman::cli
