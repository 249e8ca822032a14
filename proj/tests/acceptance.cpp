// Acceptance harness: one [PASS]/[FAIL] line per criterion. Tolerances and
// runtime limits are fixed here. Usage: acceptance <nlwave exe> <configs dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "nlwave/cli/commands.hpp"
#include "nlwave/nlwave.hpp"

using namespace nlwave;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

auto pulse = [](double x) { return std::exp(-100.0 * x * x); };
auto still = [](double) { return 0.0; };

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d = std::max(d, std::abs(a[i] - b[i]));
  }
  return d;
}

// ---------------------------------------------------------------------------

Outcome ac1_quadrature() {
  double worst = 0.0;
  for (int n = 1; n <= 20; ++n) {
    const auto r = gauss_rule(n, -1.0, 1.0);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double exact = d % 2 == 1 ? 0.0 : 2.0 / (d + 1);
      worst = std::max(worst, std::abs(r.integrate([d](double x) { return std::pow(x, d); }) - exact));
    }
  }
  return {worst <= 1e-12, "max error " + num(worst) + " (tol 1e-12)"};
}

Outcome ac2_gram() {
  double worst = 0.0;
  for (int N = 0; N <= 32; ++N) {
    const auto rule = gauss_rule(N + 1, -1.0, 1.0);
    const Matrix V = vandermonde(N, rule.nodes);
    const Vector w = Eigen::Map<const Vector>(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    const Matrix G = V.transpose() * w.asDiagonal() * V;
    Matrix expected = Matrix::Zero(N + 1, N + 1);
    for (int k = 0; k <= N; ++k) {
      expected(k, k) = 2.0 / (2 * k + 1);
    }
    worst = std::max(worst, (G - expected).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-12, "max entry error " + num(worst) + " (tol 1e-12)"};
}

const int kDegrees[] = {8, 16, 32};
const double kScales[] = {100.0, 400.0, 1600.0};

Outcome ac3_dissipativity() {
  std::mt19937 rng(42);
  std::normal_distribution<double> normal;
  double worst = -std::numeric_limits<double>::infinity();
  for (int N : kDegrees) {
    for (double s : kScales) {
      const AssembledSystem sys = build_system(KernelSpec::gaussian(s), N, 1.0, {}, A2Mode::exactMass);
      const Matrix D = sys.a1 - sys.a2;
      for (int trial = 0; trial < 200; ++trial) {
        Vector v(N + 1);
        for (Eigen::Index i = 0; i <= N; ++i) {
          v(i) = normal(rng);
        }
        worst = std::max(worst, v.dot(D * v) / v.squaredNorm());
      }
    }
  }
  return {worst <= 1e-12, "max v'(A1-A2)v/|v|^2 = " + num(worst) + " (tol 1e-12)"};
}

Outcome ac4_operator_norm() {
  double worst = 0.0;
  for (int N : kDegrees) {
    for (double s : kScales) {
      const AssembledSystem sys = build_system(KernelSpec::gaussian(s), N, 1.0, {}, A2Mode::exactMass);
      worst = std::max(worst, bounds_report(sys).discrete_op_norm);
    }
  }
  return {worst <= 2.0 + 1e-6, "max |M^-1/2 (A1-A2) M^-1/2|_2 = " + num(worst) + " (tol 2 + 1e-6)"};
}

Outcome ac5_frobenius() {
  double worst_a1 = 0.0;
  double worst_a2 = 0.0;
  int cases = 0;
  for (int N : {4, 8, 16, 32}) {
    for (double s : kScales) {
      for (A2Mode mode : {A2Mode::exactMass, A2Mode::unitMass}) {
        const BoundsReport b = bounds_report(build_system(KernelSpec::gaussian(s), N, 1.0, {}, mode));
        worst_a1 = std::max(worst_a1, b.frob_a1 / b.bound_a1);
        if (mode == A2Mode::unitMass) {
          worst_a2 = std::max(worst_a2, b.frob_a2);
        }
        ++cases;
      }
    }
  }
  return {worst_a1 <= 1.0 && worst_a2 < 4.0, std::to_string(cases) + " cases; max |A1|_F / 4(N+1)K = " +
                                                   num(worst_a1) + ", max unitMass |A2|_F = " + num(worst_a2)};
}

Outcome ac6_stability() {
  double worst = 0.0;
  for (int N : {4, 8, 16}) {
    for (A2Mode mode : {A2Mode::exactMass, A2Mode::unitMass}) {
      const AssembledSystem sys = build_system(KernelSpec::gaussian(400.0), N, 1.0, {}, mode);
      for (double dt : {1e-3, 1e-2, 1e-1, 1.0}) {
        worst = std::max(worst, spectral_radius_report(sys, dt, Scheme::paperImplicit, 1000).radius);
      }
    }
  }
  return {worst <= 1.0 + 1e-8, "max paperImplicit radius " + cli::fmt(worst) + " (tol 1 + 1e-8)"};
}

Outcome ac7_spatial() {
  ManufacturedSetup setup;
  setup.T = 0.1;
  const int degrees[] = {8, 16, 24, 32};
  const ConvergenceReport r = spatial_study(setup, degrees, 1e-4, Scheme::averagedImplicit);
  bool ok = true;
  std::string errs;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    errs += (i ? ", " : "") + num(r.samples[i].err_l2);
    if (i > 0 && r.samples[i - 1].err_l2 >= 1e-9) {
      ok = ok && r.samples[i].err_l2 < 0.1 * r.samples[i - 1].err_l2;
    }
  }
  return {ok, "L2 errors N=8,16,24,32: " + errs};
}

Outcome ac8_temporal() {
  ManufacturedSetup setup;
  setup.T = 1.0;
  const double dts[] = {1.0 / 40, 1.0 / 80, 1.0 / 160, 1.0 / 320, 1.0 / 640};
  auto order = [&](Scheme s) {
    const auto p = temporal_study(setup, 32, dts, s).fitted_order;
    return p ? *p : std::nan("");
  };
  const double explicit_order = order(Scheme::explicitCentral);
  const double averaged_order = order(Scheme::averagedImplicit);
  const double paper_order = order(Scheme::paperImplicit);
  const bool ok = explicit_order >= 1.8 && explicit_order <= 2.2 && averaged_order >= 1.8 &&
                  averaged_order <= 2.2 && paper_order >= 0.9;
  std::string detail = "orders explicitCentral " + num(explicit_order) + ", averagedImplicit " +
                       num(averaged_order) + ", paperImplicit " + num(paper_order);
  if (paper_order < 1.8) {
    detail += " (second-order claim for paperImplicit not met)";
  }
  return {ok, detail};
}

Outcome ac9_cross_method() {
  const auto k = KernelSpec::gaussian(400.0);
  const double rho = 0.1;
  const double dt = 0.005;
  const double T = 0.5;
  const double times[] = {T};
  struct Level {
    int N;
    int panels;
  };
  std::vector<double> gaps;
  for (Level l : {Level{48, 16}, Level{64, 32}, Level{96, 64}}) {
    const CollocationGrid g = composite_grid(-1.0, 1.0, l.panels, 8);
    const auto col = run_collocation_1d(k, g, rho, {}, pulse, still, dt, T, Scheme::paperImplicit, times);
    const AssembledSystem sys = build_system(k, l.N, rho, {}, A2Mode::exactMass);
    const auto gal = run(sys, pulse, still, dt, T, g.points, times);
    gaps.push_back(max_diff(col[0].us, gal[0].us));
  }
  const bool ok = gaps[0] <= 1e-3 && gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {ok, "Linf gaps (48|16x8, 64|32x8, 96|64x8): " + num(gaps[0]) + ", " + num(gaps[1]) + ", " +
                  num(gaps[2]) + " (first <= 1e-3, decreasing)"};
}

Outcome ac10_local_limit() {
  const double rho = 1.0;
  const double T = 0.25;
  const double times[] = {T};
  std::vector<double> gaps;
  std::string detail;
  bool within = true;
  for (double s : {400.0, 1600.0, 6400.0}) {
    const auto k = KernelSpec::gaussian(s);
    const double sigma2 = 1.0 / (2.0 * s);
    const double C2 = taylor_coefficients(k, rho, 1).coefficient(1);
    const auto local = local_reference(C2, pulse, still, Forcing{}, reference_interval, T, 801, 1e-3, times);
    const AssembledSystem sys = build_system(k, 64, rho, {}, A2Mode::exactMass);
    const auto nonlocal = run(sys, pulse, still, 1e-3, T, local[0].xs, times, Scheme::averagedImplicit);
    const double gap = error_norms(nonlocal[0], local[0]).linf;
    gaps.push_back(gap);
    within = within && gap <= 10.0 * sigma2;
    detail += (detail.empty() ? "" : ", ") + ("s=" + num(s) + ": " + num(gap) + " / 10 sigma^2 = " +
                                               num(10.0 * sigma2));
  }
  const bool ok = within && gaps[1] < gaps[0] && gaps[2] < gaps[1];
  return {ok, "Linf gap " + detail};
}

Outcome ac11_pulse_and_forcing(const fs::path& configs) {
  // rho ordering at t = 1, measured against the projected initial state
  double dev[2] = {};
  int idx = 0;
  for (const char* name : {"pulse-rho001.json", "pulse.json"}) {
    const cli::RunConfig c = cli::parse_run(cli::load_json(configs / name));
    const cli::Solved1D s = cli::solve_1d(c);
    const Snapshot* at0 = nullptr;
    const Snapshot* at1 = nullptr;
    for (const auto& snap : s.snapshots) {
      if (snap.t == 0.0) {
        at0 = &snap;
      }
      if (std::abs(snap.t - 1.0) < 1e-12) {
        at1 = &snap;
      }
    }
    if (!at0 || !at1) {
      return {false, std::string(name) + " lacks snapshots at t = 0 and t = 1"};
    }
    dev[idx++] = max_diff(at1->us, at0->us);
  }
  const bool ordered = dev[0] < dev[1];

  // forced run: energy bound |u(t)| <= |u0| (1 + t sqrt(2 rho)) + t^2/2 |g| in L2
  const cli::RunConfig c = cli::parse_run(cli::load_json(configs / "forced.json"));
  const cli::Solved1D s = cli::solve_1d(c);
  const auto g = cli::preset_function(c.g, c.domain);
  const auto& xs = s.snapshots.front().xs;
  const auto w = trapezoid_weights(xs);
  auto l2 = [&](auto&& f) {
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sum += w[i] * f(i) * f(i);
    }
    return std::sqrt(sum);
  };
  const double u0n = l2([&](std::size_t i) { return s.snapshots.front().us[i]; });
  const double gn = l2([&](std::size_t i) { return g(xs[i]); });
  bool bounded = true;
  double worst_ratio = 0.0;
  for (const auto& snap : s.snapshots) {
    const double un = l2([&](std::size_t i) { return snap.us[i]; });
    const double bound = u0n * (1.0 + snap.t * std::sqrt(2.0 * c.rho)) + 0.5 * snap.t * snap.t * gn;
    worst_ratio = std::max(worst_ratio, un / bound);
    bounded = bounded && std::isfinite(un) && un <= 1.01 * bound;
  }
  return {ordered && bounded, "Linf drift at t=1: rho=0.01 " + num(dev[0]) + " < rho=0.1 " + num(dev[1]) +
                                  "; forced run max |u|/bound = " + num(worst_ratio) + " (tol 1.01)"};
}

Outcome ac12_torus(const fs::path& configs) {
  const cli::RunConfig c = cli::parse_run(cli::load_json(configs / "torus-2d.json"));
  const KernelSpec2D k = KernelSpec2D::isotropic_gaussian(c.kernel.scale, c.kernel.wrap_radius);
  const int n = c.grid.cells;
  const auto un = static_cast<std::size_t>(n);
  const int steps = 100;

  TorusMidpointSolver flat(k, n, c.rho, c.dt);
  flat.set_initial([](double, double) { return 1.0; }, [](double, double) { return 0.0; });
  TorusMidpointSolver bump(k, n, c.rho, c.dt);
  bump.set_initial(cli::preset_function_2d(c.u0), cli::preset_function_2d(c.v0));
  TorusMidpointSolver drift(k, n, c.rho, c.dt);
  drift.set_initial(cli::preset_function_2d(c.u0),
                    [](double x, double y) { return std::sin(2.0 * std::numbers::pi * x) + 0.3 * std::cos(y); });
  const double p0 = drift.momentum();
  for (int j = 0; j < steps; ++j) {
    flat.step();
    bump.step();
    drift.step();
  }
  double const_err = 0.0;
  for (double u : flat.displacement()) {
    const_err = std::max(const_err, std::abs(u - 1.0));
  }
  double asym = 0.0;
  const auto& u = bump.displacement();
  for (std::size_t i = 0; i < un; ++i) {
    for (std::size_t j = 0; j < un; ++j) {
      asym = std::max(asym, std::abs(u[i * un + j] - u[j * un + i]));
    }
  }
  const double dp = std::abs(drift.momentum() - p0);
  const bool ok = const_err <= 1e-12 && asym <= 1e-10 && dp <= 1e-12;
  return {ok, "n=" + std::to_string(n) + ", " + std::to_string(steps) + " steps: constant drift " + num(const_err) +
                  ", x<->y asymmetry " + num(asym) + ", momentum change " + num(dp)};
}

Outcome ac13_determinism(const std::string& exe, const fs::path& configs) {
  struct Case {
    const char* command;
    const char* config;
    const char* csv;
  };
  const Case cases[] = {{"run", "pulse.json", "snapshots.csv"},
                        {"run", "pulse-rho001.json", "snapshots.csv"},
                        {"run", "forced.json", "snapshots.csv"},
                        {"run", "torus-2d.json", "snapshots.csv"},
                        {"run", "collocation.json", "snapshots.csv"},
                        {"convergence", "convergence.json", "convergence.csv"},
                        {"stability", "stability.json", "stability.csv"},
                        {"compare", "compare.json", "compare.csv"}};
  const fs::path tmp = fs::temp_directory_path() / ("nlwave-acceptance-" + std::to_string(std::random_device{}()));
  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  };
  int identical = 0;
  std::string problems;
  for (const Case& c : cases) {
    std::string out[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = tmp / (std::string(c.config) + "." + std::to_string(rep));
      const std::string cmd = "\"" + exe + "\" " + c.command + " \"" + (configs / c.config).string() +
                              "\" --quiet --out \"" + dir.string() + "\" >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      ran = ran && WIFEXITED(status) && WEXITSTATUS(status) == 0;
      out[rep] = slurp(dir / c.csv);
    }
    if (ran && !out[0].empty() && out[0] == out[1]) {
      ++identical;
    } else {
      problems += std::string(" ") + c.config + (ran ? "(differs)" : "(failed)");
    }
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  const int total = static_cast<int>(std::size(cases));
  return {identical == total,
          std::to_string(identical) + "/" + std::to_string(total) + " configs byte-identical" + problems};
}

} // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::fprintf(stderr, "usage: %s <nlwave exe> <configs dir>\n", argv[0]);
    return 2;
  }
  const std::string exe = argv[1];
  const fs::path configs = argv[2];

  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {1, "quadrature exactness", 1.0, ac1_quadrature},
      {2, "Gram matrix", 1.0, ac2_gram},
      {3, "discrete dissipativity", 10.0, ac3_dissipativity},
      {4, "discrete operator norm", 10.0, ac4_operator_norm},
      {5, "Frobenius bounds", 5.0, ac5_frobenius},
      {6, "unconditional stability", 30.0, ac6_stability},
      {7, "spectral convergence", 120.0, ac7_spatial},
      {8, "temporal order", 120.0, ac8_temporal},
      {9, "Galerkin vs collocation", 60.0, ac9_cross_method},
      {10, "local limit", 120.0, ac10_local_limit},
      {11, "pulse spreading and forced run", 60.0, [&] { return ac11_pulse_and_forcing(configs); }},
      {12, "2D torus properties", 60.0, [&] { return ac12_torus(configs); }},
      {13, "CLI determinism", 60.0, [&] { return ac13_determinism(exe, configs); }},
  };

  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = o.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("[%s] AC%d %s: %s; %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_s, in_time ? "" : " TOO SLOW");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
