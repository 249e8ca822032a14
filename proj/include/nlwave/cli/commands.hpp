#pragma once

// The four tool commands. Each returns the process exit code:
// 0 success, 1 stability FAIL, 2 configuration error, 3 solver error.

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "nlwave/cli/config.hpp"
#include "nlwave/cli/output.hpp"
#include "nlwave/nlwave.hpp"

namespace nlwave::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Stability threshold on the companion spectral radius.
inline constexpr double kRadiusSlack = 1e-8;
/// Warn when less than this much kernel mass lies inside the domain.
inline constexpr double kMassWarning = 0.999;

inline constexpr const char* kVersion = "0.1.0";

struct Options {
  std::filesystem::path out = "out";
  bool quiet = false;
};

struct Streams {
  std::ostream& log = std::cout;
  std::ostream& err = std::cerr;
};

inline json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config", "cannot open " + path.string());
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
}

/// Maps exceptions to exit codes; nothing has been written when this fires.
template <class Body>
int guarded(Streams io, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const json::exception& e) {
    io.err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    io.err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  }
}

inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    xs[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (n - 1);
  }
  xs.back() = hi;
  return xs;
}

// ---------------------------------------------------------------------------
// Reports

inline json kernel_report(const KernelSpec& k, Interval domain, std::vector<std::string>& warnings) {
  const QuadratureRule rule = default_assembly_rule(k, 0, domain);
  const double centre = kernel_mass(k, domain.mid(), domain.lo, domain.hi, rule);
  const double edge = kernel_mass(k, domain.lo, domain.lo, domain.hi, rule);
  json j = {{"scale", k.scale()},
            {"width", k.width()},
            {"peak", k.peak()},
            {"massAtCentre", centre},
            {"massAtEdge", edge}};
  try {
    j["truncationRadius"] = truncation_radius(k.width(), 1e-15);
    j["truncationEps"] = 1e-15;
  } catch (const NoTruncation&) {
    j["truncationRadius"] = nullptr;
  }
  if (centre < kMassWarning) {
    warnings.push_back("kernel mass inside the domain at its centre is " + fmt(centre) +
                       " < 0.999: the domain truncates the kernel");
  }
  return j;
}

inline json bounds_json(const BoundsReport& b, std::vector<std::string>& warnings) {
  for (const auto& v : b.violations) {
    warnings.push_back("operator bound violated: " + v);
  }
  return {{"K", b.K},
          {"frobA1", b.frob_a1},
          {"frobA2", b.frob_a2},
          {"frobA", b.frob_a},
          {"frobM", b.frob_m},
          {"discreteOpNorm", b.discrete_op_norm},
          {"boundA1", b.bound_a1},
          {"boundA2", b.bound_a2},
          {"boundA", b.bound_a},
          {"boundM", b.bound_m},
          {"violations", b.violations}};
}

inline std::string meta_text(json meta) {
  meta["tool"] = {{"name", "nlwave"}, {"version", kVersion}};
  return meta.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// 1D problems

struct Problem1D {
  KernelSpec kernel;
  std::function<double(double)> u0;
  std::function<double(double)> v0;
  Forcing g;
};

inline RuleLayout galerkin_layout(const RunConfig& c, const KernelSpec& k) {
  return c.quadrature.value_or(default_rule_layout(k, c.N, c.domain));
}

inline Problem1D resolve_problem(const RunConfig& c) {
  Problem1D p;
  p.kernel = c.kernel.build(c.domain.width());
  if (c.manufactured()) {
    const ManufacturedSolution exact = *manufactured_by_id(c.g.id);
    const RuleLayout layout = c.solver == SolverKind::galerkin ? galerkin_layout(c, p.kernel)
                                                               : default_rule_layout(p.kernel, 0, c.domain);
    p.g = manufactured_forcing(exact, p.kernel, c.rho, forcing_reference_rule(layout, c.domain));
    const double tau0 = exact.envelope(0.0);
    const double rate0 = exact.envelope_rate(0.0);
    p.u0 = [exact, tau0](double x) { return exact.profile(x) * tau0; };
    p.v0 = [exact, rate0](double x) { return exact.profile(x) * rate0; };
    return p;
  }
  p.u0 = preset_function(c.u0, c.domain);
  p.v0 = preset_function(c.v0, c.domain);
  if (c.g.kind == "cosine") {
    p.g = Forcing::steady(preset_function(c.g, c.domain));
  }
  return p;
}

inline CollocationGrid build_grid(const RunConfig& c) {
  const double lo = c.domain.lo;
  const double hi = c.domain.hi;
  if (c.grid.type == "gauss") {
    return single_gauss_grid(lo, hi, c.grid.points);
  }
  if (c.grid.type == "composite") {
    return composite_grid(lo, hi, c.grid.subdomains, c.grid.points);
  }
  return midpoint_grid(lo, hi, c.grid.cells, c.kernel.periodic);
}

struct Solved1D {
  std::vector<Snapshot> snapshots;
  json meta;
  std::vector<double> weights; ///< collocation weights, empty for galerkin
};

/// Galerkin runs are sampled at `sample_at` when given, else on a uniform grid.
inline Solved1D solve_1d(const RunConfig& c, const std::vector<double>* sample_at = nullptr) {
  const Problem1D p = resolve_problem(c);
  Solved1D out;
  std::vector<std::string> warnings;
  out.meta["config"] = resolved_json(c);
  out.meta["kernelReport"] = kernel_report(p.kernel, c.domain, warnings);
  if (c.solver == SolverKind::galerkin) {
    const AssembledSystem sys =
        build_system(p.kernel, c.N, c.rho, p.g, c.a2, assembly_rule(galerkin_layout(c, p.kernel)), c.domain);
    out.meta["bounds"] = bounds_json(bounds_report(sys), warnings);
    const std::vector<double> grid =
        sample_at ? *sample_at : linspace(c.domain.lo, c.domain.hi, c.sample_points);
    out.snapshots = run(sys, p.u0, p.v0, c.dt, c.T, grid, c.snapshot_times, c.scheme);
  } else {
    const CollocationGrid grid = build_grid(c);
    out.meta["grid"] = {{"structure", std::string(to_string(grid.structure))},
                        {"nodes", grid.size()},
                        {"totalWeight", grid.total_weight()},
                        {"periodic", grid.periodic}};
    out.weights = grid.weights;
    out.snapshots = run_collocation_1d(p.kernel, grid, c.rho, p.g, p.u0, p.v0, c.dt, c.T, c.scheme,
                                       c.snapshot_times);
  }
  out.meta["warnings"] = warnings;
  return out;
}

// ---------------------------------------------------------------------------
// run

inline std::vector<Snapshot2D> solve_2d(const RunConfig& c) {
  const KernelSpec2D kernel = KernelSpec2D::isotropic_gaussian(c.kernel.scale, c.kernel.wrap_radius);
  TorusMidpointSolver solver(kernel, c.grid.cells, c.rho, c.dt);
  solver.set_initial(preset_function_2d(c.u0), preset_function_2d(c.v0));
  if (c.g.kind == "cosine") {
    auto g = preset_function_2d(c.g);
    solver.set_forcing([g](double x, double y, double) { return g(x, y); });
  }
  const StepPlan plan = plan_steps(c.dt, c.T, c.snapshot_times);
  std::vector<Snapshot2D> out;
  for (std::size_t target : plan.snapshot_steps) {
    while (solver.steps() < target) {
      solver.step();
    }
    for (double u : solver.displacement()) {
      if (!std::isfinite(u)) {
        throw NonConvergence("midpoint2d: solution became non-finite at step " + std::to_string(solver.steps()));
      }
    }
    out.push_back(solver.snapshot());
  }
  return out;
}

inline int cmd_run(const std::filesystem::path& config, const Options& opt, Streams io = {}) {
  return guarded(io, [&] {
    const RunConfig c = parse_run(load_json(config));
    OutputSet files;
    json meta;
    if (c.two_d()) {
      const auto snaps = solve_2d(c);
      std::vector<std::string> warnings;
      const KernelSpec2D kernel = KernelSpec2D::isotropic_gaussian(c.kernel.scale, c.kernel.wrap_radius);
      meta["config"] = resolved_json(c);
      meta["kernelReport"] = kernel_report(kernel.axis(), {0.0, 1.0}, warnings);
      meta["assumptions"] = {"kernel is the isotropic Gaussian (s/pi) exp(-s (x^2 + y^2)) periodized on the "
                             "unit torus; its image sum is the product of two periodized 1D kernels"};
      meta["warnings"] = warnings;
      files.add("snapshots.csv", snapshots_csv(std::span<const Snapshot2D>(snaps)));
    } else {
      Solved1D solved = solve_1d(c);
      meta = std::move(solved.meta);
      files.add("snapshots.csv", snapshots_csv(std::span<const Snapshot>(solved.snapshots)));
    }
    for (const auto& w : meta["warnings"]) {
      io.err << "warning: " << w.get<std::string>() << "\n";
    }
    files.add("meta.json", meta_text(meta));
    files.commit(opt.out);
    if (!opt.quiet) {
      io.log << "run: " << to_string(c.solver) << ", " << c.snapshot_times.size() << " snapshot(s) -> "
             << (opt.out / "snapshots.csv").string() << "\n";
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// convergence

inline int cmd_convergence(const std::filesystem::path& config, const Options& opt, Streams io = {}) {
  return guarded(io, [&] {
    const ConvergenceConfig c = parse_convergence(load_json(config));
    CsvWriter csv{"axis", "resolution", "errL2", "errLinf"};
    json meta;
    meta["config"] = {{"domain", {{"lo", c.setup.domain.lo}, {"hi", c.setup.domain.hi}}},
                      {"kernel", {{"family", "gaussian"}, {"s", c.setup.kernel.scale()}, {"delta", c.setup.kernel.width()},
                                  {"periodic", c.setup.kernel.periodic()}}},
                      {"rho", c.setup.rho},
                      {"a2Mode", std::string(to_string(c.setup.mode))},
                      {"manufactured", c.setup.exact.id},
                      {"T", c.setup.T}};
    if (c.setup.kernel.periodic()) {
      meta["config"]["kernel"]["period"] = c.setup.kernel.period();
      meta["config"]["kernel"]["wrapRadius"] = c.setup.kernel.wrap_radius();
    }
    std::vector<std::string> warnings;
    meta["kernelReport"] = kernel_report(c.setup.kernel, c.setup.domain, warnings);

    std::optional<ConvergenceReport> temporal;
    if (c.spatial) {
      const auto& sw = *c.spatial;
      const ConvergenceReport r = spatial_study(c.setup, sw.degrees, sw.dt, sw.scheme);
      for (const auto& s : r.samples) {
        csv.row("spatialN", s.resolution, s.err_l2, s.err_linf);
      }
      json quad = json::array();
      for (int N : sw.degrees) {
        const RuleLayout l = default_rule_layout(c.setup.kernel, N, c.setup.domain);
        quad.push_back({{"N", N}, {"panels", l.panels}, {"points", l.points_per_panel}});
      }
      meta["config"]["spatial"] = {{"N", sw.degrees}, {"dt", sw.dt}, {"scheme", std::string(to_string(sw.scheme))}};
      meta["quadrature"]["spatial"] = quad;
    }
    if (c.temporal) {
      const auto& sw = *c.temporal;
      ManufacturedSetup setup = c.setup;
      setup.T = sw.T;
      temporal = temporal_study(setup, sw.N, sw.dts, sw.scheme);
      for (const auto& s : temporal->samples) {
        csv.row("temporalDt", s.resolution, s.err_l2, s.err_linf);
      }
      const RuleLayout l = default_rule_layout(c.setup.kernel, sw.N, c.setup.domain);
      meta["config"]["temporal"] = {
          {"N", sw.N}, {"dt", sw.dts}, {"scheme", std::string(to_string(sw.scheme))}, {"T", sw.T}};
      meta["quadrature"]["temporal"] = {{"N", sw.N}, {"panels", l.panels}, {"points", l.points_per_panel}};
      const std::string order = temporal->fitted_order ? fmt(*temporal->fitted_order) : "none";
      csv.comment("fitted order temporalDt " + std::string(to_string(sw.scheme)) + " " + order);
      meta["fittedOrder"] = temporal->fitted_order ? json(*temporal->fitted_order) : json(nullptr);
    }
    meta["warnings"] = warnings;
    for (const auto& w : warnings) {
      io.err << "warning: " << w << "\n";
    }
    OutputSet files;
    files.add("convergence.csv", csv.str());
    files.add("meta.json", meta_text(meta));
    files.commit(opt.out);
    if (!opt.quiet) {
      io.log << "convergence -> " << (opt.out / "convergence.csv").string() << "\n";
      if (temporal) {
        io.log << "fitted temporal order (" << to_string(temporal->scheme) << "): "
               << (temporal->fitted_order ? fmt(*temporal->fitted_order) : "none") << "\n";
      }
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// stability

inline int cmd_stability(const std::filesystem::path& config, const Options& opt, Streams io = {}) {
  return guarded(io, [&] {
    const StabilityConfig c = parse_stability(load_json(config));
    const KernelSpec kernel = c.kernel.build(c.domain.width());
    CsvWriter csv{"scheme", "N", "dt", "radius", "powerEstimate", "powerConverged", "status"};
    int fails = 0;
    int unstable = 0;
    json quad = json::array();
    std::vector<AssembledSystem> systems;
    for (int N : c.degrees) {
      systems.push_back(build_system(kernel, N, c.rho, {}, c.a2, std::nullopt, c.domain));
      const RuleLayout l = default_rule_layout(kernel, N, c.domain);
      quad.push_back({{"N", N}, {"panels", l.panels}, {"points", l.points_per_panel}});
    }
    for (Scheme scheme : c.schemes) {
      for (const auto& sys : systems) {
        for (double dt : c.dts) {
          const StabilityReport r = spectral_radius_report(sys, dt, scheme, c.power_iterations);
          const bool ok = r.radius <= 1.0 + kRadiusSlack;
          std::string status;
          if (scheme == Scheme::paperImplicit) {
            status = ok ? "PASS" : "FAIL";
            fails += ok ? 0 : 1;
          } else {
            status = ok ? "STABLE" : "UNSTABLE";
            unstable += ok ? 0 : 1;
          }
          csv.row(to_string(scheme), sys.degree, dt, r.radius, r.power_estimate, r.power_converged, status);
        }
      }
    }
    json schemes = json::array();
    for (Scheme s : c.schemes) {
      schemes.push_back(std::string(to_string(s)));
    }
    std::vector<std::string> warnings;
    json meta;
    json kj = {{"family", "gaussian"}, {"s", kernel.scale()}, {"delta", kernel.width()}, {"periodic", kernel.periodic()}};
    if (kernel.periodic()) {
      kj["period"] = kernel.period();
      kj["wrapRadius"] = kernel.wrap_radius();
    }
    meta["config"] = {{"domain", {{"lo", c.domain.lo}, {"hi", c.domain.hi}}},
                      {"kernel", kj},
                      {"rho", c.rho},
                      {"a2Mode", std::string(to_string(c.a2))},
                      {"N", c.degrees},
                      {"dt", c.dts},
                      {"schemes", schemes},
                      {"powerIterations", c.power_iterations}};
    meta["quadrature"] = quad;
    meta["radiusTolerance"] = kRadiusSlack;
    meta["kernelReport"] = kernel_report(kernel, c.domain, warnings);
    meta["summary"] = {{"paperImplicitFail", fails}, {"otherUnstable", unstable}};
    meta["warnings"] = warnings;
    for (const auto& w : warnings) {
      io.err << "warning: " << w << "\n";
    }
    OutputSet files;
    files.add("stability.csv", csv.str());
    files.add("meta.json", meta_text(meta));
    files.commit(opt.out);
    if (fails > 0) {
      io.err << "stability: " << fails << " paperImplicit case(s) FAIL (radius > 1 + 1e-8)\n";
      return kExitFail;
    }
    if (!opt.quiet) {
      io.log << "stability: all paperImplicit cases PASS";
      if (unstable > 0) {
        io.log << "; " << unstable << " other-scheme case(s) UNSTABLE (informational)";
      }
      io.log << "\n";
    }
    return kExitOk;
  });
}

// ---------------------------------------------------------------------------
// compare

inline bool same_points(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) {
      return false;
    }
  }
  return true;
}

inline int cmd_compare(const std::filesystem::path& config, const Options& opt, Streams io = {}) {
  return guarded(io, [&] {
    const CompareConfig c = parse_compare(load_json(config));
    const bool ga = c.first.solver == SolverKind::galerkin;
    const bool gb = c.second.solver == SolverKind::galerkin;
    Solved1D a;
    Solved1D b;
    std::vector<double> weights;
    std::string basis;
    if (ga && gb) {
      const auto grid = linspace(c.first.domain.lo, c.first.domain.hi, c.first.sample_points);
      a = solve_1d(c.first, &grid);
      b = solve_1d(c.second, &grid);
      weights = trapezoid_weights(grid);
      basis = "first.samplePoints (trapezoid weights)";
    } else if (ga != gb) {
      const RunConfig& col = ga ? c.second : c.first;
      const CollocationGrid grid = build_grid(col);
      Solved1D colloc = solve_1d(col);
      Solved1D gal = solve_1d(ga ? c.first : c.second, &grid.points);
      weights = grid.weights;
      a = ga ? std::move(gal) : std::move(colloc);
      b = ga ? std::move(colloc) : std::move(gal);
      basis = "collocation nodes (quadrature weights)";
    } else {
      if (!same_points(build_grid(c.first).points, build_grid(c.second).points)) {
        throw ConfigError("second.grid", "collocation grids differ; compare needs identical nodes");
      }
      a = solve_1d(c.first);
      b = solve_1d(c.second);
      weights = a.weights;
      basis = "collocation nodes (quadrature weights)";
    }

    CsvWriter csv{"t", "errLinf", "errL2"};
    json rows = json::array();
    for (std::size_t i = 0; i < a.snapshots.size(); ++i) {
      const ErrorNorms e = error_norms(a.snapshots[i], b.snapshots[i], weights);
      csv.row(a.snapshots[i].t, e.linf, e.l2);
    }
    json meta;
    meta["first"] = std::move(a.meta);
    meta["second"] = std::move(b.meta);
    meta["comparisonGrid"] = {{"points", weights.size()}, {"basis", basis}};
    OutputSet files;
    files.add("compare.csv", csv.str());
    files.add("meta.json", meta_text(meta));
    files.commit(opt.out);
    if (!opt.quiet) {
      io.log << "compare: " << a.snapshots.size() << " snapshot(s) -> " << (opt.out / "compare.csv").string()
             << "\n";
    }
    return kExitOk;
  });
}

} // namespace nlwave::cli
