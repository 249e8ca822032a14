#pragma once

// Taylor moments of the kernel, the local wave reference solver,
// manufactured-solution convergence studies, error norms and operator bounds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/assembly.hpp"
#include "nlwave/basis.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/forcing.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/linalg.hpp"

namespace nlwave {

// ---------------------------------------------------------------------------
// Taylor moments

/// C_{2m} = rho / (2m)! * int z^{2m} J(z) dz for m = 1..m_max, plus the odd
/// moments int z^{2m-1} J(z) dz, which vanish for a symmetric kernel.
struct MomentTable {
  double rho = 1.0;
  double scale = 1.0;
  double radius = 0.0;       ///< integration half-width
  std::vector<double> even;  ///< even[m-1] = C_{2m}
  std::vector<double> odd;   ///< odd[m-1] = int z^{2m-1} J

  double coefficient(int m) const { return even.at(static_cast<std::size_t>(m - 1)); }
};

inline MomentTable taylor_coefficients(const KernelSpec& kernel, double rho, int m_max) {
  if (m_max < 1) {
    throw std::invalid_argument("taylor_coefficients: m_max must be >= 1");
  }
  MomentTable table;
  table.rho = rho;
  table.scale = kernel.scale();
  table.radius = truncation_radius(kernel.width(), 1e-15);
  const QuadratureRule rule = composite_gauss_rule(64, 24, -table.radius, table.radius);
  double factorial = 1.0;
  for (int m = 1; m <= m_max; ++m) {
    factorial *= (2.0 * m - 1.0) * (2.0 * m);
    double even = 0.0;
    double odd = 0.0;
    for (std::size_t l = 0; l < rule.size(); ++l) {
      const double z = rule.nodes[l];
      const double wj = rule.weights[l] * kernel.free_space(z);
      const double zodd = std::pow(z, 2 * m - 1);
      odd += wj * zodd;
      even += wj * zodd * z;
    }
    table.even.push_back(rho * even / factorial);
    table.odd.push_back(odd);
  }
  return table;
}

// ---------------------------------------------------------------------------
// Local wave reference

/// u_tt = C2 u_xx + g on [lo, hi] by second-order central differences on nx
/// points with mirror (zero-flux) ends. Taylor start step as in evolve.hpp.
template <class U0, class V0>
std::vector<Snapshot> local_reference(double C2, U0&& u0, V0&& v0, const Forcing& g, Interval domain,
                                      double T, int nx, double dt, std::span<const double> snapshot_times) {
  if (nx < 3) {
    throw std::invalid_argument("local_reference: need at least 3 points");
  }
  if (!(C2 >= 0.0)) {
    throw std::invalid_argument("local_reference: C2 must be nonnegative");
  }
  const double h = domain.width() / (nx - 1);
  const double courant = std::sqrt(C2) * dt / h;
  if (courant > 1.0) {
    throw CflViolation("local_reference: sqrt(C2) dt / h = " + std::to_string(courant) + " > 1");
  }
  const StepPlan plan = plan_steps(dt, T, snapshot_times);
  const auto n = static_cast<std::size_t>(nx);
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = domain.lo + static_cast<double>(i) * h;
  }
  xs.back() = domain.hi;

  auto laplacian = [&](const std::vector<double>& u, std::vector<double>& out) {
    const double c = C2 / (h * h);
    out[0] = c * 2.0 * (u[1] - u[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      out[i] = c * (u[i + 1] - 2.0 * u[i] + u[i - 1]);
    }
    out[n - 1] = c * 2.0 * (u[n - 2] - u[n - 1]);
  };
  auto add_forcing = [&](std::vector<double>& out, double t) {
    if (g.empty()) {
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      out[i] += g(xs[i], t);
    }
  };

  std::vector<double> prev(n);
  std::vector<double> curr(n);
  std::vector<double> acc(n);
  for (std::size_t i = 0; i < n; ++i) {
    prev[i] = u0(xs[i]);
  }
  std::vector<Snapshot> out;
  auto next = plan.snapshot_steps.begin();
  if (next != plan.snapshot_steps.end() && *next == 0) {
    out.push_back({0.0, xs, prev});
    ++next;
  }
  if (plan.total_steps == 0 || next == plan.snapshot_steps.end()) {
    return out;
  }
  laplacian(prev, acc);
  add_forcing(acc, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    curr[i] = prev[i] + dt * v0(xs[i]) + 0.5 * dt * dt * acc[i];
  }
  for (std::size_t stepno = 1;; ++stepno) {
    if (next != plan.snapshot_steps.end() && *next == stepno) {
      out.push_back({static_cast<double>(stepno) * dt, xs, curr});
      ++next;
    }
    if (next == plan.snapshot_steps.end() || stepno >= plan.total_steps) {
      break;
    }
    laplacian(curr, acc);
    add_forcing(acc, static_cast<double>(stepno) * dt);
    for (std::size_t i = 0; i < n; ++i) {
      const double nv = 2.0 * curr[i] - prev[i] + dt * dt * acc[i];
      prev[i] = curr[i];
      curr[i] = nv;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Error norms

struct ErrorNorms {
  double l2 = 0.0;
  double linf = 0.0;
};

/// Trapezoid weights on an increasing grid.
inline std::vector<double> trapezoid_weights(std::span<const double> xs) {
  std::vector<double> w(xs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double half = 0.5 * (xs[i + 1] - xs[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

/// L2 by the given weights, L-infinity as the largest nodal difference.
inline ErrorNorms error_norms(const Snapshot& s, const Snapshot& ref, std::span<const double> weights) {
  if (s.xs.size() != ref.xs.size() || s.us.size() != s.xs.size() || ref.us.size() != ref.xs.size() ||
      weights.size() != s.xs.size()) {
    throw GridMismatch("error_norms: snapshot sizes differ");
  }
  ErrorNorms out;
  double sum = 0.0;
  for (std::size_t i = 0; i < s.xs.size(); ++i) {
    if (std::abs(s.xs[i] - ref.xs[i]) > 1e-12 * std::max(1.0, std::abs(s.xs[i]))) {
      throw GridMismatch("error_norms: sample points differ at index " + std::to_string(i));
    }
    const double d = s.us[i] - ref.us[i];
    sum += weights[i] * d * d;
    out.linf = std::max(out.linf, std::abs(d));
  }
  out.l2 = std::sqrt(sum);
  return out;
}

/// L2 by the trapezoid rule on the sample grid.
inline ErrorNorms error_norms(const Snapshot& s, const Snapshot& ref) {
  return error_norms(s, ref, trapezoid_weights(s.xs));
}

/// Against a reference function of x evaluated at the snapshot's points.
template <class F>
  requires std::invocable<F&, double>
ErrorNorms error_norms(const Snapshot& s, F&& ref) {
  Snapshot r{s.t, s.xs, {}};
  r.us.reserve(s.xs.size());
  for (double x : s.xs) {
    r.us.push_back(ref(x));
  }
  return error_norms(s, r);
}

// ---------------------------------------------------------------------------
// Manufactured solutions

/// Separable exact solution u*(x, t) = phi(x) tau(t).
struct ManufacturedSolution {
  std::string id;
  std::function<double(double)> profile;
  std::function<double(double)> envelope;
  std::function<double(double)> envelope_rate;  ///< tau'
  std::function<double(double)> envelope_accel; ///< tau''

  double operator()(double x, double t) const { return profile(x) * envelope(t); }
};

/// exp(-9 x^2) cos(t).
inline ManufacturedSolution gaussian_cosine_solution() {
  return {"gaussCos",
          [](double x) { return std::exp(-9.0 * x * x); },
          [](double t) { return std::cos(t); },
          [](double t) { return -std::sin(t); },
          [](double t) { return -std::cos(t); }};
}

/// (x^3 - x/2 + 1/4)(1 + t + t^2/2): cubic in space, quadratic in time.
inline ManufacturedSolution polynomial_solution() {
  return {"polyQuad",
          [](double x) { return x * x * x - 0.5 * x + 0.25; },
          [](double t) { return 1.0 + t + 0.5 * t * t; },
          [](double t) { return 1.0 + t; },
          [](double) { return 1.0; }};
}

inline std::optional<ManufacturedSolution> manufactured_by_id(const std::string& id) {
  if (id == "gaussCos") {
    return gaussian_cosine_solution();
  }
  if (id == "polyQuad") {
    return polynomial_solution();
  }
  return std::nullopt;
}

/// (L phi)(x) = int_domain J(x - y) (phi(y) - phi(x)) dy by `rule` (on the
/// physical domain).
inline std::function<double(double)> nonlocal_operator_on(const KernelSpec& kernel,
                                                          std::function<double(double)> phi,
                                                          QuadratureRule rule) {
  std::vector<double> phi_nodes(rule.size());
  for (std::size_t m = 0; m < rule.size(); ++m) {
    phi_nodes[m] = phi(rule.nodes[m]);
  }
  return [kernel, phi = std::move(phi), rule = std::move(rule), phi_nodes = std::move(phi_nodes)](double x) {
    const double px = phi(x);
    double sum = 0.0;
    for (std::size_t m = 0; m < rule.size(); ++m) {
      sum += rule.weights[m] * kernel(x - rule.nodes[m]) * (phi_nodes[m] - px);
    }
    return sum;
  };
}

/// Reference rule for manufactured forcing: four times the assembly node count.
inline QuadratureRule forcing_reference_rule(RuleLayout assembly_layout, Interval domain) {
  return composite_gauss_rule(2 * assembly_layout.panels, 2 * assembly_layout.points_per_panel, domain.lo,
                              domain.hi);
}

/// g = phi tau'' - rho tau L phi.
inline Forcing manufactured_forcing(const ManufacturedSolution& u, const KernelSpec& kernel, double rho,
                                    const QuadratureRule& reference_rule) {
  auto Lphi = nonlocal_operator_on(kernel, u.profile, reference_rule);
  Forcing g = Forcing::separable(u.profile, u.envelope_accel);
  auto envelope = u.envelope;
  g += Forcing::separable([Lphi, rho](double x) { return -rho * Lphi(x); }, envelope);
  return g;
}

enum class ConvergenceAxis { spatialN, temporalDt };

inline std::string_view to_string(ConvergenceAxis a) {
  return a == ConvergenceAxis::spatialN ? "spatialN" : "temporalDt";
}

struct ConvergenceSample {
  double resolution = 0.0;
  double err_l2 = 0.0;
  double err_linf = 0.0;
  double err_accel_l2 = 0.0; ///< semi-discrete acceleration against u*_tt
};

struct ConvergenceReport {
  ConvergenceAxis axis = ConvergenceAxis::spatialN;
  Scheme scheme = Scheme::averagedImplicit;
  std::vector<ConvergenceSample> samples;
  std::optional<double> fitted_order;
};

struct ManufacturedSetup {
  ManufacturedSolution exact = gaussian_cosine_solution();
  KernelSpec kernel = KernelSpec::gaussian(400.0);
  double rho = 1.0;
  Interval domain = reference_interval;
  A2Mode mode = A2Mode::exactMass;
  double T = 0.1;
};

/// Errors below this are treated as round-off and left out of order fits.
inline constexpr double kPlateau = 5e-11;

/// Least-squares slope of log(err) against log(dt); samples under the
/// plateau are skipped.
inline std::optional<double> fit_order(std::span<const ConvergenceSample> samples) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : samples) {
    if (s.err_l2 >= kPlateau && s.resolution > 0.0) {
      pts.emplace_back(std::log(s.resolution), std::log(s.err_l2));
    }
  }
  if (pts.size() < 2) {
    return std::nullopt;
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

/// One Galerkin solve of the manufactured problem, errors at t = T.
inline ConvergenceSample solve_manufactured(const ManufacturedSetup& setup, int N, double dt, Scheme scheme) {
  const RuleLayout layout = default_rule_layout(setup.kernel, N, setup.domain);
  const Forcing g = manufactured_forcing(setup.exact, setup.kernel, setup.rho,
                                         forcing_reference_rule(layout, setup.domain));
  const AssembledSystem sys = build_system(setup.kernel, N, setup.rho, g, setup.mode, assembly_rule(layout),
                                           setup.domain);
  const TimeStepper<AssembledSystem> stepper(sys, dt, scheme);
  const auto& u = setup.exact;
  const double tau0 = u.envelope(0.0);
  const double rate0 = u.envelope_rate(0.0);
  const Vector a0 = project([&](double x) { return u.profile(x) * tau0; }, N, sys.rule, sys.domain).coeffs;
  const Vector adot0 =
      project([&](double x) { return u.profile(x) * rate0; }, N, sys.rule, sys.domain).coeffs;

  const double times[] = {setup.T};
  const StepPlan plan = plan_steps(dt, setup.T, times);
  Vector aT = a0;
  march(stepper, a0, adot0, plan, [&](double, const Vector& a) { aT = a; });

  const Vector accel = sys.mass.cwiseInverse().cwiseProduct(sys.op * aT + sys.loads(setup.T));
  const CoefficientVector coeffs(aT);
  const CoefficientVector accel_coeffs(accel);

  ConvergenceSample sample;
  const QuadratureRule err_rule = composite_gauss_rule(16, 24, -1.0, 1.0);
  const double h = setup.domain.half_width();
  const auto uN = synthesize(coeffs, err_rule.nodes);
  const auto aN = synthesize(accel_coeffs, err_rule.nodes);
  const double tauT = u.envelope(setup.T);
  const double accT = u.envelope_accel(setup.T);
  double l2 = 0.0;
  double acc2 = 0.0;
  for (std::size_t l = 0; l < err_rule.size(); ++l) {
    const double x = setup.domain.to_physical(err_rule.nodes[l]);
    const double w = h * err_rule.weights[l];
    const double d = uN[l] - u.profile(x) * tauT;
    const double da = aN[l] - u.profile(x) * accT;
    l2 += w * d * d;
    acc2 += w * da * da;
  }
  sample.err_l2 = std::sqrt(l2);
  sample.err_accel_l2 = std::sqrt(acc2);

  constexpr int linf_points = 401;
  std::vector<double> grid(linf_points);
  for (int i = 0; i < linf_points; ++i) {
    grid[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (linf_points - 1);
  }
  const auto ug = synthesize(coeffs, grid);
  for (int i = 0; i < linf_points; ++i) {
    const double x = setup.domain.to_physical(grid[static_cast<std::size_t>(i)]);
    sample.err_linf = std::max(sample.err_linf, std::abs(ug[static_cast<std::size_t>(i)] - u.profile(x) * tauT));
  }
  return sample;
}

inline ConvergenceReport spatial_study(const ManufacturedSetup& setup, std::span<const int> degrees, double dt,
                                       Scheme scheme) {
  ConvergenceReport report;
  report.axis = ConvergenceAxis::spatialN;
  report.scheme = scheme;
  for (int N : degrees) {
    ConvergenceSample s = solve_manufactured(setup, N, dt, scheme);
    s.resolution = N;
    report.samples.push_back(s);
  }
  return report;
}

inline ConvergenceReport temporal_study(const ManufacturedSetup& setup, int N, std::span<const double> dts,
                                        Scheme scheme) {
  ConvergenceReport report;
  report.axis = ConvergenceAxis::temporalDt;
  report.scheme = scheme;
  for (double dt : dts) {
    ConvergenceSample s = solve_manufactured(setup, N, dt, scheme);
    s.resolution = dt;
    report.samples.push_back(s);
  }
  report.fitted_order = fit_order(report.samples);
  return report;
}

/// Spatial sweep at a fixed small dt and temporal sweep at a fixed large N.
inline std::pair<ConvergenceReport, ConvergenceReport>
manufactured_study(const ManufacturedSetup& setup, std::span<const int> degrees, double spatial_dt,
                   Scheme spatial_scheme, int temporal_degree, std::span<const double> dts,
                   Scheme temporal_scheme) {
  return {spatial_study(setup, degrees, spatial_dt, spatial_scheme),
          temporal_study(setup, temporal_degree, dts, temporal_scheme)};
}

// ---------------------------------------------------------------------------
// Operator bounds

struct BoundsReport {
  double K = 0.0;               ///< largest kernel value over node pairs (reference scaling)
  double frob_a1 = 0.0;
  double frob_a2 = 0.0;
  double frob_a = 0.0;
  double frob_m = 0.0;
  double discrete_op_norm = 0.0; ///< |M^{-1/2} (A1 - A2) M^{-1/2}|_2
  double bound_a1 = 0.0;         ///< 4 (N+1) K
  double bound_a2 = 4.0;
  double bound_a = 0.0;          ///< 4 rho ((N+1) K + 1)
  double bound_m = 0.0;          ///< sqrt(4 + 4 (pi^2/6 - 1))
  std::vector<std::string> violations;

  bool ok() const noexcept { return violations.empty(); }
};

inline constexpr double kOpNormSlack = 1e-6;

inline BoundsReport bounds_report(const AssembledSystem& sys) {
  BoundsReport r;
  const int N = sys.degree;
  // J peaks at zero separation, which every node pair (l, l) realizes
  const double K = sys.domain.half_width() * sys.kernel(0.0);
  r.K = K;
  r.frob_a1 = sys.a1.norm();
  r.frob_a2 = sys.a2.norm();
  r.frob_a = sys.op.norm();
  r.frob_m = sys.mass.norm();
  r.bound_a1 = 4.0 * (N + 1) * K;
  r.bound_a = 4.0 * sys.rho * ((N + 1) * K + 1.0);
  r.bound_m = std::sqrt(4.0 + 4.0 * (std::numbers::pi * std::numbers::pi / 6.0 - 1.0));

  const Vector s = sys.mass.cwiseSqrt().cwiseInverse();
  Matrix scaled = s.asDiagonal() * Matrix(sys.a1 - sys.a2) * s.asDiagonal();
  scaled = 0.5 * (scaled + scaled.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(scaled, Eigen::EigenvaluesOnly);
  r.discrete_op_norm = eig.eigenvalues().cwiseAbs().maxCoeff();

  if (!(r.frob_a1 <= r.bound_a1)) {
    r.violations.push_back("|A1|_F > 4(N+1)K");
  }
  if (sys.mode == A2Mode::unitMass && !(r.frob_a2 < r.bound_a2)) {
    r.violations.push_back("|A2|_F >= 4");
  }
  if (!(r.frob_a <= r.bound_a)) {
    r.violations.push_back("|A|_F > 4 rho ((N+1)K + 1)");
  }
  if (!(r.discrete_op_norm <= 2.0 + kOpNormSlack)) {
    r.violations.push_back("|M^-1/2 (A1 - A2) M^-1/2|_2 > 2");
  }
  if (!(r.frob_m >= 2.0 && r.frob_m < r.bound_m)) {
    r.violations.push_back("|M|_F outside [2, sqrt(4 + 4(pi^2/6 - 1)))");
  }
  return r;
}

} // namespace nlwave
