#pragma once

// Two-level time stepping for  M a'' = A a + b(t)  (M diagonal, A dense),
// snapshot sampling and the stability analysis of the one-step map.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlwave/assembly.hpp"
#include "nlwave/basis.hpp"
#include "nlwave/errors.hpp"
#include "nlwave/linalg.hpp"

namespace nlwave {

/// Any semi-discrete second-order system: diagonal mass, dense operator,
/// load vector b(t), and a diagonal D with D M^{-1} A D^{-1} symmetric.
template <class S>
concept SecondOrderSystem = requires(const S& s, double t) {
  { s.mass } -> std::convertible_to<Vector>;
  { s.op } -> std::convertible_to<Matrix>;
  { s.loads(t) } -> std::convertible_to<Vector>;
  { s.loads.is_zero() } -> std::convertible_to<bool>;
  { s.symmetrizer() } -> std::convertible_to<Vector>;
};

enum class Scheme {
  /// (a+ - 2a + a-)/dt^2 = M^{-1}A a+ + M^{-1} b(t_j)
  paperImplicit,
  /// leapfrog: operator at a
  explicitCentral,
  /// operator averaged over a+ and a-
  averagedImplicit,
};

inline std::string_view to_string(Scheme s) {
  switch (s) {
  case Scheme::paperImplicit:
    return "paperImplicit";
  case Scheme::explicitCentral:
    return "explicitCentral";
  case Scheme::averagedImplicit:
    return "averagedImplicit";
  }
  return "unknown";
}

struct EvolutionState {
  std::size_t step = 0;
  Vector prev;
  Vector curr;
  double dt = 0.0;
  Scheme scheme = Scheme::paperImplicit;

  /// Time of `curr`.
  double time() const noexcept { return static_cast<double>(step) * dt; }
};

struct Snapshot {
  double t = 0.0;
  std::vector<double> xs;
  std::vector<double> us;
};

/// Pivot magnitude below which the implicit matrix counts as singular.
inline constexpr double kPivotTolerance = 1e-14;

/// Holds the factorization of the implicit matrix for one (system, dt, scheme).
template <SecondOrderSystem S>
class TimeStepper {
public:
  TimeStepper(const S& system, double dt, Scheme scheme)
      : system_(&system), dt_(dt), scheme_(scheme) {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw std::invalid_argument("TimeStepper: dt must be positive");
    }
    inv_mass_ = system.mass.cwiseInverse();
    B_ = inv_mass_.asDiagonal() * system.op;
    const Eigen::Index n = B_.rows();
    if (scheme == Scheme::paperImplicit || scheme == Scheme::averagedImplicit) {
      const double c = scheme == Scheme::paperImplicit ? dt * dt : 0.5 * dt * dt;
      Matrix lhs = Matrix::Identity(n, n) - c * B_;
      lu_.compute(lhs);
      const double min_pivot = lu_.matrixLU().diagonal().cwiseAbs().minCoeff();
      if (!(min_pivot >= kPivotTolerance)) {
        throw SingularSystem("TimeStepper: implicit matrix has pivot " + std::to_string(min_pivot));
      }
    }
  }

  const S& system() const noexcept { return *system_; }
  double dt() const noexcept { return dt_; }
  Scheme scheme() const noexcept { return scheme_; }
  /// M^{-1} A.
  const Matrix& reduced_operator() const noexcept { return B_; }

  /// Second-order Taylor start: a1 = a0 + dt a0' + dt^2/2 (M^{-1}A a0 + M^{-1} b(0)).
  EvolutionState start(const Vector& a0, const Vector& adot0) const {
    EvolutionState s;
    s.dt = dt_;
    s.scheme = scheme_;
    s.step = 1;
    s.prev = a0;
    Vector accel = B_ * a0;
    if (!system_->loads.is_zero()) {
      accel += inv_mass_.cwiseProduct(system_->loads(0.0));
    }
    s.curr = a0 + dt_ * adot0 + (0.5 * dt_ * dt_) * accel;
    return s;
  }

  void advance(EvolutionState& s) const {
    const double h2 = dt_ * dt_;
    Vector rhs = 2.0 * s.curr - s.prev;
    if (!system_->loads.is_zero()) {
      rhs += h2 * inv_mass_.cwiseProduct(system_->loads(s.time()));
    }
    Vector next;
    switch (scheme_) {
    case Scheme::paperImplicit:
      next = lu_.solve(rhs);
      break;
    case Scheme::explicitCentral:
      rhs.noalias() += h2 * (B_ * s.curr);
      next = std::move(rhs);
      break;
    case Scheme::averagedImplicit:
      rhs.noalias() += (0.5 * h2) * (B_ * s.prev);
      next = lu_.solve(rhs);
      break;
    }
    s.prev = std::move(s.curr);
    s.curr = std::move(next);
    ++s.step;
  }

private:
  const S* system_;
  double dt_;
  Scheme scheme_;
  Vector inv_mass_;
  Matrix B_;
  Eigen::PartialPivLU<Matrix> lu_;
};

template <SecondOrderSystem S>
void step(EvolutionState& state, const TimeStepper<S>& stepper) {
  stepper.advance(state);
}

/// Projects u0, v0 onto the basis and takes the Taylor start step.
template <class U0, class V0>
EvolutionState init_state(const TimeStepper<AssembledSystem>& stepper, U0&& u0, V0&& v0) {
  const auto& sys = stepper.system();
  const CoefficientVector a0 = project(u0, sys.degree, sys.rule, sys.domain);
  const CoefficientVector adot0 = project(v0, sys.degree, sys.rule, sys.domain);
  return stepper.start(a0.coeffs, adot0.coeffs);
}

/// Alignment tolerance for snapshot times against step multiples.
inline constexpr double kAlignTolerance = 1e-9;

struct StepPlan {
  std::size_t total_steps = 0;
  std::vector<std::size_t> snapshot_steps; // ascending, unique
};

/// Validates T and the snapshot times against dt.
inline StepPlan plan_steps(double dt, double T, std::span<const double> times) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("plan_steps: dt must be positive");
  }
  if (!(T >= 0.0)) {
    throw std::invalid_argument("plan_steps: T must be nonnegative");
  }
  auto to_step = [dt](double t, const char* what) {
    const double n = std::round(t / dt);
    if (std::abs(t - n * dt) > kAlignTolerance) {
      throw MisalignedSnapshot(std::string(what) + " " + std::to_string(t) +
                               " is not a multiple of dt = " + std::to_string(dt));
    }
    return static_cast<std::size_t>(n);
  };
  StepPlan plan;
  plan.total_steps = to_step(T, "final time");
  for (double t : times) {
    if (t < -kAlignTolerance || t > T + kAlignTolerance) {
      throw MisalignedSnapshot("snapshot time " + std::to_string(t) + " outside [0, T]");
    }
    plan.snapshot_steps.push_back(to_step(t, "snapshot time"));
  }
  std::sort(plan.snapshot_steps.begin(), plan.snapshot_steps.end());
  plan.snapshot_steps.erase(std::unique(plan.snapshot_steps.begin(), plan.snapshot_steps.end()),
                            plan.snapshot_steps.end());
  return plan;
}

/// Steps from (a0, a0') through the plan, calling observe(t, a) at every
/// snapshot step.
template <SecondOrderSystem S, class Observe>
void march(const TimeStepper<S>& stepper, const Vector& a0, const Vector& adot0,
           const StepPlan& plan, Observe&& observe) {
  auto next = plan.snapshot_steps.begin();
  const auto end = plan.snapshot_steps.end();
  if (next != end && *next == 0) {
    observe(0.0, a0);
    ++next;
  }
  if (plan.total_steps == 0 || next == end) {
    return;
  }
  EvolutionState state = stepper.start(a0, adot0);
  while (true) {
    if (!state.curr.allFinite()) {
      throw NonConvergence("march: solution became non-finite at step " + std::to_string(state.step));
    }
    if (next != end && *next == state.step) {
      observe(state.time(), state.curr);
      ++next;
    }
    if (next == end || state.step >= plan.total_steps) {
      break;
    }
    stepper.advance(state);
  }
}

/// Galerkin run: u^N synthesized on `sample_grid` (physical points) at each
/// requested time.
template <class U0, class V0>
std::vector<Snapshot> run(const AssembledSystem& system, U0&& u0, V0&& v0, double dt, double T,
                          std::span<const double> sample_grid, std::span<const double> snapshot_times,
                          Scheme scheme = Scheme::paperImplicit) {
  const StepPlan plan = plan_steps(dt, T, snapshot_times);
  const TimeStepper<AssembledSystem> stepper(system, dt, scheme);
  const CoefficientVector a0 = project(u0, system.degree, system.rule, system.domain);
  const CoefficientVector adot0 = project(v0, system.degree, system.rule, system.domain);
  std::vector<double> xs(sample_grid.begin(), sample_grid.end());
  std::vector<Snapshot> out;
  march(stepper, a0.coeffs, adot0.coeffs, plan, [&](double t, const Vector& a) {
    out.push_back({t, xs, synthesize(CoefficientVector(a), xs, system.domain)});
  });
  return out;
}

/// E = 1/2 |(a+ - a)/dt|_M^2 - 1/2 a+^T A a, conserved by leapfrog when g = 0.
template <SecondOrderSystem S>
double discrete_energy(const S& system, const Vector& a, const Vector& a_next, double dt) {
  const Vector vel = (a_next - a) / dt;
  return 0.5 * vel.dot(system.mass.cwiseProduct(vel)) - 0.5 * a_next.dot(system.op * a);
}

/// One-step map [a+; a] = C [a; a-] of a scheme with the load removed.
template <SecondOrderSystem S>
Matrix companion_matrix(const S& system, double dt, Scheme scheme) {
  const Vector inv_mass = system.mass.cwiseInverse();
  const Matrix B = inv_mass.asDiagonal() * system.op;
  const Eigen::Index n = B.rows();
  const Matrix I = Matrix::Identity(n, n);
  const double h2 = dt * dt;
  Matrix P;
  Matrix Q;
  switch (scheme) {
  case Scheme::paperImplicit: {
    const Matrix inv = Matrix(I - h2 * B).partialPivLu().inverse();
    P = 2.0 * inv;
    Q = -inv;
    break;
  }
  case Scheme::explicitCentral:
    P = 2.0 * I + h2 * B;
    Q = -I;
    break;
  case Scheme::averagedImplicit:
    // S (I - dt^2/2 B) = I, so the a- coefficient reduces to -I
    P = 2.0 * Matrix(I - (0.5 * h2) * B).partialPivLu().inverse();
    Q = -I;
    break;
  }
  Matrix C = Matrix::Zero(2 * n, 2 * n);
  C.topLeftCorner(n, n) = P;
  C.topRightCorner(n, n) = Q;
  C.bottomLeftCorner(n, n) = I;
  return C;
}

struct PowerIterationResult {
  double estimate = 0.0;
  bool converged = false;
  long iterations = 0;
  double residual = std::numeric_limits<double>::infinity();
};

/// Power iteration for the dominant eigenvalue modulus.
///
/// Converged when the Rayleigh residual |Cx - lambda x| of the unit iterate
/// drops below `tolerance`. Otherwise the estimate is the geometric-mean
/// growth (|C^k x0| / |x0|)^(1/k), which still tends to the spectral radius
/// when the dominant eigenvalues are complex or defective.
inline PowerIterationResult power_iteration(const Matrix& C, double tolerance = 1e-10,
                                            long max_iterations = 100'000) {
  const Eigen::Index n = C.rows();
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Vector x(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i) = dist(rng);
  }
  x.normalize();

  PowerIterationResult out;
  double log_growth = 0.0;
  Vector y(n);
  for (long k = 1; k <= max_iterations; ++k) {
    y.noalias() = C * x;
    const double lambda = x.dot(y);
    const double norm = y.norm();
    out.iterations = k;
    out.residual = (y - lambda * x).norm();
    if (out.residual <= tolerance) {
      out.estimate = std::abs(lambda);
      out.converged = true;
      return out;
    }
    if (norm == 0.0) {
      out.estimate = 0.0;
      out.converged = true;
      return out;
    }
    log_growth += std::log(norm);
    x = y / norm;
  }
  out.estimate = std::exp(log_growth / static_cast<double>(out.iterations));
  return out;
}

/// Eigenvalues of M^{-1} A, computed through the symmetric similarity
/// transform supplied by the system.
template <SecondOrderSystem S>
Vector operator_eigenvalues(const S& system) {
  const Vector d = system.symmetrizer();
  const Vector inv_mass = system.mass.cwiseInverse();
  Matrix sym = d.asDiagonal() * (inv_mass.asDiagonal() * system.op) * d.cwiseInverse().asDiagonal();
  sym = 0.5 * (sym + sym.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

/// Largest root modulus of  alpha z^2 - beta z + gamma = 0.
inline double quadratic_root_modulus(double alpha, double beta, double gamma) {
  const double disc = beta * beta - 4.0 * alpha * gamma;
  if (disc < 0.0) {
    return std::sqrt(gamma / alpha);
  }
  const double q = 0.5 * (beta + std::copysign(std::sqrt(disc), beta));
  const double z1 = std::abs(q / alpha);
  const double z2 = q != 0.0 ? std::abs(gamma / q) : 0.0;
  return std::max(z1, z2);
}

/// Companion root modulus of one mode with M^{-1}A eigenvalue mu.
inline double modal_root_modulus(double mu, double dt, Scheme scheme) {
  const double h2 = dt * dt;
  switch (scheme) {
  case Scheme::paperImplicit:
    return quadratic_root_modulus(1.0 - h2 * mu, 2.0, 1.0);
  case Scheme::explicitCentral:
    return quadratic_root_modulus(1.0, 2.0 + h2 * mu, 1.0);
  case Scheme::averagedImplicit:
    return quadratic_root_modulus(1.0 - 0.5 * h2 * mu, 2.0, 1.0 - 0.5 * h2 * mu);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

struct StabilityReport {
  double radius = 0.0;           ///< modal: max over modes of the companion roots
  double power_estimate = 0.0;   ///< power iteration on the assembled companion matrix
  bool power_converged = false;
  long power_iterations = 0;
  double max_eigenvalue = 0.0;   ///< largest eigenvalue of M^{-1} A
};

/// Spectral radius of the one-step companion map.
///
/// The companion matrix of a conservative scheme has all its eigenvalues on
/// the unit circle (and a defective double root at z = 1 for the constant
/// mode), where power iteration cannot converge. The reported radius is
/// therefore the modal one: eigenvalues mu of M^{-1} A from the symmetric
/// similarity transform, each mapped to the roots of its scalar recurrence.
/// Eigenvalues within the eigensolver's backward error of zero are treated as
/// zero. Power iteration on the explicit companion matrix is run alongside
/// and reported with its convergence flag.
template <SecondOrderSystem S>
StabilityReport spectral_radius_report(const S& system, double dt, Scheme scheme,
                                       long max_power_iterations = 100'000) {
  StabilityReport report;
  const Vector mu = operator_eigenvalues(system);
  const double scale = mu.cwiseAbs().maxCoeff();
  const double null_tol = 256.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  report.max_eigenvalue = mu.maxCoeff();
  double radius = 0.0;
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    const double m = std::abs(mu(i)) <= null_tol ? 0.0 : mu(i);
    radius = std::max(radius, modal_root_modulus(m, dt, scheme));
  }
  report.radius = radius;

  const PowerIterationResult power =
      power_iteration(companion_matrix(system, dt, scheme), 1e-10, max_power_iterations);
  report.power_estimate = power.estimate;
  report.power_converged = power.converged;
  report.power_iterations = power.iterations;
  return report;
}

} // namespace nlwave
