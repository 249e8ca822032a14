#pragma once

// Nodal quadrature discretization of the nonlocal operator: the equation is
// imposed at the quadrature points and the integral replaced by the weighted
// sum over the same points. 1D Gauss / composite Gauss / midpoint grids share
// the time schemes of evolve.hpp; the 2D periodic midpoint solver on the unit
// torus uses semi-implicit Euler.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "nlwave/basis.hpp"
#include "nlwave/evolve.hpp"
#include "nlwave/forcing.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/linalg.hpp"

namespace nlwave {

enum class GridStructure { singleGauss, compositeGauss, uniformMidpoint };

inline std::string_view to_string(GridStructure s) {
  switch (s) {
  case GridStructure::singleGauss:
    return "singleGauss";
  case GridStructure::compositeGauss:
    return "compositeGauss";
  case GridStructure::uniformMidpoint:
    return "uniformMidpoint";
  }
  return "unknown";
}

struct CollocationGrid {
  std::vector<double> points;
  std::vector<double> weights;
  GridStructure structure = GridStructure::singleGauss;
  Interval domain;
  bool periodic = false;
  int subdomains = 1;
  int points_per_subdomain = 1;

  std::size_t size() const noexcept { return points.size(); }

  double total_weight() const noexcept {
    double sum = 0.0;
    for (double w : weights) {
      sum += w;
    }
    return sum;
  }
};

inline CollocationGrid single_gauss_grid(double lo, double hi, int K) {
  const QuadratureRule rule = gauss_rule(K, lo, hi);
  return {rule.nodes, rule.weights, GridStructure::singleGauss, {lo, hi}, false, 1, K};
}

/// N_h equal subdomains of [lo, hi], each with a K-point Gauss rule.
inline CollocationGrid composite_grid(double lo, double hi, int subdomains, int K) {
  if (subdomains < 1 || K < 1) {
    throw std::invalid_argument("composite_grid: need N_h >= 1 and K >= 1");
  }
  const QuadratureRule rule = composite_gauss_rule(subdomains, K, lo, hi);
  return {rule.nodes, rule.weights, GridStructure::compositeGauss, {lo, hi}, false, subdomains, K};
}

/// n cells of [lo, hi] with nodes at the cell centres and weight h.
inline CollocationGrid midpoint_grid(double lo, double hi, int n, bool periodic = false) {
  if (n < 1 || !(lo < hi)) {
    throw std::invalid_argument("midpoint_grid: need n >= 1 and lo < hi");
  }
  CollocationGrid grid;
  grid.structure = GridStructure::uniformMidpoint;
  grid.domain = {lo, hi};
  grid.periodic = periodic;
  grid.subdomains = n;
  grid.points_per_subdomain = 1;
  const double h = (hi - lo) / n;
  for (int i = 0; i < n; ++i) {
    grid.points.push_back(lo + (i + 0.5) * h);
    grid.weights.push_back(h);
  }
  return grid;
}

/// D_ki = rho w_i J(x_k - x_i) for i != k and D_kk = -sum_{i != k} D_ki, so
/// every row sums to zero.
inline Matrix assemble_collocation(const KernelSpec& kernel, const CollocationGrid& grid, double rho) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Matrix D(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    double diag = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k) {
        continue;
      }
      const auto ui = static_cast<std::size_t>(i);
      const double v = rho * grid.weights[ui] * kernel(grid.points[static_cast<std::size_t>(k)] - grid.points[ui]);
      D(k, i) = v;
      diag += v;
    }
    D(k, k) = -diag;
  }
  return D;
}

/// u'' = D u + g at the grid nodes (unit mass).
struct CollocationSystem {
  CollocationGrid grid;
  double rho = 1.0;
  Vector mass;
  Matrix op;
  LoadEvaluator loads;

  /// W^{1/2} D W^{-1/2} is symmetric.
  Vector symmetrizer() const {
    return Eigen::Map<const Vector>(grid.weights.data(), static_cast<Eigen::Index>(grid.size())).cwiseSqrt();
  }
};

inline CollocationSystem build_collocation_system(const KernelSpec& kernel, const CollocationGrid& grid,
                                                  double rho, const Forcing& g = {}) {
  CollocationSystem sys;
  sys.grid = grid;
  sys.rho = rho;
  const auto n = static_cast<Eigen::Index>(grid.size());
  sys.mass = Vector::Ones(n);
  sys.op = assemble_collocation(kernel, grid, rho);
  sys.loads = g.empty() ? LoadEvaluator(n) : LoadEvaluator(g, grid.points, std::nullopt);
  return sys;
}

/// Nodal values of u reported directly at the requested times.
template <class U0, class V0>
std::vector<Snapshot> run_collocation_1d(const KernelSpec& kernel, const CollocationGrid& grid, double rho,
                                         const Forcing& g, U0&& u0, V0&& v0, double dt, double T,
                                         Scheme scheme, std::span<const double> snapshot_times) {
  const StepPlan plan = plan_steps(dt, T, snapshot_times);
  const CollocationSystem sys = build_collocation_system(kernel, grid, rho, g);
  const TimeStepper<CollocationSystem> stepper(sys, dt, scheme);
  const auto n = static_cast<Eigen::Index>(grid.size());
  Vector a0(n);
  Vector adot0(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a0(i) = u0(grid.points[static_cast<std::size_t>(i)]);
    adot0(i) = v0(grid.points[static_cast<std::size_t>(i)]);
  }
  std::vector<Snapshot> out;
  march(stepper, a0, adot0, plan, [&](double t, const Vector& u) {
    out.push_back({t, grid.points, std::vector<double>(u.data(), u.data() + u.size())});
  });
  return out;
}

struct Snapshot2D {
  double t = 0.0;
  std::vector<double> centers; ///< cell centres along each axis
  std::vector<double> us;      ///< us[i * n + j] = u(x_i, y_j)
};

/// Midpoint quadrature on the n x n cell-centre grid of the unit torus,
/// advanced by semi-implicit Euler:
///   v+ = v + dt (D u + g),  u+ = u + dt v+.
class TorusMidpointSolver {
public:
  using Forcing2D = std::function<double(double, double, double)>;

  TorusMidpointSolver(const KernelSpec2D& kernel, int n, double rho, double dt)
      : n_(n), h_(1.0 / n), rho_(rho), dt_(dt) {
    if (n < 4) {
      throw std::invalid_argument("TorusMidpointSolver: need at least 4 cells per side");
    }
    if (!(dt > 0.0)) {
      throw std::invalid_argument("TorusMidpointSolver: dt must be positive");
    }
    const auto un = static_cast<std::size_t>(n);
    axis_table_.resize(un);
    for (std::size_t a = 0; a < un; ++a) {
      axis_table_[a] = kernel.axis()(static_cast<double>(a) * h_);
    }
    for (std::size_t i = 0; i < un; ++i) {
      centers_.push_back((static_cast<double>(i) + 0.5) * h_);
    }
    u_.assign(un * un, 0.0);
    v_.assign(un * un, 0.0);
    work_.assign(un * un, 0.0);
  }

  template <class U0, class V0>
  void set_initial(U0&& u0, V0&& v0) {
    const auto un = static_cast<std::size_t>(n_);
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j < un; ++j) {
        u_[i * un + j] = u0(centers_[i], centers_[j]);
        v_[i * un + j] = v0(centers_[i], centers_[j]);
      }
    }
    steps_ = 0;
  }

  /// g(x, y, t); empty means no forcing.
  void set_forcing(Forcing2D g) { forcing_ = std::move(g); }

  /// out = D u with (D u)_p = rho h^2 sum_q J(p - q) (u_q - u_p).
  void apply(std::span<const double> u, std::span<double> out) const {
    const auto un = static_cast<std::size_t>(n_);
    const double c = rho_ * h_ * h_;
    for (std::size_t i = 0; i < un; ++i) {
      for (std::size_t j = 0; j < un; ++j) {
        const double up = u[i * un + j];
        double sum = 0.0;
        for (std::size_t a = 0; a < un; ++a) {
          const std::size_t row = ((i + un - a) % un) * un;
          const double ja = axis_table_[a];
          double inner = 0.0;
          for (std::size_t b = 0; b < un; ++b) {
            inner += axis_table_[b] * (u[row + (j + un - b) % un] - up);
          }
          sum += ja * inner;
        }
        out[i * un + j] = c * sum;
      }
    }
  }

  void step() {
    apply(u_, work_);
    const auto un = static_cast<std::size_t>(n_);
    const double t = time();
    for (std::size_t p = 0; p < u_.size(); ++p) {
      double accel = work_[p];
      if (forcing_) {
        accel += forcing_(centers_[p / un], centers_[p % un], t);
      }
      v_[p] += dt_ * accel;
      u_[p] += dt_ * v_[p];
    }
    ++steps_;
  }

  /// Discrete momentum sum_p v_p h^2.
  double momentum() const {
    double sum = 0.0;
    for (double v : v_) {
      sum += v;
    }
    return sum * h_ * h_;
  }

  int cells() const noexcept { return n_; }
  double spacing() const noexcept { return h_; }
  double time() const noexcept { return static_cast<double>(steps_) * dt_; }
  std::size_t steps() const noexcept { return steps_; }
  const std::vector<double>& centers() const noexcept { return centers_; }
  const std::vector<double>& displacement() const noexcept { return u_; }
  const std::vector<double>& velocity() const noexcept { return v_; }

  Snapshot2D snapshot() const { return {time(), centers_, u_}; }

private:
  int n_;
  double h_;
  double rho_;
  double dt_;
  std::size_t steps_ = 0;
  std::vector<double> axis_table_;
  std::vector<double> centers_;
  std::vector<double> u_;
  std::vector<double> v_;
  std::vector<double> work_;
  Forcing2D forcing_;
};

template <class U0, class V0>
std::vector<Snapshot2D> run_midpoint_2d(const KernelSpec2D& kernel, int n, double rho, U0&& u0, V0&& v0,
                                        double dt, double T, std::span<const double> snapshot_times) {
  const StepPlan plan = plan_steps(dt, T, snapshot_times);
  TorusMidpointSolver solver(kernel, n, rho, dt);
  solver.set_initial(u0, v0);
  std::vector<Snapshot2D> out;
  for (std::size_t target : plan.snapshot_steps) {
    while (solver.steps() < target) {
      solver.step();
    }
    out.push_back(solver.snapshot());
  }
  return out;
}

} // namespace nlwave
