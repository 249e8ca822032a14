#pragma once

// Semi-discrete Legendre-Galerkin system  M a'' = A a + b(t)  for
// u_tt = rho L u + g with  L u(x) = int_Omega J(x - y) (u(y) - u(x)) dy.
//
// Everything is assembled on the reference interval [-1, 1]. For a physical
// domain of half-width h the weak form is divided by h, which keeps
// M = diag(2/(2k+1)) and turns the kernel into h J(h (xi - eta)).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "nlwave/basis.hpp"
#include "nlwave/forcing.hpp"
#include "nlwave/kernel.hpp"
#include "nlwave/linalg.hpp"

namespace nlwave {

/// How the local multiplier block int L_k L_j int J(x - y) dy dx is built.
enum class A2Mode {
  unitMass,  ///< kernel mass taken as 1: A2 = diag(2/(2k+1))
  exactMass, ///< kernel mass by quadrature on the same rule as A1
};

inline std::string_view to_string(A2Mode mode) {
  return mode == A2Mode::unitMass ? "unitMass" : "exactMass";
}

/// m_k = 2/(2k+1), k = 0..N.
inline Vector mass_diagonal(int N) {
  if (N < 0) {
    throw std::invalid_argument("mass_diagonal: negative degree");
  }
  Vector m(N + 1);
  for (int k = 0; k <= N; ++k) {
    m(k) = 2.0 / (2.0 * k + 1.0);
  }
  return m;
}

struct RuleLayout {
  int panels = 1;
  int points_per_panel = 1;
};

/// Panels no wider than 4/sqrt(s) (about 5.7 kernel widths) in physical
/// units, each with max(16, N+1) Gauss points so that every panel is exact
/// for the degree-2N products of basis functions.
inline RuleLayout default_rule_layout(const KernelSpec& kernel, int N, Interval domain) {
  const double panels = std::ceil(std::sqrt(kernel.scale()) * domain.width() / 4.0);
  return {std::max(1, static_cast<int>(panels)), std::max(16, N + 1)};
}

inline QuadratureRule assembly_rule(RuleLayout layout) {
  return composite_gauss_rule(layout.panels, layout.points_per_panel, -1.0, 1.0);
}

inline QuadratureRule default_assembly_rule(const KernelSpec& kernel, int N,
                                            Interval domain = reference_interval) {
  return assembly_rule(default_rule_layout(kernel, N, domain));
}

namespace detail {

/// K(l, m) = h J(x_l - x_m) with x the physical images of the rule nodes.
inline Matrix reference_kernel_matrix(const KernelSpec& kernel, const QuadratureRule& rule,
                                      Interval domain) {
  const auto q = static_cast<Eigen::Index>(rule.size());
  const double h = domain.half_width();
  std::vector<double> x(rule.size());
  for (std::size_t l = 0; l < rule.size(); ++l) {
    x[l] = domain.to_physical(rule.nodes[l]);
  }
  Matrix K(q, q);
  for (Eigen::Index l = 0; l < q; ++l) {
    K(l, l) = h * kernel(0.0);
    for (Eigen::Index m = l + 1; m < q; ++m) {
      const double v = h * kernel(x[static_cast<std::size_t>(l)] - x[static_cast<std::size_t>(m)]);
      K(l, m) = v;
      K(m, l) = v;
    }
  }
  return K;
}

inline Vector weights_of(const QuadratureRule& rule) {
  return Eigen::Map<const Vector>(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
}

/// diag(w) V with V(l, k) = L_k(xi_l).
inline Matrix weighted_vandermonde(int N, const QuadratureRule& rule) {
  Matrix V = vandermonde(N, rule.nodes);
  return weights_of(rule).asDiagonal() * V;
}

struct Blocks {
  Matrix a1;
  Matrix a2;
};

inline Blocks assemble_blocks(A2Mode mode, const KernelSpec& kernel, int N,
                              const QuadratureRule& rule, Interval domain) {
  if (N < 0) {
    throw std::invalid_argument("assembly: negative degree");
  }
  require_reference_rule(rule, "assembly");
  require_points(rule, N, "assembly");

  const Matrix K = reference_kernel_matrix(kernel, rule, domain);
  const Matrix WV = weighted_vandermonde(N, rule);
  Blocks out;
  out.a1 = WV.transpose() * (K * WV);
  if (mode == A2Mode::unitMass) {
    out.a2 = mass_diagonal(N).asDiagonal();
  } else {
    // c_l = sum_m w_m K(l, m): the discrete kernel mass seen by node l
    const Vector c = K * weights_of(rule);
    const Matrix V = vandermonde(N, rule.nodes);
    out.a2 = WV.transpose() * (c.asDiagonal() * V);
  }
  return out;
}

} // namespace detail

/// (A1)_kj = sum_l sum_m w_l w_m L_k(x_l) J(x_l - x_m) L_j(x_m).
inline Matrix assemble_A1(const KernelSpec& kernel, int N, const QuadratureRule& rule,
                          Interval domain = reference_interval) {
  detail::require_reference_rule(rule, "assemble_A1");
  detail::require_points(rule, N, "assemble_A1");
  const Matrix K = detail::reference_kernel_matrix(kernel, rule, domain);
  const Matrix WV = detail::weighted_vandermonde(N, rule);
  return WV.transpose() * (K * WV);
}

/// unitMass: diag(2/(2k+1)). exactMass: sum_l w_l L_k(x_l) L_j(x_l) c(x_l)
/// with c(x_l) = sum_m w_m J(x_l - x_m) on the same rule as A1.
inline Matrix assemble_A2(A2Mode mode, const KernelSpec& kernel, int N, const QuadratureRule& rule,
                          Interval domain = reference_interval) {
  if (mode == A2Mode::unitMass) {
    detail::require_points(rule, N, "assemble_A2");
    return mass_diagonal(N).asDiagonal();
  }
  return detail::assemble_blocks(mode, kernel, N, rule, domain).a2;
}

/// b_k(t) = sum_l w_l g(x_l, t) L_k(x_l).
inline Vector assemble_load(const Forcing& g, double t, int N, const QuadratureRule& rule,
                            Interval domain = reference_interval) {
  detail::require_reference_rule(rule, "assemble_load");
  detail::require_points(rule, N, "assemble_load");
  std::vector<double> x(rule.size());
  for (std::size_t l = 0; l < rule.size(); ++l) {
    x[l] = domain.to_physical(rule.nodes[l]);
  }
  return LoadEvaluator(g, std::move(x), detail::weighted_vandermonde(N, rule))(t);
}

/// M a'' = A a + b(t) with A = rho (A1 - A2). Both blocks are stored
/// positive; immutable once built.
struct AssembledSystem {
  int degree = 0;
  double rho = 1.0;
  A2Mode mode = A2Mode::exactMass;
  Interval domain = reference_interval;
  KernelSpec kernel;
  QuadratureRule rule;
  Vector mass;
  Matrix a1;
  Matrix a2;
  Matrix op;
  LoadEvaluator loads;

  Eigen::Index size() const noexcept { return mass.size(); }

  /// diag(sqrt(m)) makes M^{-1} A similar to the symmetric M^{-1/2} A M^{-1/2}.
  Vector symmetrizer() const { return mass.cwiseSqrt(); }

  /// Physical coordinates of the quadrature nodes.
  std::vector<double> physical_nodes() const {
    std::vector<double> x(rule.size());
    for (std::size_t l = 0; l < rule.size(); ++l) {
      x[l] = domain.to_physical(rule.nodes[l]);
    }
    return x;
  }
};

inline AssembledSystem build_system(const KernelSpec& kernel, int N, double rho, const Forcing& g,
                                    A2Mode mode, std::optional<QuadratureRule> rule = std::nullopt,
                                    Interval domain = reference_interval) {
  if (!(rho >= 0.0) || !std::isfinite(rho)) {
    throw std::invalid_argument("build_system: rho must be nonnegative and finite");
  }
  if (!(domain.lo < domain.hi)) {
    throw std::invalid_argument("build_system: empty domain");
  }
  AssembledSystem sys;
  sys.degree = N;
  sys.rho = rho;
  sys.mode = mode;
  sys.domain = domain;
  sys.kernel = kernel;
  sys.rule = rule ? std::move(*rule) : default_assembly_rule(kernel, N, domain);

  auto blocks = detail::assemble_blocks(mode, kernel, N, sys.rule, domain);
  sys.mass = mass_diagonal(N);
  sys.a1 = std::move(blocks.a1);
  sys.a2 = std::move(blocks.a2);
  sys.op = rho * (sys.a1 - sys.a2);
  if (g.empty()) {
    sys.loads = LoadEvaluator(N + 1);
  } else {
    sys.loads = LoadEvaluator(g, sys.physical_nodes(), detail::weighted_vandermonde(N, sys.rule));
  }
  return sys;
}

} // namespace nlwave
