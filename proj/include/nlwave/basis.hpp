#pragma once

// Legendre basis on the reference interval [-1, 1], Gauss-Legendre rules and
// the projection / synthesis pair between physical functions and coefficients.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nlwave/errors.hpp"
#include "nlwave/linalg.hpp"

namespace nlwave {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  double width() const noexcept { return hi - lo; }
  double mid() const noexcept { return 0.5 * (lo + hi); }
  double half_width() const noexcept { return 0.5 * (hi - lo); }

  /// Affine map from [-1, 1] onto this interval.
  double to_physical(double xi) const noexcept { return mid() + half_width() * xi; }
  double to_reference(double x) const noexcept { return (x - mid()) / half_width(); }

  bool operator==(const Interval&) const = default;
};

inline constexpr Interval reference_interval{-1.0, 1.0};

/// L_n(x) from the three-term recurrence starting at L_0 = 1, L_1 = x.
/// Arguments outside [-1, 1] extrapolate the polynomial.
inline double legendre_eval(int n, double x) {
  if (n < 0) {
    throw std::invalid_argument("legendre_eval: negative degree");
  }
  if (n == 0) {
    return 1.0;
  }
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  return curr;
}

/// Fills out[n] = L_n(x) for n = 0 .. out.size()-1 in a single recurrence pass.
inline void legendre_eval_all(double x, std::span<double> out) {
  if (out.empty()) {
    return;
  }
  out[0] = 1.0;
  if (out.size() == 1) {
    return;
  }
  out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kd = static_cast<double>(k);
    out[k + 1] = ((2.0 * kd + 1.0) * x * out[k] - kd * out[k - 1]) / (kd + 1.0);
  }
}

inline std::vector<double> legendre_eval_all(int N, double x) {
  if (N < 0) {
    throw std::invalid_argument("legendre_eval_all: negative degree");
  }
  std::vector<double> out(static_cast<std::size_t>(N) + 1);
  legendre_eval_all(x, out);
  return out;
}

namespace detail {

/// (L_n(x), L_n'(x)) for n >= 1 and |x| < 1.
inline std::pair<double, double> legendre_with_derivative(int n, double x) {
  double prev = 1.0;
  double curr = x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
    prev = curr;
    curr = next;
  }
  const double deriv = n * (x * curr - prev) / (x * x - 1.0);
  return {curr, deriv};
}

} // namespace detail

/// Nodes and positive weights of a quadrature rule on `interval`.
/// Nodes are stored in ascending order.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  Interval interval;

  std::size_t size() const noexcept { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      sum += weights[l] * f(nodes[l]);
    }
    return sum;
  }

  double total_weight() const noexcept {
    double sum = 0.0;
    for (double w : weights) {
      sum += w;
    }
    return sum;
  }

  /// Same rule carried affinely onto `target`.
  QuadratureRule mapped_to(Interval target) const {
    QuadratureRule out;
    out.interval = target;
    out.nodes.reserve(size());
    out.weights.reserve(size());
    const double ratio = target.width() / interval.width();
    for (std::size_t l = 0; l < size(); ++l) {
      out.nodes.push_back(target.to_physical(interval.to_reference(nodes[l])));
      out.weights.push_back(weights[l] * ratio);
    }
    return out;
  }
};

/// n-point Gauss-Legendre rule on [lo, hi].
///
/// Nodes are the roots of L_n found by Newton iteration from the guesses
/// cos(pi (4i - 1) / (4n + 2)); only the nonnegative half is iterated and the
/// other half mirrored, so the rule is exactly symmetric on symmetric intervals.
inline QuadratureRule gauss_rule(int n, double lo, double hi) {
  if (n < 1) {
    throw std::invalid_argument("gauss_rule: need at least one point");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("gauss_rule: empty or reversed interval");
  }
  constexpr double tolerance = 1e-15;
  constexpr int max_iterations = 100;

  const auto count = static_cast<std::size_t>(n);
  std::vector<double> ref_nodes(count);
  std::vector<double> ref_weights(count);

  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (4.0 * (i + 1) - 1.0) / (4.0 * n + 2.0));
    bool converged = false;
    for (int it = 0; it < max_iterations; ++it) {
      const auto [p, dp] = detail::legendre_with_derivative(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= tolerance) {
        converged = true;
        break;
      }
    }
    if (!converged) {
      throw NonConvergence("gauss_rule: Newton iteration stalled for n = " + std::to_string(n) +
                           ", root " + std::to_string(i));
    }
    if (n % 2 == 1 && i == half - 1) {
      x = 0.0;
    }
    const double dp = detail::legendre_with_derivative(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto upper = count - 1 - static_cast<std::size_t>(i);
    ref_nodes[upper] = x;
    ref_weights[upper] = w;
    ref_nodes[static_cast<std::size_t>(i)] = -x;
    ref_weights[static_cast<std::size_t>(i)] = w;
  }

  QuadratureRule rule{std::move(ref_nodes), std::move(ref_weights), reference_interval};
  if (lo == -1.0 && hi == 1.0) {
    return rule;
  }
  return rule.mapped_to({lo, hi});
}

/// `panels` equal subintervals of [lo, hi], each carrying a `points`-point Gauss rule.
inline QuadratureRule composite_gauss_rule(int panels, int points, double lo, double hi) {
  if (panels < 1) {
    throw std::invalid_argument("composite_gauss_rule: need at least one panel");
  }
  const QuadratureRule base = gauss_rule(points, -1.0, 1.0);
  if (panels == 1) {
    return base.mapped_to({lo, hi});
  }
  QuadratureRule out;
  out.interval = {lo, hi};
  out.nodes.reserve(static_cast<std::size_t>(panels) * base.size());
  out.weights.reserve(out.nodes.capacity());
  const double h = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * h;
    const double b = (p + 1 == panels) ? hi : lo + (p + 1) * h;
    const QuadratureRule panel = base.mapped_to({a, b});
    out.nodes.insert(out.nodes.end(), panel.nodes.begin(), panel.nodes.end());
    out.weights.insert(out.weights.end(), panel.weights.begin(), panel.weights.end());
  }
  return out;
}

/// Legendre coefficients a_0..a_N of a function on [-1, 1].
struct CoefficientVector {
  Vector coeffs;

  CoefficientVector() = default;
  explicit CoefficientVector(Vector c) : coeffs(std::move(c)) {}
  explicit CoefficientVector(int N) : coeffs(Vector::Zero(N + 1)) {}

  int degree() const noexcept { return static_cast<int>(coeffs.size()) - 1; }
  double operator[](int k) const { return coeffs(k); }
  double& operator[](int k) { return coeffs(k); }
};

/// V(l, k) = L_k(x_l).
inline Matrix vandermonde(int N, std::span<const double> xs) {
  Matrix V(static_cast<Eigen::Index>(xs.size()), N + 1);
  std::vector<double> row(static_cast<std::size_t>(N) + 1);
  for (std::size_t l = 0; l < xs.size(); ++l) {
    legendre_eval_all(xs[l], row);
    for (int k = 0; k <= N; ++k) {
      V(static_cast<Eigen::Index>(l), k) = row[static_cast<std::size_t>(k)];
    }
  }
  return V;
}

namespace detail {

inline void require_reference_rule(const QuadratureRule& rule, const char* who) {
  constexpr double tol = 1e-14;
  if (std::abs(rule.interval.lo + 1.0) > tol || std::abs(rule.interval.hi - 1.0) > tol) {
    throw std::invalid_argument(std::string(who) + ": rule must live on the reference interval [-1, 1]");
  }
}

inline void require_points(const QuadratureRule& rule, int N, const char* who) {
  if (rule.size() < static_cast<std::size_t>(N) + 1) {
    throw RuleTooCoarse(std::string(who) + ": rule has " + std::to_string(rule.size()) +
                        " points, degree " + std::to_string(N) + " needs at least " +
                        std::to_string(N + 1));
  }
}

} // namespace detail

/// Discrete L2 projection a_k = (2k+1)/2 sum_l w_l f(x_l) L_k(x_l).
///
/// `rule` lives on [-1, 1]; `f` is a function of the physical coordinate on
/// `domain` and is sampled at the mapped nodes.
template <class F>
CoefficientVector project(F&& f, int N, const QuadratureRule& rule,
                          Interval domain = reference_interval) {
  if (N < 0) {
    throw std::invalid_argument("project: negative degree");
  }
  detail::require_reference_rule(rule, "project");
  detail::require_points(rule, N, "project");

  CoefficientVector a(N);
  std::vector<double> L(static_cast<std::size_t>(N) + 1);
  for (std::size_t l = 0; l < rule.size(); ++l) {
    const double fx = f(domain.to_physical(rule.nodes[l]));
    const double wf = rule.weights[l] * fx;
    legendre_eval_all(rule.nodes[l], L);
    for (int k = 0; k <= N; ++k) {
      a[k] += wf * L[static_cast<std::size_t>(k)];
    }
  }
  for (int k = 0; k <= N; ++k) {
    a[k] *= (2.0 * k + 1.0) / 2.0;
  }
  return a;
}

/// u^N(x) = sum_k a_k L_k(x) at reference points xs.
inline std::vector<double> synthesize(const CoefficientVector& a, std::span<const double> xs) {
  std::vector<double> out;
  out.reserve(xs.size());
  const int N = a.degree();
  for (double x : xs) {
    double sum = a[0];
    if (N >= 1) {
      double prev = 1.0;
      double curr = x;
      sum += a[1] * curr;
      for (int k = 1; k < N; ++k) {
        const double next = ((2.0 * k + 1.0) * x * curr - k * prev) / (k + 1.0);
        prev = curr;
        curr = next;
        sum += a[k + 1] * curr;
      }
    }
    out.push_back(sum);
  }
  return out;
}

/// Synthesis at physical points of `domain`.
inline std::vector<double> synthesize(const CoefficientVector& a, std::span<const double> xs,
                                      Interval domain) {
  std::vector<double> ref;
  ref.reserve(xs.size());
  for (double x : xs) {
    ref.push_back(domain.to_reference(x));
  }
  return synthesize(a, ref);
}

} // namespace nlwave
