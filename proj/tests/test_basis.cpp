#include "catch_amalgamated.hpp"

#include <cmath>
#include <vector>

#include "nlwave/basis.hpp"
#include "oracles.hpp"

using namespace nlwave;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("legendre_eval known values") {
  CHECK(legendre_eval(0, 0.7) == 1.0);
  CHECK_THAT(legendre_eval(5, 1.0), WithinAbs(1.0, 1e-15));
  CHECK_THAT(legendre_eval(2, 0.5), WithinAbs(-0.125, 1e-15));
  CHECK_THROWS_AS(legendre_eval(-1, 0.0), std::invalid_argument);
}

TEST_CASE("legendre_eval agrees with the explicit sum formula") {
  for (int n = 0; n <= 12; ++n) {
    for (double x : {-1.0, -0.83, -0.2, 0.0, 0.31, 0.77, 1.0}) {
      CHECK_THAT(legendre_eval(n, x), WithinAbs(oracle::legendre_explicit(n, x), 1e-12));
    }
  }
}

TEST_CASE("legendre_eval_all") {
  const auto a = legendre_eval_all(2, 0.0);
  REQUIRE(a.size() == 3);
  CHECK(a[0] == 1.0);
  CHECK(a[1] == 0.0);
  CHECK_THAT(a[2], WithinAbs(-0.5, 1e-15));

  const auto b = legendre_eval_all(1, -1.0);
  CHECK(b == std::vector<double>{1.0, -1.0});

  for (double v : legendre_eval_all(4, 1.0)) {
    CHECK_THAT(v, WithinAbs(1.0, 1e-15));
  }

  for (double x : {-0.9, -0.1, 0.45}) {
    const auto all = legendre_eval_all(20, x);
    for (int n = 0; n <= 20; ++n) {
      CHECK(all[static_cast<std::size_t>(n)] == legendre_eval(n, x));
    }
  }
}

TEST_CASE("legendre bound |L_n| <= 1 on [-1, 1]") {
  const auto xs = oracle::random_uniform(200, -1.0, 1.0, 7);
  double worst = 0.0;
  for (int n = 0; n <= 100; ++n) {
    for (double x : xs) {
      worst = std::max(worst, std::abs(legendre_eval(n, x)));
    }
  }
  CHECK(worst <= 1.0 + 1e-13);
}

TEST_CASE("gauss_rule small cases") {
  const auto r1 = gauss_rule(1, -1.0, 1.0);
  REQUIRE(r1.size() == 1);
  CHECK(r1.nodes[0] == 0.0);
  CHECK_THAT(r1.weights[0], WithinAbs(2.0, 1e-15));

  const auto r2 = gauss_rule(2, -1.0, 1.0);
  CHECK_THAT(r2.nodes[0], WithinAbs(-1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(r2.nodes[1], WithinAbs(1.0 / std::sqrt(3.0), 1e-15));
  CHECK_THAT(r2.weights[0], WithinAbs(1.0, 1e-15));
  CHECK_THAT(r2.weights[1], WithinAbs(1.0, 1e-15));

  const auto r8 = gauss_rule(8, -1.0, 1.0);
  CHECK_THAT(r8.integrate([](double x) { return std::pow(x, 15); }), WithinAbs(0.0, 1e-15));
  CHECK_THAT(r8.integrate([](double x) { return std::pow(x, 14); }), WithinAbs(2.0 / 15.0, 1e-14));
}

TEST_CASE("gauss_rule nodes are roots of L_n") {
  // the explicit sum cancels badly beyond small n
  for (int n : {3, 5, 7}) {
    const auto r = gauss_rule(n, -1.0, 1.0);
    for (double x : r.nodes) {
      CHECK(std::abs(oracle::legendre_explicit(n, x)) < 1e-12);
    }
  }
  // long-double recurrence for larger n
  for (int n : {16, 33, 100}) {
    const auto r = gauss_rule(n, -1.0, 1.0);
    for (double x : r.nodes) {
      long double p0 = 1.0L;
      long double p1 = x;
      for (int k = 1; k < n; ++k) {
        const long double p2 = ((2 * k + 1) * static_cast<long double>(x) * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      CHECK(std::abs(static_cast<double>(p1)) < 1e-13 * n);
    }
  }
}

TEST_CASE("gauss_rule invariants") {
  for (int n : {1, 2, 5, 10, 20, 64, 128, 512}) {
    for (auto [lo, hi] : {std::pair{-1.0, 1.0}, std::pair{0.0, 3.0}, std::pair{-2.5, -0.5}}) {
      const auto r = gauss_rule(n, lo, hi);
      REQUIRE(r.size() == static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < r.size(); ++i) {
        CHECK(r.nodes[i] > lo);
        CHECK(r.nodes[i] < hi);
        CHECK(r.weights[i] > 0.0);
        if (i > 0) {
          CHECK(r.nodes[i] > r.nodes[i - 1]);
        }
      }
      CHECK_THAT(r.total_weight(), WithinRel(hi - lo, 1e-13));
    }
    const auto r = gauss_rule(n, -1.0, 1.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const std::size_t j = r.size() - 1 - i;
      CHECK(r.nodes[i] == -r.nodes[j]);
      CHECK(r.weights[i] == r.weights[j]);
    }
  }
}

TEST_CASE("gauss_rule exactness for monomials") {
  for (int n = 1; n <= 20; ++n) {
    const auto r = gauss_rule(n, -1.0, 1.0);
    for (int d = 0; d <= 2 * n - 1; ++d) {
      const double q = r.integrate([d](double x) { return std::pow(x, d); });
      CHECK_THAT(q, WithinAbs(oracle::monomial_integral(d, -1.0, 1.0), 1e-12));
    }
  }
  // mapped interval, relative to the size of the exact value
  const auto r = gauss_rule(6, 0.5, 2.0);
  for (int d = 0; d <= 11; ++d) {
    const double exact = oracle::monomial_integral(d, 0.5, 2.0);
    CHECK_THAT(r.integrate([d](double x) { return std::pow(x, d); }), WithinRel(exact, 1e-12));
  }
}

TEST_CASE("composite_gauss_rule") {
  const auto single = composite_gauss_rule(1, 9, -1.0, 1.0);
  const auto direct = gauss_rule(9, -1.0, 1.0);
  CHECK(single.nodes == direct.nodes);
  CHECK(single.weights == direct.weights);

  const auto c = composite_gauss_rule(4, 2, -1.0, 1.0);
  CHECK(c.size() == 8);
  CHECK_THAT(c.total_weight(), WithinAbs(2.0, 1e-14));
  for (std::size_t i = 1; i < c.size(); ++i) {
    CHECK(c.nodes[i] > c.nodes[i - 1]);
  }
  // exact for piecewise cubics on the panels
  CHECK_THAT(c.integrate([](double x) { return std::abs(x) * x * x; }), WithinAbs(0.5, 1e-14));
}

TEST_CASE("project examples") {
  const auto rule = gauss_rule(12, -1.0, 1.0);
  const auto a = project([](double x) { return legendre_eval(3, x); }, 5, rule);
  REQUIRE(a.degree() == 5);
  for (int k = 0; k <= 5; ++k) {
    CHECK_THAT(a[k], WithinAbs(k == 3 ? 1.0 : 0.0, 1e-14));
  }

  const auto one = project([](double) { return 1.0; }, 3, rule);
  CHECK_THAT(one[0], WithinAbs(1.0, 1e-14));
  for (int k = 1; k <= 3; ++k) {
    CHECK_THAT(one[k], WithinAbs(0.0, 1e-14));
  }

  const auto sq = project([](double x) { return x * x; }, 2, gauss_rule(3, -1.0, 1.0));
  CHECK_THAT(sq[0], WithinAbs(1.0 / 3.0, 1e-14));
  CHECK_THAT(sq[1], WithinAbs(0.0, 1e-14));
  CHECK_THAT(sq[2], WithinAbs(2.0 / 3.0, 1e-14));
  const auto xs = oracle::random_uniform(5, -1.0, 1.0, 3);
  const auto ys = synthesize(sq, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK_THAT(ys[i], WithinAbs(xs[i] * xs[i], 1e-14));
  }

  CHECK_THROWS_AS(project([](double) { return 1.0; }, 5, gauss_rule(5, -1.0, 1.0)), RuleTooCoarse);
  CHECK_THROWS_AS(project([](double) { return 1.0; }, 1, gauss_rule(5, 0.0, 1.0)), std::invalid_argument);
}

TEST_CASE("project on a physical interval") {
  const Interval dom{0.0, 4.0};
  // f(x) = x on [0, 4] is 2 + 2 xi in the reference coordinate
  const auto a = project([](double x) { return x; }, 3, gauss_rule(4, -1.0, 1.0), dom);
  CHECK_THAT(a[0], WithinAbs(2.0, 1e-14));
  CHECK_THAT(a[1], WithinAbs(2.0, 1e-14));
  const std::vector<double> xs{0.0, 1.3, 4.0};
  const auto ys = synthesize(a, xs, dom);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK_THAT(ys[i], WithinAbs(xs[i], 1e-13));
  }
}

TEST_CASE("synthesize examples") {
  CHECK(synthesize(CoefficientVector(Vector{{0.0, 1.0}}), std::vector<double>{0.25}) == std::vector<double>{0.25});
  CHECK_THAT(synthesize(CoefficientVector(Vector{{2.0, 0.0, -1.0}}), std::vector<double>{1.0})[0], WithinAbs(1.0, 1e-15));

  const int N = 6;
  const auto rule = gauss_rule(N + 1, -1.0, 1.0);
  auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * std::pow(x, 4) - std::pow(x, 6); };
  const auto a = project(p, N, rule);
  const auto at_nodes = synthesize(a, rule.nodes);
  for (std::size_t l = 0; l < rule.size(); ++l) {
    CHECK_THAT(at_nodes[l], WithinAbs(p(rule.nodes[l]), 1e-12));
  }
}

TEST_CASE("round trip for random polynomials") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  for (int N : {0, 1, 4, 9, 17, 32}) {
    std::vector<double> c(static_cast<std::size_t>(N) + 1);
    for (auto& v : c) {
      v = coef(rng);
    }
    // monomial form, evaluated by Horner: independent of the Legendre basis
    auto p = [&c](double x) {
      double s = 0.0;
      for (auto it = c.rbegin(); it != c.rend(); ++it) {
        s = s * x + *it;
      }
      return s;
    };
    const auto a = project(p, N, gauss_rule(N + 1, -1.0, 1.0));
    const auto xs = oracle::random_uniform(50, -1.0, 1.0, 100 + N);
    const auto ys = synthesize(a, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CHECK_THAT(ys[i], WithinAbs(p(xs[i]), 1e-10));
    }
  }
}

TEST_CASE("Gram matrix is diag(2/(2k+1))") {
  for (int N : {0, 1, 5, 16, 32}) {
    const auto rule = gauss_rule(N + 1, -1.0, 1.0);
    const Matrix V = vandermonde(N, rule.nodes);
    const Vector w = Eigen::Map<const Vector>(rule.weights.data(), static_cast<Eigen::Index>(rule.size()));
    const Matrix G = V.transpose() * w.asDiagonal() * V;
    for (int k = 0; k <= N; ++k) {
      for (int j = 0; j <= N; ++j) {
        CHECK_THAT(G(k, j), WithinAbs(k == j ? 2.0 / (2 * k + 1) : 0.0, 1e-12));
      }
    }
  }
}
