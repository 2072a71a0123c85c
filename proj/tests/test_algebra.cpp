#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "pnp/algebra.hpp"
#include "pnp/errors.hpp"
#include "pnp/params.hpp"

using namespace pnp;

namespace {

ModelParams symmetric_h1() {
  ModelParams p;
  p.d1 = p.d2 = 1.0;
  p.theta1 = 1.0;
  p.theta2 = -1.0;
  p.g11 = 2.0;
  p.g12 = 1.0;
  p.g21 = 1.0;
  p.g22 = 2.0;
  p.gamma1 = 1.0;
  p.gamma2 = -1.0;
  p.c1 = p.c2 = 1.0;
  return p;
}

// Random parameter sets satisfying all sign conventions and (H1).
ModelParams random_h1(std::mt19937& rng) {
  std::uniform_real_distribution<double> pos(0.5, 2.0);
  std::uniform_real_distribution<double> cross(0.2, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  std::uniform_real_distribution<double> c(-2.0, 2.0);
  ModelParams p;
  p.d1 = pos(rng);
  p.d2 = pos(rng);
  p.theta1 = pos(rng);
  p.theta2 = -pos(rng);
  p.g12 = cross(rng);
  p.g21 = cross(rng);
  p.g22 = cross(rng) + 0.5;
  p.g11 = p.g12 * p.g21 / p.g22 + slack(rng); // g11 g22 >= g12 g21
  p.gamma1 = pos(rng);
  p.gamma2 = -pos(rng);
  p.c1 = c(rng);
  p.c2 = c(rng);
  return p;
}

// Bisection oracle for log u + 3u = c (u > 0, strictly increasing).
double log_plus_3u_root(double c) {
  double lo = 1e-12, hi = 10.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::log(mid) + 3.0 * mid < c ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("residual definition") {
  ModelParams p = symmetric_h1();
  SUBCASE("log 1 = 0 makes c1 = g11 + g12 an exact root in equation one") {
    p.c1 = p.g11 + p.g12;
    const auto [r1, r2] = residual(1.0, 1.0, 0.0, p);
    CHECK(r1 == 0.0);
    (void)r2;
  }
  SUBCASE("an exact solution point gives (0, 0) to machine precision") {
    const double u = 0.7, v = 1.3, phi = 0.4;
    p.c1 = p.d1 * std::log(u) + p.theta1 * phi + p.g11 * u + p.g12 * v;
    p.c2 = p.d2 * std::log(v) + p.theta2 * phi + p.g21 * u + p.g22 * v;
    const auto [r1, r2] = residual(u, v, phi, p);
    CHECK(std::abs(r1) <= 1e-15);
    CHECK(std::abs(r2) <= 1e-15);
  }
  SUBCASE("nonpositive densities are rejected") {
    CHECK_THROWS_AS(residual(0.0, 1.0, 0.0, p), NonpositiveDensity);
    CHECK_THROWS_AS(residual(1.0, -1.0, 0.0, p), NonpositiveDensity);
  }
}

TEST_CASE("solve_uv reproduces the symmetric scalar root") {
  // At phi = 0 with fully symmetric coefficients u = v, and equation one
  // collapses to log u + 3u = 1. Value frozen from a long-double bisection
  // oracle (also recomputed alongside).
  const ModelParams p = symmetric_h1();
  const AlgebraicPoint pt = solve_uv(0.0, p);
  CHECK(pt.u == doctest::Approx(0.53921415559202477).epsilon(1e-14));
  CHECK(pt.v == doctest::Approx(pt.u).epsilon(1e-13));
  CHECK(pt.u == doctest::Approx(log_plus_3u_root(1.0)).epsilon(1e-12));

  const auto [r1, r2] = residual(pt.u, pt.v, pt.phi, p);
  CHECK(std::abs(r1) < 1e-10);
  CHECK(std::abs(r2) < 1e-10);
}

TEST_CASE("near-decoupled limit: log u + u = 1 has root 1") {
  ModelParams p = symmetric_h1();
  p.g11 = 1.0;
  p.g12 = 1e-8;
  p.g21 = 1e-8;
  p.g22 = 1.0;
  p.c1 = 1.0;
  p.c2 = 1.0 + p.d2 * std::log(1.0); // second equation tuned so v ~ 1
  const AlgebraicPoint pt = solve_uv(0.0, p);
  CHECK(pt.u == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(pt.v == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("solve_uv residuals below tolerance across (H1) draws") {
  std::mt19937 rng(20240817u);
  for (int draw = 0; draw < 200; ++draw) {
    const ModelParams p = random_h1(rng);
    double prev_u = 0.0, prev_v = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double phi = -10.0 + k;
      const AlgebraicPoint pt = solve_uv(phi, p);
      const auto [r1, r2] = residual(pt.u, pt.v, pt.phi, p);
      CHECK(std::abs(r1) <= 1e-12);
      CHECK(std::abs(r2) <= 1e-12);
      if (k > 0) {
        CHECK(pt.u < prev_u); // u strictly decreasing in phi
        CHECK(pt.v > prev_v); // v strictly increasing in phi
      }
      prev_u = pt.u;
      prev_v = pt.v;
    }
  }
}

TEST_CASE("solve_uv refuses (H2) parameters") {
  ModelParams p = symmetric_h1();
  p.g11 = 1.0;
  p.g12 = 2.0;
  p.g21 = 2.0;
  p.g22 = 1.0;
  CHECK_THROWS_AS(solve_uv(0.0, p), HypothesisViolation);
}

TEST_CASE("closed-form derivatives match finite differences") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> phis(-10.0, 10.0);
  const double h = 1e-6;
  for (int draw = 0; draw < 50; ++draw) {
    const ModelParams p = random_h1(rng);
    for (int k = 0; k < 4; ++k) {
      const double phi = phis(rng);
      const AlgebraicPoint pt = solve_uv(phi, p);
      const auto [du, dv] = duv_dphi(pt, p);
      CHECK(du < 0.0);
      CHECK(dv > 0.0);
      const AlgebraicPoint hi = solve_uv(phi + h, p);
      const AlgebraicPoint lo = solve_uv(phi - h, p);
      CHECK(std::abs(du - (hi.u - lo.u) / (2 * h)) <= 1e-5);
      CHECK(std::abs(dv - (hi.v - lo.v) / (2 * h)) <= 1e-5);
    }
  }
}

TEST_CASE("derivatives at the symmetric point are opposite by symmetry") {
  const ModelParams p = symmetric_h1();
  const AlgebraicPoint pt = solve_uv(0.0, p);
  const auto [du, dv] = duv_dphi(pt, p);
  CHECK(du == doctest::Approx(-dv).epsilon(1e-12));
  // Cross-check against the quotient evaluated with the oracle root.
  const double den = p.g12 * p.g21 -
      (p.d1 / pt.u + p.g11) * (p.d2 / pt.v + p.g22);
  CHECK(den < 0.0);
  const double expect = -(p.g12 * p.theta2 -
                          p.theta1 * (p.d2 / pt.v + p.g22)) / den;
  CHECK(du == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("big_g signs on the symmetric set") {
  const ModelParams p = symmetric_h1();
  CHECK(std::abs(big_g(0.0, p)) < 1e-12); // u = v exactly by symmetry
  CHECK(big_g(1.0, p) < 0.0);
  CHECK(big_g(-1.0, p) > 0.0);
}

TEST_CASE("g_prime_bound is positive and stable under refinement") {
  const ModelParams p = symmetric_h1();
  const double k101 = g_prime_bound(p, -5.0, 5.0, 101);
  const double k1001 = g_prime_bound(p, -5.0, 5.0, 1001);
  CHECK(k101 > 0.0);
  CHECK(std::abs(k1001 - k101) < 0.05 * k101);
}

TEST_CASE("nonlinearity table: monotone G, convex rho, anchored at zero") {
  const ModelParams p = symmetric_h1();
  const NonlinearityTable tab = build_rho(p, -3.0, 3.0, 121);

  const auto& g = tab.g_values();
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] < g[i - 1]);

  const auto& rho = tab.rho_values();
  const auto& phi = tab.phi_samples();
  for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
    const double second = rho[i + 1] - 2 * rho[i] + rho[i - 1];
    CHECK(second > 0.0); // discrete convexity
  }
  CHECK(std::abs(tab.rho(0.0)) <= 1e-15);
  (void)phi;
}

TEST_CASE("table quadrature agrees with direct high-resolution quadrature") {
  const ModelParams p = symmetric_h1();
  const NonlinearityTable tab = build_rho(p, -2.0, 2.0, 81);
  // Independent oracle: composite Simpson with 4000 panels from 0 to 1.5.
  const double a = 0.0, b = 1.5;
  const int m = 4000;
  const double h = (b - a) / m;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    const double x0 = a + i * h, x1 = x0 + h;
    acc += h / 6.0 * (-big_g(x0, p) - 4.0 * big_g(0.5 * (x0 + x1), p) - big_g(x1, p));
  }
  CHECK(tab.rho(1.5) == doctest::Approx(acc).epsilon(1e-8));
}

TEST_CASE("interpolated queries between samples stay accurate") {
  const ModelParams p = symmetric_h1();
  const NonlinearityTable tab = build_rho(p, -2.0, 2.0, 81);
  for (double phi : {-1.987, -0.3141, 0.123456, 1.777}) {
    CHECK(tab.g(phi) == doctest::Approx(big_g(phi, p)).epsilon(1e-6));
  }
}

TEST_CASE("queries outside the initial range extend the table") {
  const ModelParams p = symmetric_h1();
  const NonlinearityTable tab = build_rho(p, -1.0, 1.0, 41);
  CHECK(tab.g(4.0) == doctest::Approx(big_g(4.0, p)).epsilon(1e-6));
  CHECK(tab.rho(4.0) > tab.rho(1.0)); // convex with minimum at G = 0
  CHECK_THROWS_AS(tab.g(5000.0), RangeExceeded);
}
