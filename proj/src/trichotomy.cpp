#include "pnp/trichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "pnp/algebra.hpp"
#include "pnp/errors.hpp"

namespace pnp {

namespace {

double bisect(const std::function<double(double)>& f, double a, double b,
              double fa) {
  // Root of f in [a, b] given sign(f(a)) = sign(fa) != sign(f(b)).
  for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) a = m; else b = m;
  }
  return 0.5 * (a + b);
}

} // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Triple: return "Triple";
    case Regime::UniqueMonotone: return "UniqueMonotone";
    case Regime::Inflection: return "Inflection";
  }
  return "?";
}

double u_star(const ModelParams& p) {
  const double den = p.g12 * p.g21 - p.g11 * p.g22;
  if (!(den > 0.0))
    throw HypothesisViolation("u* requires (H2): g12 g21 > g11 g22");
  return p.d1 * p.g22 / den;
}

CubicData cubic_coeffs(const ModelParams& p) {
  check_signs(p);
  if (!p.h2()) throw HypothesisViolation("cubic_coeffs requires (H2)");
  const double det = p.g11 * p.g22 - p.g12 * p.g21;  // negative under (H2)
  CubicData c;
  c.k3 = p.g11 * det * det;
  c.k2 = p.d1 * (p.g12 * p.g21 - 3.0 * p.g11 * p.g22) * (-det);
  c.k1 = -p.d1 * (p.d2 * p.g21 * p.g12 * p.g12 +
                  2.0 * p.d1 * p.g21 * p.g22 * p.g12 -
                  3.0 * p.d1 * p.g11 * p.g22 * p.g22);
  c.k0 = p.d1 * p.d1 * p.d1 * p.g22 * p.g22;
  return c;
}

CubicData shengjin(CubicData c) {
  if (c.k3 == 0.0) throw DegenerateCubic("k3 must be nonzero");
  c.A = c.k2 * c.k2 - 3.0 * c.k1 * c.k3;
  c.B = c.k1 * c.k2 - 9.0 * c.k0 * c.k3;
  c.C = c.k1 * c.k1 - 3.0 * c.k0 * c.k2;
  c.delta_dis = c.B * c.B - 4.0 * c.A * c.C;
  return c;
}

CubicData cubic_roots(CubicData c) {
  if (c.k3 == 0.0) throw DegenerateCubic("k3 must be nonzero");
  if (!(c.delta_dis < 0.0))
    throw WrongRegime("three distinct real roots require delta_dis < 0");

  // Depressed cubic t^3 + pt + q with u = t - k2/(3 k3); three real roots
  // by the trigonometric method, then Newton polish on p(u).
  const double shift = c.k2 / (3.0 * c.k3);
  const double pp = (3.0 * c.k3 * c.k1 - c.k2 * c.k2) / (3.0 * c.k3 * c.k3);
  const double qq = (2.0 * c.k2 * c.k2 * c.k2 -
                     9.0 * c.k3 * c.k2 * c.k1 +
                     27.0 * c.k3 * c.k3 * c.k0) /
                    (27.0 * c.k3 * c.k3 * c.k3);
  const double r = std::sqrt(-pp / 3.0);
  double arg = 3.0 * qq / (2.0 * pp * r);
  arg = std::clamp(arg, -1.0, 1.0);
  const double theta = std::acos(arg) / 3.0;

  auto poly = [&](double u) {
    return ((c.k3 * u + c.k2) * u + c.k1) * u + c.k0;
  };
  auto dpoly = [&](double u) {
    return (3.0 * c.k3 * u + 2.0 * c.k2) * u + c.k1;
  };

  for (int k = 0; k < 3; ++k) {
    double u = 2.0 * r * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift;
    for (int it = 0; it < 4; ++it) {
      const double dp = dpoly(u);
      if (dp == 0.0) break;
      u -= poly(u) / dp;
    }
    c.roots[k] = u;
  }
  std::sort(c.roots.begin(), c.roots.end(), std::greater<>());
  c.n_real_roots = 3;
  return c;
}

double v_on_singular_curve(double u, const ModelParams& p) {
  const double us = u_star(p);
  if (!(u > us)) throw DomainViolation("v on the singular curve needs u > u*");
  return p.d2 * (p.d1 + p.g11 * u) /
         (u * (p.g12 * p.g21 - p.g11 * p.g22) - p.d1 * p.g22);
}

double sigma(double u, const ModelParams& p) {
  const double v = v_on_singular_curve(u, p);
  const double t1 = p.c1 - p.d1 * std::log(u) - p.g11 * u - p.g12 * v;
  const double t2 = p.c2 - p.d2 * std::log(v) - p.g21 * u - p.g22 * v;
  return t1 / p.theta1 - t2 / p.theta2;
}

std::pair<double, double> v_phi_at_u(double u, const ModelParams& p, double tol) {
  if (!(u > 0.0)) throw NonpositiveDensity("curve sweep requires u > 0");
  // phi-eliminated equation; strictly decreasing in v.
  const double a1 = p.d1 * std::log(u) + p.g11 * u - p.c1;
  const double a2 = p.g21 * u - p.c2;
  auto h = [&](double v) {
    return p.theta2 * (a1 + p.g12 * v) -
           p.theta1 * (p.d2 * std::log(v) + a2 + p.g22 * v);
  };

  double lo = 1.0, hi = 1.0;
  while (h(lo) < 0.0) {
    lo *= 0.125;
    if (lo < 1e-304) throw BracketFailure("v-solve: no sign change down to e^-700");
  }
  while (h(hi) > 0.0) {
    hi *= 8.0;
    if (hi > 1e304) throw BracketFailure("v-solve: no sign change up to e^+700");
  }
  auto dh = [&](double v) {
    return p.theta2 * p.g12 - p.theta1 * (p.d2 / v + p.g22);
  };
  double v = std::sqrt(lo * hi);
  for (int it = 0; it < 200; ++it) {
    const double hv = h(v);
    if (std::abs(hv) <= tol * std::min(p.theta1, -p.theta2)) break;
    if (hv > 0.0) lo = v; else hi = v;
    double cand = v - hv / dh(v);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    v = cand;
  }
  const double phi = (p.c1 - p.d1 * std::log(u) - p.g11 * u - p.g12 * v) / p.theta1;
  return {v, phi};
}

TrichotomyReport classify(const ModelParams& p, double tol_sigma) {
  check_signs(p);
  if (p.h1()) throw HypothesisViolation("classification applies under (H2) only");
  if (tol_sigma < 0.0) tol_sigma = 1e-9 * (1.0 + std::abs(p.c1) + std::abs(p.c2));

  TrichotomyReport rep;
  rep.u_star = u_star(p);
  rep.cubic = cubic_roots(shengjin(cubic_coeffs(p)));
  const double u1 = rep.cubic.roots[0];
  rep.sigma_at_u1 = sigma(u1, p);

  if (rep.sigma_at_u1 > tol_sigma) {
    rep.regime = Regime::Triple;
    auto sig = [&](double u) { return sigma(u, p); };

    // Inner fold: sigma -> -inf as u -> u*+, sigma(u1) > 0.
    double a = rep.u_star + 0.5 * (u1 - rep.u_star);
    while (sig(a) > 0.0) {
      a = rep.u_star + 0.5 * (a - rep.u_star);
      if (a - rep.u_star < 1e-14 * rep.u_star)
        throw NonConvergence("inner fold bracket collapsed onto u*");
    }
    rep.fold_u[0] = bisect(sig, a, u1, -1.0);

    // Outer fold: expand geometrically until sigma < 0.
    double b = u1 + (u1 - rep.u_star);
    while (sig(b) > 0.0) b = u1 + 2.0 * (b - u1);
    rep.fold_u[1] = bisect(sig, u1, b, +1.0);

    rep.fold_phi[0] = v_phi_at_u(rep.fold_u[0], p).second;
    rep.fold_phi[1] = v_phi_at_u(rep.fold_u[1], p).second;
    if (rep.fold_phi[0] > rep.fold_phi[1])
      std::swap(rep.fold_phi[0], rep.fold_phi[1]);
  } else if (rep.sigma_at_u1 < -tol_sigma) {
    rep.regime = Regime::UniqueMonotone;
  } else {
    rep.regime = Regime::Inflection;
    rep.phi_check = v_phi_at_u(u1, p).second;
  }
  return rep;
}

BranchCurve branch_sweep(const ModelParams& p, double u_lo, double u_hi,
                         std::size_t n, double tol) {
  check_signs(p);
  if (!(0.0 < u_lo && u_lo < u_hi)) throw std::invalid_argument("need 0 < u_lo < u_hi");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  BranchCurve c;
  c.u_samples.reserve(n);
  c.v_samples.reserve(n);
  c.phi_samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = u_lo + (u_hi - u_lo) * double(i) / double(n - 1);
    auto [v, phi] = v_phi_at_u(u, p, tol);
    c.u_samples.push_back(u);
    c.v_samples.push_back(v);
    c.phi_samples.push_back(phi);
  }
  return c;
}

std::size_t slice_crossings(const BranchCurve& curve, double phi_slice) {
  const auto& f = curve.phi_samples;
  const std::size_t n = f.size();
  std::size_t count = 0;
  std::vector<bool> used(n, false);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = f[i] - phi_slice, b = f[i + 1] - phi_slice;
    if (a == 0.0) { ++count; used[i] = true; continue; }
    if (a * b < 0.0) { ++count; used[i] = used[i + 1] = true; }
  }
  if (n && f.back() == phi_slice && !used[n - 1]) ++count;

  // Tangential contact: local extremum of f - slice near zero without a
  // sign change counts as one solution (the curve touches the slice).
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (used[i - 1] || used[i] || used[i + 1]) continue;
    const double fm = f[i - 1] - phi_slice, f0 = f[i] - phi_slice,
                 fp = f[i + 1] - phi_slice;
    const bool is_min = f0 < fm && f0 <= fp;
    const bool is_max = f0 > fm && f0 >= fp;
    if (!is_min && !is_max) continue;
    const double curv = std::abs(fm - 2.0 * f0 + fp);
    if (std::abs(f0) <= 4.0 * curv + 1e-9) {
      ++count;
      used[i - 1] = used[i] = used[i + 1] = true;
    }
  }
  return count;
}

} // namespace pnp
