#include "pnp/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "pnp/errors.hpp"

namespace pnp {

namespace {

constexpr double kDensityMin = 1e-304;  // ~ e^{-700}
constexpr double kDensityMax = 1e304;   // ~ e^{+700}

// Root of a strictly increasing f on (0, inf). Brackets by multiplicative
// expansion from the initial guess, then safeguarded Newton with bisection
// fallback. Iterates until |f| <= tol.
double increasing_root(const std::function<double(double)>& f,
                       const std::function<double(double)>& df,
                       double guess, double tol) {
  double lo = guess, hi = guess;
  double flo = f(lo);
  while (flo > 0.0) {
    lo *= 0.125;
    if (lo < kDensityMin) throw BracketFailure("no sign change down to e^-700");
    flo = f(lo);
  }
  double fhi = f(hi);
  while (fhi < 0.0) {
    hi *= 8.0;
    if (hi > kDensityMax) throw BracketFailure("no sign change up to e^+700");
    fhi = f(hi);
  }

  double x = std::sqrt(lo * hi);
  double fx = f(x);
  for (int it = 0; it < 200; ++it) {
    if (std::abs(fx) <= tol) return x;
    if (fx > 0.0) hi = x; else lo = x;

    double step = fx / df(x);
    double cand = x - step;
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    x = cand;
    fx = f(x);
  }
  if (std::abs(fx) <= tol) return x;
  throw NonConvergence("scalar root iteration stalled");
}

} // namespace

const char* branch_name(Branch b) {
  switch (b) {
    case Branch::Lower: return "Lower";
    case Branch::Middle: return "Middle";
    case Branch::Upper: return "Upper";
    case Branch::Unique: return "Unique";
  }
  return "?";
}

std::pair<double, double> residual(double u, double v, double phi,
                                   const ModelParams& p) {
  if (!(u > 0.0) || !(v > 0.0)) throw NonpositiveDensity("residual requires u, v > 0");
  const double r1 = p.d1 * std::log(u) + p.theta1 * phi + p.g11 * u + p.g12 * v - p.c1;
  const double r2 = p.d2 * std::log(v) + p.theta2 * phi + p.g21 * u + p.g22 * v - p.c2;
  return {r1, r2};
}

AlgebraicPoint solve_uv(double phi, const ModelParams& p, double tol) {
  check_signs(p);
  if (!p.h1())
    throw HypothesisViolation("solve_uv requires g11 g22 - g12 g21 >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");

  // Inner solve: first equation in u for fixed v; strictly increasing in u.
  auto u_of_v = [&](double v, double inner_tol) {
    const double rhs = p.c1 - p.theta1 * phi - p.g12 * v;
    auto f = [&](double u) { return p.d1 * std::log(u) + p.g11 * u - rhs; };
    auto df = [&](double u) { return p.d1 / u + p.g11; };
    // Guess from whichever term dominates.
    double guess = (rhs > 0.0) ? std::min(rhs / p.g11, std::exp(std::min(rhs / p.d1, 700.0)))
                               : std::exp(std::max(rhs / p.d1, -700.0));
    guess = std::clamp(guess, kDensityMin * 1e6, kDensityMax * 1e-6);
    return increasing_root(f, df, guess, inner_tol);
  };

  // Outer solve: second equation in v with u = u(v); strictly increasing
  // in v under (H1) since g21 g12 u/(d1 + g11 u) < g21 g12/g11 <= g22.
  const double inner_tol = std::min(tol * 1e-2, 1e-14);
  double u_cache = 0.0;
  auto F = [&](double v) {
    u_cache = u_of_v(v, inner_tol);
    return p.d2 * std::log(v) + p.theta2 * phi + p.g21 * u_cache + p.g22 * v - p.c2;
  };
  auto dF = [&](double v) {
    const double du_dv = -p.g12 * u_cache / (p.d1 + p.g11 * u_cache);
    return p.d2 / v + p.g22 + p.g21 * du_dv;
  };

  const double rhs2 = p.c2 - p.theta2 * phi;
  double guess = (rhs2 > 0.0) ? std::min(rhs2 / p.g22, std::exp(std::min(rhs2 / p.d2, 700.0)))
                              : std::exp(std::max(rhs2 / p.d2, -700.0));
  guess = std::clamp(guess, kDensityMin * 1e6, kDensityMax * 1e-6);

  const double v = increasing_root(F, dF, guess, tol * 0.5);
  AlgebraicPoint pt{u_cache, v, phi, Branch::Unique};

  auto [r1, r2] = residual(pt.u, pt.v, phi, p);
  if (std::max(std::abs(r1), std::abs(r2)) > tol)
    throw NonConvergence("algebraic residual above tolerance");
  return pt;
}

std::pair<double, double> duv_dphi(const AlgebraicPoint& pt, const ModelParams& p) {
  if (!(pt.u > 0.0) || !(pt.v > 0.0)) throw NonpositiveDensity("duv_dphi requires u, v > 0");
  const double a = p.d1 / pt.u + p.g11;
  const double b = p.d2 / pt.v + p.g22;
  const double den = p.g12 * p.g21 - a * b;
  if (den == 0.0) throw SingularDenominator("derivative denominator vanishes (fold point)");
  const double du = -(p.g12 * p.theta2 - p.theta1 * b) / den;
  const double dv = -(p.g21 * p.theta1 - p.theta2 * a) / den;
  return {du, dv};
}

double big_g(double phi, const ModelParams& p, double tol) {
  const AlgebraicPoint pt = solve_uv(phi, p, tol);
  return p.gamma1 * pt.u + p.gamma2 * pt.v;
}

double g_prime_bound(const ModelParams& p, double phi_lo, double phi_hi,
                     std::size_t samples) {
  if (!(phi_lo < phi_hi)) throw std::invalid_argument("phi_lo must be below phi_hi");
  if (samples < 2) throw std::invalid_argument("need at least 2 samples");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples; ++i) {
    const double phi = phi_lo + (phi_hi - phi_lo) * double(i) / double(samples - 1);
    const AlgebraicPoint pt = solve_uv(phi, p);
    auto [du, dv] = duv_dphi(pt, p);
    worst = std::max(worst, p.gamma1 * du + p.gamma2 * dv);
  }
  return -worst;
}

NonlinearityTable::NonlinearityTable(const ModelParams& p, double phi_lo,
                                     double phi_hi, std::size_t n)
    : params_(p) {
  check_signs(p);
  if (!p.h1()) throw HypothesisViolation("nonlinearity table requires (H1)");
  if (n < 2) throw std::invalid_argument("need at least 2 samples");
  if (!(phi_lo < phi_hi)) throw std::invalid_argument("phi_lo must be below phi_hi");

  h_ = (phi_hi - phi_lo) / double(n - 1);
  // Grid anchored at phi = 0 so that rho(0) = 0 lands on a sample.
  const long k_lo = (long)std::floor(phi_lo / h_ - 1e-12);
  const long k_hi = (long)std::ceil(phi_hi / h_ + 1e-12);

  const long n_total = k_hi - k_lo + 1;
  phi_.resize(n_total);
  gv_.resize(n_total);
  rho_.resize(n_total);
  for (long k = k_lo; k <= k_hi; ++k) phi_[k - k_lo] = double(k) * h_;
  for (auto& g : gv_) g = 0.0;
  for (std::size_t i = 0; i < phi_.size(); ++i) gv_[i] = big_g(phi_[i], params_);

  // Cumulative composite Simpson (with interval midpoints) of -G from 0.
  const long i0 = -k_lo;  // index of phi = 0
  rho_[i0] = 0.0;
  for (long i = i0; i + 1 < n_total; ++i) {
    const double gm = big_g(0.5 * (phi_[i] + phi_[i + 1]), params_);
    rho_[i + 1] = rho_[i] - h_ / 6.0 * (gv_[i] + 4.0 * gm + gv_[i + 1]);
  }
  for (long i = i0; i > 0; --i) {
    const double gm = big_g(0.5 * (phi_[i] + phi_[i - 1]), params_);
    rho_[i - 1] = rho_[i] + h_ / 6.0 * (gv_[i] + 4.0 * gm + gv_[i - 1]);
  }
  rebuild_slopes();
}

namespace {

// Shape-preserving cubic slopes (harmonic-mean limiter, pchip endpoints).
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> m(n, 0.0);
  if (n < 2) return m;
  std::vector<double> d(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (d[i - 1] * d[i] > 0.0)
      m[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
  }
  auto endpoint = [](double d0, double d1) {
    double s = 1.5 * d0 - 0.5 * d1;
    if (s * d0 <= 0.0) s = 0.0;
    else if (std::abs(s) > 3.0 * std::abs(d0)) s = 3.0 * d0;
    return s;
  };
  m[0] = (n > 2) ? endpoint(d[0], d[1]) : d[0];
  m[n - 1] = (n > 2) ? endpoint(d[n - 2], d[n - 3]) : d[n - 2];
  return m;
}

double hermite(double t, double h, double y0, double y1, double m0, double m1) {
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * m1;
}

} // namespace

void NonlinearityTable::rebuild_slopes() const {
  g_slope_ = pchip_slopes(gv_, h_);
  rho_slope_ = pchip_slopes(rho_, h_);
}

void NonlinearityTable::extend_to(double phi) const {
  constexpr double kPhiCap = 2000.0;
  if (std::abs(phi) > kPhiCap)
    throw RangeExceeded("phi query outside extendable table range");
  while (phi > phi_.back()) {
    const double a = phi_.back(), b = a + h_;
    const double gb = big_g(b, params_);
    const double gm = big_g(0.5 * (a + b), params_);
    rho_.push_back(rho_.back() - h_ / 6.0 * (gv_.back() + 4.0 * gm + gb));
    gv_.push_back(gb);
    phi_.push_back(b);
  }
  while (phi < phi_.front()) {
    const double a = phi_.front(), b = a - h_;
    const double gb = big_g(b, params_);
    const double gm = big_g(0.5 * (a + b), params_);
    rho_.insert(rho_.begin(), rho_.front() + h_ / 6.0 * (gv_.front() + 4.0 * gm + gb));
    gv_.insert(gv_.begin(), gb);
    phi_.insert(phi_.begin(), b);
  }
  rebuild_slopes();
}

double NonlinearityTable::g(double phi) const {
  if (phi < phi_.front() || phi > phi_.back()) extend_to(phi);
  std::size_t i = std::min<std::size_t>(
      std::size_t(std::max(0.0, (phi - phi_.front()) / h_)), phi_.size() - 2);
  const double t = (phi - phi_[i]) / h_;
  return hermite(t, h_, gv_[i], gv_[i + 1], g_slope_[i], g_slope_[i + 1]);
}

double NonlinearityTable::rho(double phi) const {
  if (phi < phi_.front() || phi > phi_.back()) extend_to(phi);
  std::size_t i = std::min<std::size_t>(
      std::size_t(std::max(0.0, (phi - phi_.front()) / h_)), phi_.size() - 2);
  const double t = (phi - phi_[i]) / h_;
  return hermite(t, h_, rho_[i], rho_[i + 1], rho_slope_[i], rho_slope_[i + 1]);
}

NonlinearityTable build_rho(const ModelParams& p, double phi_lo, double phi_hi,
                            std::size_t n) {
  return NonlinearityTable(p, phi_lo, phi_hi, n);
}

} // namespace pnp
