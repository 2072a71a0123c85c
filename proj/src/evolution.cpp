#include "pnp/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnp/errors.hpp"

namespace pnp {

namespace {

double xlog_ratio(double s, double m) {
  // s log(s/m), continuously extended by 0 at s = 0.
  return (s > 0.0) ? s * std::log(s / m) : 0.0;
}

} // namespace

double mass(const Field& f, const Grid1D& grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) s += grid.w(i) * f[i];
  return s;
}

Field poisson_step(const Field& u, const Field& v, const Grid1D& grid,
                   const ModelParams& p, double compat_tol) {
  if (u.size() != grid.n || v.size() != grid.n)
    throw std::invalid_argument("field/grid size mismatch");
  const std::size_t n = grid.n;
  const double h = grid.h();

  const double net = p.gamma1 * mass(u, grid) + p.gamma2 * mass(v, grid);
  const double scale = p.gamma1 * mass(u, grid) - p.gamma2 * mass(v, grid);
  if (std::abs(net) > compat_tol * (std::abs(scale) + 1.0))
    throw CompatibilityViolation("electroneutrality violated: net charge " +
                                 std::to_string(net));

  Field rhs(n);
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = grid.w(i) * (p.gamma1 * u[i] + p.gamma2 * v[i]);

  // Pin phi_0 = 0, solve rows 1..n-1 of the stiffness system, then shift
  // to the zero-mean gauge. Row 0 holds by the compatibility condition.
  const std::size_t m = n - 1;
  Field diag(m), b(m);
  const double off = -1.0 / h;
  for (std::size_t i = 0; i < m; ++i) {
    diag[i] = (i + 1 == n - 1) ? 1.0 / h : 2.0 / h;
    b[i] = rhs[i + 1];
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double f = off / diag[i - 1];
    diag[i] -= f * off;
    b[i] -= f * b[i - 1];
  }
  Field phi(n, 0.0);
  phi[n - 1] = b[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;)
    phi[i + 1] = (b[i] - off * phi[i + 2]) / diag[i];

  const double mean = mass(phi, grid) / grid.length();
  for (auto& x : phi) x -= mean;
  return phi;
}

double stable_dt(const EvolutionState& state, const ModelParams& p) {
  double dmax = 0.0;
  for (std::size_t i = 0; i < state.grid.n; ++i) {
    dmax = std::max(dmax, p.d1 + p.g11 * state.u[i] + p.g12 * state.v[i]);
    dmax = std::max(dmax, p.d2 + p.g21 * state.u[i] + p.g22 * state.v[i]);
  }
  const double h = state.grid.h();
  return 0.4 * h * h / dmax;
}

EvolutionState flux_step(const EvolutionState& state, double dt,
                         const ModelParams& p) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (dt > stable_dt(state, p) * (1.0 + 1e-12))
    throw StabilityViolation("dt exceeds the explicit stability bound");

  const Grid1D& grid = state.grid;
  const std::size_t n = grid.n;
  const double h = grid.h();
  const Field &u = state.u, &v = state.v, &phi = state.phi;

  // Face fluxes between nodes i and i+1; zero flux at the boundary faces.
  Field j1(n - 1), j2(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double du = (u[i + 1] - u[i]) / h;
    const double dv = (v[i + 1] - v[i]) / h;
    const double dphi = (phi[i + 1] - phi[i]) / h;
    const double uf = 0.5 * (u[i] + u[i + 1]);
    const double vf = 0.5 * (v[i] + v[i + 1]);
    j1[i] = p.d1 * du + p.theta1 * uf * dphi + p.g11 * uf * du + p.g12 * uf * dv;
    j2[i] = p.d2 * dv + p.theta2 * vf * dphi + p.g21 * vf * du + p.g22 * vf * dv;
  }

  EvolutionState next = state;
  next.t = state.t + dt;
  for (std::size_t i = 0; i < n; ++i) {
    const double in1 = (i + 1 < n) ? j1[i] : 0.0;
    const double out1 = (i > 0) ? j1[i - 1] : 0.0;
    const double in2 = (i + 1 < n) ? j2[i] : 0.0;
    const double out2 = (i > 0) ? j2[i - 1] : 0.0;
    next.u[i] = u[i] + dt * (in1 - out1) / grid.w(i);
    next.v[i] = v[i] + dt * (in2 - out2) / grid.w(i);
  }

  // Roundoff-scale negativity is clipped with the mass restored from the
  // positive nodes; anything larger signals a scheme failure.
  for (Field* f : {&next.u, &next.v}) {
    double clipped = 0.0;
    double positive = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if ((*f)[i] < 0.0) {
        if ((*f)[i] < -1e-14)
          throw NegativityBreach("nodal density fell below -1e-14");
        clipped += grid.w(i) * (-(*f)[i]);
        (*f)[i] = 0.0;
      } else {
        positive += grid.w(i) * (*f)[i];
      }
    }
    if (clipped > 0.0 && positive > 0.0) {
      const double factor = 1.0 - clipped / positive;
      for (std::size_t i = 0; i < n; ++i) (*f)[i] *= factor;
    }
  }

  next.phi = poisson_step(next.u, next.v, grid, p);
  return next;
}

double entropy(const EvolutionState& state) {
  const Grid1D& grid = state.grid;
  const double mu = mass(state.u, grid), mv = mass(state.v, grid);
  if (!(mu > 0.0) || !(mv > 0.0)) throw ZeroMass("entropy requires positive masses");
  const double w1 = mu / grid.length(), w2 = mv / grid.length();
  double H = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i)
    H += grid.w(i) * (xlog_ratio(state.u[i], w1) + xlog_ratio(state.v[i], w2));
  return H;
}

bool ckp_check(const EvolutionState& state, double c_k) {
  const Grid1D& grid = state.grid;
  for (const Field* f : {&state.u, &state.v}) {
    const double m = mass(*f, grid);
    if (!(m > 0.0)) throw ZeroMass("ckp check requires positive mass");
    const double wbar = m / grid.length();
    double lhs = 0.0, l1 = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      lhs += grid.w(i) * (xlog_ratio((*f)[i], wbar) - (*f)[i] + wbar);
      l1 += grid.w(i) * std::abs((*f)[i] - wbar);
    }
    if (lhs < c_k * l1 * l1 - 1e-14) return false;
  }
  return true;
}

EntropyTrace run(const ModelParams& p, const Field& u0, const Field& v0,
                 const Grid1D& grid, double dt, double t_end,
                 std::size_t sample_every, std::vector<EvolutionState>* snapshots) {
  check_signs(p);
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw std::invalid_argument("dt and t_end must be positive");
  if (sample_every == 0) sample_every = 1;
  for (double x : u0)
    if (x < 0.0) throw std::invalid_argument("u0 must be nonnegative");
  for (double x : v0)
    if (x < 0.0) throw std::invalid_argument("v0 must be nonnegative");

  EvolutionState state{0.0, u0, v0, poisson_step(u0, v0, grid, p), grid};

  EntropyTrace tr;
  tr.mass_u0 = mass(u0, grid);
  tr.mass_v0 = mass(v0, grid);
  const double w1 = tr.mass_u0 / grid.length();
  const double w2 = tr.mass_v0 / grid.length();

  auto record = [&](const EvolutionState& s) {
    tr.times.push_back(s.t);
    tr.H.push_back(entropy(s));
    double l1u = 0.0, l1v = 0.0;
    for (std::size_t i = 0; i < grid.n; ++i) {
      l1u += grid.w(i) * std::abs(s.u[i] - w1);
      l1v += grid.w(i) * std::abs(s.v[i] - w2);
    }
    tr.l1_u.push_back(l1u);
    tr.l1_v.push_back(l1v);
    const double du = std::abs(mass(s.u, grid) - tr.mass_u0) / tr.mass_u0;
    const double dv = std::abs(mass(s.v, grid) - tr.mass_v0) / tr.mass_v0;
    tr.mass_drift_rel = std::max({tr.mass_drift_rel, du, dv});
    if (snapshots) snapshots->push_back(s);
  };

  record(state);
  const std::size_t n_steps = std::size_t(std::ceil(t_end / dt - 1e-12));
  for (std::size_t step = 1; step <= n_steps; ++step) {
    const double step_dt = std::min(dt, t_end - state.t);
    if (step_dt <= 0.0) break;
    state = flux_step(state, step_dt, p);
    if (step % sample_every == 0 || step == n_steps) record(state);
  }

  // Least-squares slope of log H over the second half of the samples.
  // Samples within a few orders of the entropy round-off floor carry no
  // decay information and are excluded from the fit.
  double h_max = 0.0;
  for (double h : tr.H) h_max = std::max(h_max, h);
  const double h_floor = std::max(1e-290, 1e-12 * h_max);
  std::vector<double> ts, ls;
  for (std::size_t i = tr.times.size() / 2; i < tr.times.size(); ++i) {
    if (tr.H[i] > h_floor) {
      ts.push_back(tr.times[i]);
      ls.push_back(std::log(tr.H[i]));
    }
  }
  if (ts.size() >= 2) {
    const double nn = double(ts.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      st += ts[i]; sl += ls[i]; stt += ts[i] * ts[i]; stl += ts[i] * ls[i];
    }
    const double slope = (nn * stl - st * sl) / (nn * stt - st * st);
    const double intercept = (sl - slope * st) / nn;
    tr.fitted_rate = slope;
    double ss = 0.0;
    double lmin = ls[0], lmax = ls[0];
    for (std::size_t i = 0; i < ts.size(); ++i) {
      const double r = ls[i] - (intercept + slope * ts[i]);
      ss += r * r;
      lmin = std::min(lmin, ls[i]);
      lmax = std::max(lmax, ls[i]);
    }
    const double range = std::max(lmax - lmin, 1e-300);
    tr.fit_residual_rel = std::sqrt(ss / nn) / range;
  }
  return tr;
}

} // namespace pnp
