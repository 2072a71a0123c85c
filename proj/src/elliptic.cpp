#include "pnp/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pnp/errors.hpp"

namespace pnp {

namespace {

// Stiffness action of the 1D Neumann Laplacian: (A phi)_i, with
// A = (1/h) tridiag(-1, 2, -1) and single off-diagonal rows at the ends.
void apply_stiffness(const Field& phi, double h, Field& out) {
  const std::size_t n = phi.size();
  out.resize(n);
  out[0] = (phi[0] - phi[1]) / h;
  for (std::size_t i = 1; i + 1 < n; ++i)
    out[i] = (2.0 * phi[i] - phi[i - 1] - phi[i + 1]) / h;
  out[n - 1] = (phi[n - 1] - phi[n - 2]) / h;
}

// Solves (A + diag(extra)) x = b in place; returns false on a zero pivot.
bool solve_tridiag(double h, const Field& extra, Field b, Field& x) {
  const std::size_t n = b.size();
  const double off = -1.0 / h;
  Field diag(n), sup(n, off);
  diag[0] = 1.0 / h + extra[0];
  for (std::size_t i = 1; i + 1 < n; ++i) diag[i] = 2.0 / h + extra[i];
  diag[n - 1] = 1.0 / h + extra[n - 1];

  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) return false;
    const double m = off / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    b[i] -= m * b[i - 1];
  }
  if (diag[n - 1] == 0.0) return false;
  x.resize(n);
  x[n - 1] = b[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;)
    x[i] = (b[i] - sup[i] * x[i + 1]) / diag[i];
  return true;
}

double dot(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

} // namespace

Grid1D::Grid1D(std::size_t n_, double x0_, double x1_) : n(n_), x0(x0_), x1(x1_) {
  if (n < 3) throw std::invalid_argument("grid needs at least 3 nodes");
  if (!(x1 > x0)) throw NonpositiveLength("grid endpoints out of order");
}

double discrete_energy(const Field& phi, const Grid1D& grid,
                       const NonlinearityTable& rho) {
  if (phi.size() != grid.n) throw std::invalid_argument("field/grid size mismatch");
  const double h = grid.h();
  double e = 0.0;
  for (std::size_t i = 0; i + 1 < grid.n; ++i) {
    const double slope = (phi[i + 1] - phi[i]) / h;
    e += 0.5 * h * slope * slope;
  }
  for (std::size_t i = 0; i < grid.n; ++i) e += grid.w(i) * rho.rho(phi[i]);
  return e;
}

AlgebraicPoint branch_point(double phi, Branch b, const ModelParams& p,
                            const TrichotomyReport& rep, double tol) {
  if (b == Branch::Unique) return solve_uv(phi, p, tol);
  if (rep.regime != Regime::Triple) {
    // Single-valued curve: any tag resolves to the unique crossing.
    double lo = 1e-8, hi = 1.0;
    while (v_phi_at_u(lo, p).second < phi) {
      lo *= 0.125;
      if (lo < 1e-300) throw BracketFailure("curve bracket underflow");
    }
    while (v_phi_at_u(hi, p).second > phi) {
      hi *= 8.0;
      if (hi > 1e300) throw BracketFailure("curve bracket overflow");
    }
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (lo + hi);
      if (v_phi_at_u(m, p).second > phi) lo = m; else hi = m;
    }
    const double u = 0.5 * (lo + hi);
    return {u, v_phi_at_u(u, p).first, phi, b};
  }

  const double phi_under = rep.fold_phi[0], phi_bar = rep.fold_phi[1];
  const double slack = 1e-10 * (1.0 + std::abs(phi));
  double ua, ub;     // bisection interval in u
  bool decreasing;   // phi(u) direction on the segment
  switch (b) {
    case Branch::Lower: {
      if (phi < phi_under - slack)
        throw BranchUnavailable("Lower branch undefined below phi_under");
      const double q = std::max(phi, phi_under);
      ua = rep.fold_u[0];
      while (v_phi_at_u(ua, p).second < q) {
        ua *= 0.5;
        if (ua < 1e-300) throw BracketFailure("lower-branch bracket underflow");
      }
      ub = rep.fold_u[0];
      decreasing = true;
      break;
    }
    case Branch::Middle: {
      if (phi < phi_under - slack || phi > phi_bar + slack)
        throw BranchUnavailable("Middle branch defined only on the fold interval");
      ua = rep.fold_u[0];
      ub = rep.fold_u[1];
      decreasing = false;
      break;
    }
    case Branch::Upper: {
      if (phi > phi_bar + slack)
        throw BranchUnavailable("Upper branch undefined above phi_bar");
      const double q = std::min(phi, phi_bar);
      ua = rep.fold_u[1];
      ub = rep.fold_u[1];
      while (v_phi_at_u(ub, p).second > q) {
        ub *= 2.0;
        if (ub > 1e300) throw BracketFailure("upper-branch bracket overflow");
      }
      decreasing = true;
      break;
    }
    default:
      return solve_uv(phi, p, tol);
  }

  const double target = (b == Branch::Middle) ? std::clamp(phi, phi_under, phi_bar)
                        : (b == Branch::Lower) ? std::max(phi, phi_under)
                                               : std::min(phi, phi_bar);
  for (int it = 0; it < 200 && ub - ua > 1e-16 * (1.0 + ua); ++it) {
    const double m = 0.5 * (ua + ub);
    const double fm = v_phi_at_u(m, p).second - target;
    if ((fm > 0.0) == decreasing) ua = m; else ub = m;
  }
  const double u = 0.5 * (ua + ub);
  return {u, v_phi_at_u(u, p).first, phi, b};
}

std::pair<double, double> verify_equivalence(const StationarySolution& sol,
                                             const ModelParams& p) {
  double f1_lo = std::numeric_limits<double>::infinity(), f1_hi = -f1_lo;
  double f2_lo = f1_lo, f2_hi = -f1_lo;
  for (std::size_t i = 0; i < sol.phi.size(); ++i) {
    const double u = sol.u[i], v = sol.v[i];
    if (!(u > 0.0) || !(v > 0.0))
      throw NonpositiveDensity("equivalence check requires positive densities");
    const double f1 = p.d1 * std::log(u) + p.theta1 * sol.phi[i] + p.g11 * u + p.g12 * v;
    const double f2 = p.d2 * std::log(v) + p.theta2 * sol.phi[i] + p.g21 * u + p.g22 * v;
    f1_lo = std::min(f1_lo, f1); f1_hi = std::max(f1_hi, f1);
    f2_lo = std::min(f2_lo, f2); f2_hi = std::max(f2_hi, f2);
  }
  return {f1_hi - f1_lo, f2_hi - f2_lo};
}

StationarySolution solve_stationary(const ModelParams& p, const Grid1D& grid,
                                    const Field& init,
                                    const BranchSelection& selection,
                                    const std::optional<Field>& source,
                                    double grad_tol, std::size_t max_iter) {
  check_signs(p);
  if (init.size() != grid.n) throw std::invalid_argument("init/grid size mismatch");
  if (source && source->size() != grid.n)
    throw std::invalid_argument("source/grid size mismatch");
  if (!selection.tags.empty() && selection.tags.size() != grid.n)
    throw std::invalid_argument("branch map/grid size mismatch");

  const std::size_t n = grid.n;
  const double h = grid.h();
  auto tag = [&](std::size_t i) {
    return selection.tags.empty() ? Branch::Unique : selection.tags[i];
  };
  bool needs_branches = false;
  for (std::size_t i = 0; i < n && !needs_branches; ++i)
    needs_branches = tag(i) != Branch::Unique;
  if (needs_branches && p.h1())
    throw HypothesisViolation("branch selections require (H2)");
  if (!needs_branches && p.h2())
    throw HypothesisViolation("the Unique branch requires (H1)");

  TrichotomyReport rep;
  if (needs_branches) rep = classify(p);

  std::optional<NonlinearityTable> table;
  if (!needs_branches) {
    auto [lo, hi] = std::minmax_element(init.begin(), init.end());
    table.emplace(p, *lo - 1.0, *hi + 1.0, 65);
  }

  auto point_at = [&](double phi, std::size_t i) {
    return needs_branches ? branch_point(phi, tag(i), p, rep)
                          : solve_uv(phi, p);
  };

  Field phi = init, u(n), v(n), gval(n), gprime(n), aphi(n), grad(n);

  auto assemble = [&](const Field& f, Field& uu, Field& vv, Field& gv,
                      Field& gp) {
    for (std::size_t i = 0; i < n; ++i) {
      const AlgebraicPoint pt = point_at(f[i], i);
      uu[i] = pt.u;
      vv[i] = pt.v;
      gv[i] = p.gamma1 * pt.u + p.gamma2 * pt.v;
      auto [du, dv] = duv_dphi(pt, p);
      gp[i] = p.gamma1 * du + p.gamma2 * dv;
    }
  };

  auto gradient = [&](const Field& f, const Field& gv, Field& out) {
    apply_stiffness(f, h, out);
    for (std::size_t i = 0; i < n; ++i) {
      double rhs = gv[i];
      if (source) rhs += (*source)[i];
      out[i] -= grid.w(i) * rhs;
    }
  };

  auto energy = [&](const Field& f) {
    double e = discrete_energy(f, grid, *table);
    if (source)
      for (std::size_t i = 0; i < n; ++i) e -= grid.w(i) * (*source)[i] * f[i];
    return e;
  };

  assemble(phi, u, v, gval, gprime);
  gradient(phi, gval, grad);

  auto grad_norm = [&](const Field& g) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(g[i]) / grid.w(i));
    return m;
  };

  std::size_t iter = 0;
  double gn = grad_norm(grad);
  Field trial(n), tu(n), tv(n), tg(n), tgp(n), tgrad(n), extra(n), step(n);

  while (gn > grad_tol && iter < max_iter) {
    ++iter;
    for (std::size_t i = 0; i < n; ++i) extra[i] = grid.w(i) * (-gprime[i]);
    Field rhs(n);
    for (std::size_t i = 0; i < n; ++i) rhs[i] = -grad[i];
    bool have_newton = solve_tridiag(h, extra, rhs, step);
    if (!have_newton)
      for (std::size_t i = 0; i < n; ++i) step[i] = -grad[i];

    const double e0 = table ? energy(phi) : 0.0;
    const double slope = dot(grad, step);
    const double r0 = std::sqrt(dot(grad, grad));

    double alpha = 1.0;
    bool accepted = false;
    while (alpha > 1e-8) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = phi[i] + alpha * step[i];
      try {
        assemble(trial, tu, tv, tg, tgp);
        gradient(trial, tg, tgrad);
        bool ok;
        if (table) {
          ok = energy(trial) <= e0 + 1e-4 * alpha * slope ||
               std::sqrt(dot(tgrad, tgrad)) < r0;
        } else {
          ok = std::sqrt(dot(tgrad, tgrad)) <= (1.0 - 1e-4 * alpha) * r0;
        }
        if (ok) { accepted = true; break; }
      } catch (const BranchUnavailable&) {
        // trial left the branch window; shrink the step
      } catch (const BracketFailure&) {
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // Steepest-descent rescue with a conservative step.
      double gmax = grad_norm(grad);
      const double scale = 0.1 / std::max(gmax, 1.0);
      bool moved = false;
      for (double a = scale; a > scale * 1e-10; a *= 0.5) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = phi[i] - a * grad[i];
        try {
          assemble(trial, tu, tv, tg, tgp);
          gradient(trial, tg, tgrad);
          if (std::sqrt(dot(tgrad, tgrad)) < r0) { moved = true; break; }
        } catch (const BranchUnavailable&) {
        } catch (const BracketFailure&) {
        }
      }
      if (!moved)
        throw NonConvergence("stationary solve stalled; last gradient norm " +
                             std::to_string(gn));
    }
    phi.swap(trial);
    u.swap(tu); v.swap(tv); gval.swap(tg); gprime.swap(tgp); grad.swap(tgrad);
    gn = grad_norm(grad);
  }
  if (gn > grad_tol)
    throw NonConvergence("stationary solve: gradient norm " + std::to_string(gn) +
                         " after " + std::to_string(iter) + " iterations");

  StationarySolution sol;
  sol.phi = phi;
  sol.u = u;
  sol.v = v;
  sol.iterations = iter;
  sol.residual_pde = gn;
  if (table) {
    sol.energy = energy(phi);
  } else {
    apply_stiffness(phi, h, aphi);
    sol.energy = 0.5 * dot(phi, aphi);
  }
  sol.branch_map.resize(n);
  for (std::size_t i = 0; i < n; ++i) sol.branch_map[i] = tag(i);
  auto [s1, s2] = verify_equivalence(sol, p);
  sol.f1_span = s1;
  sol.f2_span = s2;
  return sol;
}

FamilyReport discontinuous_family(const ModelParams& p, const Grid1D& grid,
                                  const std::vector<std::vector<Branch>>& patterns) {
  check_signs(p);
  if (!p.h2()) throw HypothesisViolation("discontinuous families require (H2)");
  const TrichotomyReport rep = classify(p);

  double phi0 = 0.0;
  if (rep.regime == Regime::Triple)
    phi0 = 0.5 * (rep.fold_phi[0] + rep.fold_phi[1]);

  const double span_tol = 1e-8 * (1.0 + std::abs(p.c1) + std::abs(p.c2));
  FamilyReport out;
  for (const auto& pattern : patterns) {
    FamilyEntry e;
    e.pattern = pattern;
    try {
      if (pattern.size() != grid.n)
        throw std::invalid_argument("pattern/grid size mismatch");
      Field init(grid.n, phi0);
      e.sol = solve_stationary(p, grid, init, BranchSelection{pattern});

      double max_g = 0.0;
      for (std::size_t i = 0; i < grid.n; ++i)
        max_g = std::max(max_g, std::abs(p.gamma1 * e.sol.u[i] + p.gamma2 * e.sol.v[i]));
      double flux_jump = 0.0;
      const double h = grid.h();
      for (std::size_t i = 1; i + 1 < grid.n; ++i) {
        if (pattern[i] == pattern[i - 1] && pattern[i] == pattern[i + 1]) continue;
        const double left = (e.sol.phi[i] - e.sol.phi[i - 1]) / h;
        const double right = (e.sol.phi[i + 1] - e.sol.phi[i]) / h;
        flux_jump = std::max(flux_jump, std::abs(right - left));
      }
      if (e.sol.residual_pde > 1e-8) {
        e.reason = "pde residual above tolerance";
      } else if (flux_jump > h * (max_g + 1.0)) {
        e.reason = "flux discontinuity across a branch interface";
      } else if (e.sol.f1_span > span_tol || e.sol.f2_span > span_tol) {
        e.reason = "chemical potentials not constant";
      } else {
        e.verified = true;
        ++out.n_verified;
      }
    } catch (const std::exception& ex) {
      e.reason = ex.what();
    }
    out.entries.push_back(std::move(e));
  }

  // Count pairwise-distinct verified solutions in L2 of u.
  std::vector<const StationarySolution*> kept;
  for (const auto& e : out.entries) {
    if (!e.verified) continue;
    bool dup = false;
    for (const auto* s : kept) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < grid.n; ++i) {
        const double d = e.sol.u[i] - s->u[i];
        d2 += grid.w(i) * d * d;
      }
      if (std::sqrt(d2) <= 1e-6) { dup = true; break; }
    }
    if (!dup) kept.push_back(&e.sol);
  }
  out.n_distinct = kept.size();
  return out;
}

std::pair<Field, double> solve_stationary_2d(const ModelParams& p,
                                             const Grid2D& grid,
                                             const Field& init,
                                             double grad_tol,
                                             std::size_t max_iter) {
  check_signs(p);
  if (!p.h1()) throw HypothesisViolation("2D solve supports (H1) only");
  const std::size_t nx = grid.nx, ny = grid.ny, n = nx * ny;
  if (init.size() != n) throw std::invalid_argument("init/grid size mismatch");
  const double hx = grid.hx(), hy = grid.hy();

  // Mirror-ghost 5-point Laplacian.
  auto lap = [&](const Field& f, Field& out) {
    auto at = [&](long i, long j) {
      i = std::abs(i); j = std::abs(j);
      if (i >= long(nx)) i = 2 * long(nx) - 2 - i;
      if (j >= long(ny)) j = 2 * long(ny) - 2 - j;
      return f[std::size_t(j) * nx + std::size_t(i)];
    };
    for (long j = 0; j < long(ny); ++j)
      for (long i = 0; i < long(nx); ++i)
        out[std::size_t(j) * nx + std::size_t(i)] =
            (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j)) / (hx * hx) +
            (at(i, j - 1) - 2.0 * at(i, j) + at(i, j + 1)) / (hy * hy);
  };

  Field phi = init, r(n), lphi(n), gp(n);
  auto residual_vec = [&](const Field& f, Field& out) {
    lap(f, lphi);
    for (std::size_t k = 0; k < n; ++k) out[k] = -lphi[k] - big_g(f[k], p);
  };

  residual_vec(phi, r);
  double rn = 0.0;
  for (double x : r) rn = std::max(rn, std::abs(x));

  std::size_t iter = 0;
  Field dir(n), jd(n), cg_r(n), cg_p(n), z(n);
  while (rn > grad_tol && iter < max_iter) {
    ++iter;
    for (std::size_t k = 0; k < n; ++k) {
      const AlgebraicPoint pt = solve_uv(phi[k], p);
      auto [du, dv] = duv_dphi(pt, p);
      gp[k] = p.gamma1 * du + p.gamma2 * dv;  // negative under (H1)
    }
    // Newton system (-lap - diag(G')) d = r, SPD; plain CG.
    auto apply_j = [&](const Field& x, Field& out) {
      lap(x, out);
      for (std::size_t k = 0; k < n; ++k) out[k] = -out[k] - gp[k] * x[k];
    };
    std::fill(dir.begin(), dir.end(), 0.0);
    cg_r = r;
    cg_p = cg_r;
    double rho_old = dot(cg_r, cg_r);
    for (std::size_t cg = 0; cg < 10 * n && std::sqrt(rho_old) > 1e-13; ++cg) {
      apply_j(cg_p, jd);
      const double alpha = rho_old / dot(cg_p, jd);
      for (std::size_t k = 0; k < n; ++k) {
        dir[k] += alpha * cg_p[k];
        cg_r[k] -= alpha * jd[k];
      }
      const double rho_new = dot(cg_r, cg_r);
      for (std::size_t k = 0; k < n; ++k)
        cg_p[k] = cg_r[k] + (rho_new / rho_old) * cg_p[k];
      rho_old = rho_new;
    }
    // J dir = r, so the Newton update is phi - dir; backtrack on the
    // residual norm to stay inside the solver's bracket range.
    double step = 1.0;
    const Field phi_old = phi;
    const double rn_old = rn;
    for (int bt = 0; bt < 40; ++bt) {
      for (std::size_t k = 0; k < n; ++k) phi[k] = phi_old[k] - step * dir[k];
      try {
        residual_vec(phi, r);
      } catch (const std::exception&) {
        step *= 0.5;
        continue;
      }
      rn = 0.0;
      for (double x : r) rn = std::max(rn, std::abs(x));
      if (rn < rn_old) break;
      step *= 0.5;
    }
  }
  if (rn > grad_tol) throw NonConvergence("2D stationary solve did not converge");
  return {phi, rn};
}

} // namespace pnp
