#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pnp/errors.hpp"
#include "pnp/evolution.hpp"
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

// 10% cosine perturbation of the electroneutral constant state; the cosine
// has exactly zero trapezoid mass on a uniform grid.
std::pair<Field, Field> cosine_ic(const Grid1D& grid, double amp = 0.1) {
  Field u(grid.n), v(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double c = std::cos(M_PI * (grid.x(i) - grid.x0) / grid.length());
    u[i] = 1.0 + amp * c;
    v[i] = 1.0 + amp * c;
  }
  return {u, v};
}

} // namespace

TEST_CASE("trapezoid mass") {
  const Grid1D grid(101, 0.0, 1.0);
  CHECK(mass(Field(101, 2.0), grid) == doctest::Approx(2.0).epsilon(1e-15));
  Field cosx(101);
  for (std::size_t i = 0; i < 101; ++i) cosx[i] = std::cos(M_PI * grid.x(i));
  CHECK(std::abs(mass(cosx, grid)) <= 1e-15); // exact by symmetry
}

TEST_CASE("poisson_step solves the Neumann problem in zero-mean gauge") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(201, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  // Here gamma1 u + gamma2 v = 0 identically, so phi = 0.
  Field phi = poisson_step(u, v, grid, p);
  for (double x : phi) CHECK(std::abs(x) <= 1e-12);

  // Nontrivial right-hand side: u - v = 0.1 cos(pi x) gives the exact
  // solution phi = 0.1 cos(pi x) / pi^2 up to O(h^2).
  Field u2 = u, v2(grid.n, 1.0);
  phi = poisson_step(u2, v2, grid, p);
  double mean = 0.0, err = 0.0;
  for (std::size_t i = 0; i < grid.n; ++i) mean += grid.w(i) * phi[i];
  CHECK(std::abs(mean) <= 1e-12);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double exact = 0.1 * std::cos(M_PI * grid.x(i)) / (M_PI * M_PI);
    err = std::max(err, std::abs(phi[i] - exact));
  }
  CHECK(err <= 1e-4); // second-order consistency at h = 0.005
}

TEST_CASE("poisson_step rejects non-electroneutral data") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(51, 0.0, 1.0);
  const Field u(51, 1.5), v(51, 1.0);
  CHECK_THROWS_AS(poisson_step(u, v, grid, p), CompatibilityViolation);
}

TEST_CASE("stable_dt scales with h^2 and the worst diffusion coefficient") {
  const ModelParams p = symmetric_h1();
  const Grid1D fine(201, 0.0, 1.0), coarse(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(fine);
  const auto [uc, vc] = cosine_ic(coarse);
  const EvolutionState sf{0.0, u, v, Field(fine.n, 0.0), fine};
  const EvolutionState sc{0.0, uc, vc, Field(coarse.n, 0.0), coarse};
  CHECK(stable_dt(sf, p) > 0.0);
  CHECK(stable_dt(sc, p) == doctest::Approx(4.0 * stable_dt(sf, p)).epsilon(1e-12));
}

TEST_CASE("flux_step conserves both masses to machine precision") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(101, 0.0, 1.0);
  auto [u, v] = cosine_ic(grid);
  EvolutionState s{0.0, u, v, poisson_step(u, v, grid, p), grid};
  const double mu = mass(s.u, grid), mv = mass(s.v, grid);
  const double dt = 0.9 * stable_dt(s, p);
  for (int k = 0; k < 50; ++k) s = flux_step(s, dt, p);
  CHECK(mass(s.u, grid) == doctest::Approx(mu).epsilon(1e-13));
  CHECK(mass(s.v, grid) == doctest::Approx(mv).epsilon(1e-13));
  CHECK(s.t == doctest::Approx(50 * dt).epsilon(1e-12));
}

TEST_CASE("flux_step refuses an unstable time step") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  EvolutionState s{0.0, u, v, poisson_step(u, v, grid, p), grid};
  CHECK_THROWS_AS(flux_step(s, 10.0 * stable_dt(s, p), p), StabilityViolation);
}

TEST_CASE("constant states are exact fixed points") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(51, 0.0, 1.0);
  const Field u(51, 1.0), v(51, 1.0);
  EvolutionState s{0.0, u, v, poisson_step(u, v, grid, p), grid};
  const double dt = 0.9 * stable_dt(s, p);
  for (int k = 0; k < 20; ++k) s = flux_step(s, dt, p);
  for (std::size_t i = 0; i < grid.n; ++i) {
    CHECK(s.u[i] == 1.0);
    CHECK(s.v[i] == 1.0);
  }
}

TEST_CASE("entropy is nonnegative and zero only at the constant state") {
  const Grid1D grid(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  const EvolutionState pert{0.0, u, v, Field(grid.n, 0.0), grid};
  CHECK(entropy(pert) > 0.0);
  const EvolutionState flat{0.0, Field(grid.n, 1.3), Field(grid.n, 0.7),
                            Field(grid.n, 0.0), grid};
  CHECK(std::abs(entropy(flat)) <= 1e-14);
  const EvolutionState empty{0.0, Field(grid.n, 0.0), Field(grid.n, 1.0),
                             Field(grid.n, 0.0), grid};
  CHECK_THROWS_AS(entropy(empty), ZeroMass);
}

TEST_CASE("Csiszar-Kullback-Pinsker inequality at the classical constant") {
  const Grid1D grid(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid, 0.4);
  const EvolutionState s{0.0, u, v, Field(grid.n, 0.0), grid};
  // c_k = 1/(2 ||w||_1) is the sharp classical constant; masses are 1 here.
  CHECK(ckp_check(s, 0.5));
}

TEST_CASE("short run: entropy decays monotonically, masses hold") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  EvolutionState probe{0.0, u, v, Field(grid.n, 0.0), grid};
  const double dt = 0.9 * stable_dt(probe, p);
  const EntropyTrace tr = run(p, u, v, grid, dt, 0.01, 10);
  REQUIRE(tr.H.size() > 5);
  for (std::size_t i = 1; i < tr.H.size(); ++i)
    CHECK(tr.H[i] <= tr.H[i - 1] + 1e-12);
  CHECK(tr.mass_drift_rel <= 1e-12);
  CHECK(tr.fitted_rate < 0.0);
}

TEST_CASE("the linearized decay rate matches -8 pi^2 on the symmetric set") {
  // The symmetric perturbation mode decays like exp(-4 pi^2 t) in amplitude,
  // so the (quadratic) entropy decays at twice that rate.
  const ModelParams p = symmetric_h1();
  const Grid1D grid(201, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  EvolutionState probe{0.0, u, v, Field(grid.n, 0.0), grid};
  const double dt = 0.9 * stable_dt(probe, p);
  const EntropyTrace tr = run(p, u, v, grid, dt, 0.02, 100);
  CHECK(tr.fitted_rate == doctest::Approx(-8.0 * M_PI * M_PI).epsilon(0.02));
  CHECK(tr.fit_residual_rel <= 0.02);
}

TEST_CASE("snapshots are recorded and final fields are near-constant") {
  const ModelParams p = symmetric_h1();
  const Grid1D grid(101, 0.0, 1.0);
  const auto [u, v] = cosine_ic(grid);
  EvolutionState probe{0.0, u, v, Field(grid.n, 0.0), grid};
  const double dt = 0.9 * stable_dt(probe, p);
  std::vector<EvolutionState> snaps;
  run(p, u, v, grid, dt, 0.05, 50, &snaps);
  REQUIRE(!snaps.empty());
  const EvolutionState& last = snaps.back();
  double spread = 0.0;
  for (double x : last.u) spread = std::max(spread, std::abs(x - 1.0));
  CHECK(spread < 0.02); // amplitude decayed from 0.1 by exp(-4 pi^2 0.05)
}
