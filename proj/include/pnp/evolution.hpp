#ifndef PNP_EVOLUTION_HPP
#define PNP_EVOLUTION_HPP

#include <cstddef>
#include <vector>

#include "pnp/elliptic.hpp"
#include "pnp/params.hpp"

namespace pnp {

struct EvolutionState {
  double t = 0.0;
  Field u, v;
  Field phi;  // zero-mean gauge
  Grid1D grid;
};

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> H;
  std::vector<double> l1_u, l1_v;
  double fitted_rate = 0.0;       // least-squares slope of log H, second half
  double fit_residual_rel = 0.0;  // fit residual / fitted range of log H
  double mass_u0 = 0.0, mass_v0 = 0.0;
  double mass_drift_rel = 0.0;    // worst relative mass drift seen
};

/// Trapezoid mass of a nodal field.
double mass(const Field& f, const Grid1D& grid);

/// Linear Neumann Poisson solve -lap phi = gamma1 u + gamma2 v with the
/// zero-mean gauge. Requires discrete electroneutrality.
Field poisson_step(const Field& u, const Field& v, const Grid1D& grid,
                   const ModelParams& p, double compat_tol = 1e-10);

/// One explicit conservative finite-volume step of the two density
/// equations; phi is taken from the state.
EvolutionState flux_step(const EvolutionState& state, double dt,
                         const ModelParams& p);

/// Largest stable time step for the current state.
double stable_dt(const EvolutionState& state, const ModelParams& p);

/// Relative entropy H = int (u log(u/w1bar) + v log(v/w2bar)).
double entropy(const EvolutionState& state);

/// Csiszar-Kullback-Pinsker check with supplied constant c_k, for both
/// species: int (u log(u/w) - u + w) >= c_k (int |u - w|)^2.
bool ckp_check(const EvolutionState& state, double c_k);

/// Integrates to t_end recording the entropy trace every sample_every steps.
EntropyTrace run(const ModelParams& p, const Field& u0, const Field& v0,
                 const Grid1D& grid, double dt, double t_end,
                 std::size_t sample_every,
                 std::vector<EvolutionState>* snapshots = nullptr);

} // namespace pnp

#endif
