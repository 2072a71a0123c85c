#ifndef PNP_TRICHOTOMY_HPP
#define PNP_TRICHOTOMY_HPP

#include <array>
#include <cstddef>
#include <vector>

#include "pnp/params.hpp"

namespace pnp {

enum class Regime { Triple, UniqueMonotone, Inflection };

const char* regime_name(Regime r);

/// Cubic p(u) = k3 u^3 + k2 u^2 + k1 u + k0 governing the extreme points of
/// sigma, with the Shengjin auxiliary quantities and its real roots.
struct CubicData {
  double k3 = 0.0, k2 = 0.0, k1 = 0.0, k0 = 0.0;
  double A = 0.0, B = 0.0, C = 0.0;
  double delta_dis = 0.0;
  std::array<double, 3> roots{};  // sorted descending: u1 >= u2 >= u3
  int n_real_roots = 0;
};

struct TrichotomyReport {
  double u_star = 0.0;
  CubicData cubic;
  double sigma_at_u1 = 0.0;
  Regime regime = Regime::UniqueMonotone;
  std::array<double, 2> fold_u{};    // Triple only: sigma = 0 roots, ascending
  std::array<double, 2> fold_phi{};  // Triple only: (phi_under, phi_bar)
  double phi_check = 0.0;            // Inflection only
};

/// Solution curve of the algebraic system parametrized by u.
struct BranchCurve {
  std::vector<double> u_samples;
  std::vector<double> v_samples;
  std::vector<double> phi_samples;
};

/// u* = d1 g22 / (g12 g21 - g11 g22); domain boundary of sigma under (H2).
double u_star(const ModelParams& p);

/// Coefficients k3..k0 of p(u).
CubicData cubic_coeffs(const ModelParams& p);

/// Fills A, B, C and the discriminant B^2 - 4AC.
CubicData shengjin(CubicData cubic);

/// Three distinct real roots for delta_dis < 0, sorted descending.
CubicData cubic_roots(CubicData cubic);

/// v on the singular curve: v = d2 (d1 + g11 u) / (u (g12 g21 - g11 g22) - d1 g22).
double v_on_singular_curve(double u, const ModelParams& p);

/// sigma(u) whose zeros locate the fold points; defined for u > u*.
double sigma(double u, const ModelParams& p);

/// Regime classification from the sign of sigma(u1); in the Triple regime
/// also locates the fold points and the fold potentials.
TrichotomyReport classify(const ModelParams& p, double tol_sigma = -1.0);

/// For a given u, the unique v solving the phi-eliminated equation, and the
/// matching phi from the first equation.
std::pair<double, double> v_phi_at_u(double u, const ModelParams& p,
                                     double tol = 1e-12);

/// Sweeps the solution curve over [u_lo, u_hi] with n samples.
BranchCurve branch_sweep(const ModelParams& p, double u_lo, double u_hi,
                         std::size_t n, double tol = 1e-12);

/// Number of curve crossings of phi(u) = phi_slice on a dense u-grid.
std::size_t slice_crossings(const BranchCurve& curve, double phi_slice);

} // namespace pnp

#endif
