#ifndef PNP_ELLIPTIC_HPP
#define PNP_ELLIPTIC_HPP

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pnp/algebra.hpp"
#include "pnp/params.hpp"
#include "pnp/trichotomy.hpp"

namespace pnp {

struct Grid1D {
  std::size_t n = 0;
  double x0 = 0.0;
  double x1 = 1.0;

  Grid1D(std::size_t n_, double x0_, double x1_);
  double h() const { return (x1 - x0) / double(n - 1); }
  double x(std::size_t i) const { return x0 + h() * double(i); }
  double length() const { return x1 - x0; }
  /// Trapezoid weight of node i (h/2 at the ends, h inside).
  double w(std::size_t i) const {
    return (i == 0 || i + 1 == n) ? 0.5 * h() : h();
  }
};

using Field = std::vector<double>;

struct StationarySolution {
  Field phi, u, v;
  double energy = 0.0;
  double residual_pde = 0.0;  // max-norm of -lap_h phi - G(phi) - source
  double f1_span = 0.0, f2_span = 0.0;
  std::vector<Branch> branch_map;
  std::size_t iterations = 0;
};

/// Per-node branch rule for recovering (u, v) from phi.
struct BranchSelection {
  std::vector<Branch> tags;  // empty means Unique everywhere

  static BranchSelection unique() { return {}; }
  static BranchSelection uniform(Branch b, std::size_t n) {
    return {std::vector<Branch>(n, b)};
  }
};

/// Trapezoidal discrete energy: 1/2 int |grad phi|^2 + int rho(phi).
double discrete_energy(const Field& phi, const Grid1D& grid,
                       const NonlinearityTable& rho);

/// Solves -lap phi = G(phi) + source with zero Neumann data by damped
/// Newton on the first-order conditions of the discrete energy.
StationarySolution solve_stationary(
    const ModelParams& p, const Grid1D& grid, const Field& init,
    const BranchSelection& selection = BranchSelection::unique(),
    const std::optional<Field>& source = std::nullopt,
    double grad_tol = 1e-10, std::size_t max_iter = 200);

/// Spans (max - min) of F1 and F2 across nodes.
std::pair<double, double> verify_equivalence(const StationarySolution& sol,
                                             const ModelParams& p);

struct FamilyEntry {
  std::vector<Branch> pattern;
  bool verified = false;
  std::string reason;
  StationarySolution sol;
};

struct FamilyReport {
  std::vector<FamilyEntry> entries;
  std::size_t n_verified = 0;
  std::size_t n_distinct = 0;  // pairwise L2(u) distance > 1e-6
};

/// Attempts one stationary solve per branch pattern; keeps only solutions
/// passing the residual, flux-continuity, and equivalence checks.
FamilyReport discontinuous_family(const ModelParams& p, const Grid1D& grid,
                                  const std::vector<std::vector<Branch>>& patterns);

/// (u, v) on a given branch of the (H2) solution curve at potential phi.
AlgebraicPoint branch_point(double phi, Branch b, const ModelParams& p,
                            const TrichotomyReport& rep, double tol = 1e-12);

// --- 2D rectangle (tensor-product 5-point stencil, smoke use only) ---

struct Grid2D {
  std::size_t nx = 0, ny = 0;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  double hx() const { return (x1 - x0) / double(nx - 1); }
  double hy() const { return (y1 - y0) / double(ny - 1); }
};

/// 2D Neumann solve of -lap phi = G(phi) under (H1); returns nodal phi
/// (row-major, ny rows of nx) with the PDE residual max-norm.
std::pair<Field, double> solve_stationary_2d(const ModelParams& p,
                                             const Grid2D& grid,
                                             const Field& init,
                                             double grad_tol = 1e-9,
                                             std::size_t max_iter = 100);

} // namespace pnp

#endif
