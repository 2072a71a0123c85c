#ifndef PNP_ALGEBRA_HPP
#define PNP_ALGEBRA_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "pnp/params.hpp"

namespace pnp {

enum class Branch { Lower, Middle, Upper, Unique };

const char* branch_name(Branch b);

/// A point (u, v, phi) satisfying the algebraic system
///   d1 log u + theta1 phi + g11 u + g12 v = c1
///   d2 log v + theta2 phi + g21 u + g22 v = c2
struct AlgebraicPoint {
  double u = 0.0;
  double v = 0.0;
  double phi = 0.0;
  Branch branch = Branch::Unique;
};

/// Residuals (r1, r2) of the two algebraic equations at (u, v, phi).
std::pair<double, double> residual(double u, double v, double phi,
                                   const ModelParams& p);

/// Unique solution (u(phi), v(phi)) under (H1) by nested monotone scalar
/// solves; residual max-norm at the result is below tol.
AlgebraicPoint solve_uv(double phi, const ModelParams& p, double tol = 1e-12);

/// Closed-form derivatives (u'(phi), v'(phi)) at a solution point.
std::pair<double, double> duv_dphi(const AlgebraicPoint& pt, const ModelParams& p);

/// G(phi) = gamma1 u(phi) + gamma2 v(phi).
double big_g(double phi, const ModelParams& p, double tol = 1e-12);

/// Empirical lower bound k with gamma1 u' + gamma2 v' <= -k over [phi_lo, phi_hi].
double g_prime_bound(const ModelParams& p, double phi_lo, double phi_hi,
                     std::size_t samples);

/// Sampled nonlinearity G and its antiderivative rho with rho' = -G,
/// anchored rho(0) = 0. Queries between samples use monotone cubic
/// interpolation; queries outside the sampled range extend the table.
class NonlinearityTable {
 public:
  NonlinearityTable(const ModelParams& p, double phi_lo, double phi_hi,
                    std::size_t n);

  double g(double phi) const;
  double rho(double phi) const;

  const std::vector<double>& phi_samples() const { return phi_; }
  const std::vector<double>& g_values() const { return gv_; }
  const std::vector<double>& rho_values() const { return rho_; }

 private:
  void extend_to(double phi) const;
  void rebuild_slopes() const;

  ModelParams params_;
  double h_;
  mutable std::vector<double> phi_, gv_, rho_;
  mutable std::vector<double> g_slope_, rho_slope_;  // monotone cubic slopes
};

/// Builds the table by composite Simpson quadrature of -G from 0.
NonlinearityTable build_rho(const ModelParams& p, double phi_lo, double phi_hi,
                            std::size_t n);

} // namespace pnp

#endif
