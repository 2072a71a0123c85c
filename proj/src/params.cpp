#include "pnp/params.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pnp/errors.hpp"

namespace pnp {

void check_signs(const ModelParams& p) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw SignViolation(what);
  };
  require(p.d1 > 0.0, "d1 must be positive");
  require(p.d2 > 0.0, "d2 must be positive");
  require(p.theta1 > 0.0, "theta1 must be positive");
  require(p.theta2 < 0.0, "theta2 must be negative");
  require(p.g11 > 0.0, "g11 must be positive");
  require(p.g12 > 0.0, "g12 must be positive");
  require(p.g21 > 0.0, "g21 must be positive");
  require(p.g22 > 0.0, "g22 must be positive");
  require(p.gamma1 > 0.0, "gamma1 must be positive");
  require(p.gamma2 < 0.0, "gamma2 must be negative");
}

double poincare_constant(double domain_length) {
  if (!(domain_length > 0.0)) throw NonpositiveLength("domain length must be positive");
  const double r = domain_length / std::numbers::pi;
  return r * r;
}

HypothesisReport validate(const ModelParams& p, double poincare_c,
                          std::optional<double> initial_entropy) {
  check_signs(p);
  if (!(poincare_c > 0.0)) throw NonpositiveLength("Poincare constant must be positive");

  HypothesisReport rep;
  rep.poincare_constant = poincare_c;
  rep.h1_holds = p.steric_det() >= 0.0;
  rep.h2_holds = !rep.h1_holds;

  const double half_inv_cp = 0.5 / poincare_c;
  const double lhs_u = half_inv_cp * (2.0 * p.g11 - p.g12 - p.g21);
  const double rhs_u = std::max(
      -0.5 * (p.gamma2 * p.theta1 + p.gamma1 * (2.0 * p.theta1 + p.theta2)), 0.0);
  rep.script_h1_holds = lhs_u > rhs_u;

  const double lhs_v = half_inv_cp * (2.0 * p.g22 - p.g12 - p.g21);
  const double rhs_v = std::max(
      -0.5 * (p.gamma1 * p.theta2 + p.gamma2 * (2.0 * p.theta2 + p.theta1)), 0.0);
  rep.script_h2_holds = lhs_v > rhs_v;

  rep.script_h3_value = initial_entropy;
  return rep;
}

} // namespace pnp
