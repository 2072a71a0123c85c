#ifndef PNP_PARAMS_HPP
#define PNP_PARAMS_HPP

#include <optional>

namespace pnp {

/// All coefficients of the two-species drift-diffusion system
///   u_t = div(d1 grad u + theta1 u grad phi) + div(g11 u grad u + g12 u grad v)
///   v_t = div(d2 grad v + theta2 v grad phi) + div(g21 v grad u + g22 v grad v)
///   -lap phi = gamma1 u + gamma2 v
/// together with the constants c1, c2 of the stationary algebraic system.
struct ModelParams {
  double d1 = 1.0;
  double d2 = 1.0;
  double theta1 = 1.0;   // > 0
  double theta2 = -1.0;  // < 0
  double g11 = 1.0;
  double g12 = 1.0;
  double g21 = 1.0;
  double g22 = 1.0;
  double gamma1 = 1.0;   // > 0
  double gamma2 = -1.0;  // < 0
  double c1 = 0.0;
  double c2 = 0.0;

  double steric_det() const { return g11 * g22 - g12 * g21; }
  bool h1() const { return steric_det() >= 0.0; }
  bool h2() const { return steric_det() < 0.0; }
};

/// Throws SignViolation if any coefficient breaks its sign convention.
void check_signs(const ModelParams& p);

struct HypothesisReport {
  bool h1_holds = false;         // g11*g22 - g12*g21 >= 0
  bool h2_holds = false;         // strict negation
  bool script_h1_holds = false;  // coefficient condition for entropy decay, u side
  bool script_h2_holds = false;  // v side
  std::optional<double> script_h3_value;  // initial relative entropy, when supplied
  double poincare_constant = 0.0;
};

/// Sharp Poincare constant (L/pi)^2 for mean-zero functions on an interval
/// of length L.
double poincare_constant(double domain_length);

/// Evaluates the steric determinant condition and the entropy-decay
/// coefficient conditions with the given Poincare constant.
HypothesisReport validate(const ModelParams& p, double poincare_c,
                          std::optional<double> initial_entropy = std::nullopt);

} // namespace pnp

#endif
