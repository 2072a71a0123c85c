#ifndef PNP_ERRORS_HPP
#define PNP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pnp {

struct SignViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonpositiveLength : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonpositiveDensity : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct HypothesisViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BracketFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SingularDenominator : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DegenerateCubic : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct WrongRegime : std::logic_error {
  using std::logic_error::logic_error;
};
struct DomainViolation : std::domain_error {
  using std::domain_error::domain_error;
};
struct RangeExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BranchUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CompatibilityViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct StabilityViolation : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NegativityBreach : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZeroMass : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace pnp

#endif
