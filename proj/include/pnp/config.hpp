#ifndef PNP_CONFIG_HPP
#define PNP_CONFIG_HPP

#include <map>
#include <optional>
#include <string>

#include "pnp/params.hpp"

namespace pnp {

/// Flat key = value configuration (decimal literals, # comments).
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_text(const std::string& text);

  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  double number(const std::string& key) const;
  double number_or(const std::string& key, double fallback) const;
  void set(const std::string& key, double value);

  const std::map<std::string, double>& entries() const { return kv_; }

 private:
  std::map<std::string, double> kv_;
};

/// Model coefficients from the required keys d1..c2; throws ConfigError
/// naming the first missing key.
ModelParams params_from_config(const Config& cfg);

/// Full-precision decimal formatting used for all CSV artifacts.
std::string format_full(double x);

} // namespace pnp

#endif
