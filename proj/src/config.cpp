#include "pnp/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pnp/errors.hpp"

namespace pnp {

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return (b == std::string::npos) ? std::string{} : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    try {
      std::size_t used = 0;
      const double x = std::stod(val, &used);
      if (used != val.size()) throw std::invalid_argument(val);
      cfg.kv_[key] = x;
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(lineno) + ": bad value for key '" +
                        key + "': '" + val + "'");
    }
  }
  return cfg;
}

double Config::number(const std::string& key) const {
  const auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

double Config::number_or(const std::string& key, double fallback) const {
  const auto it = kv_.find(key);
  return (it == kv_.end()) ? fallback : it->second;
}

void Config::set(const std::string& key, double value) { kv_[key] = value; }

ModelParams params_from_config(const Config& cfg) {
  ModelParams p;
  p.d1 = cfg.number("d1");
  p.d2 = cfg.number("d2");
  p.theta1 = cfg.number("theta1");
  p.theta2 = cfg.number("theta2");
  p.g11 = cfg.number("g11");
  p.g12 = cfg.number("g12");
  p.g21 = cfg.number("g21");
  p.g22 = cfg.number("g22");
  p.gamma1 = cfg.number("gamma1");
  p.gamma2 = cfg.number("gamma2");
  p.c1 = cfg.number("c1");
  p.c2 = cfg.number("c2");
  return p;
}

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

} // namespace pnp
