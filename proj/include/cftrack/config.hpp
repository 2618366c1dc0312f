#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cftrack/tracker.hpp"

namespace cftrack {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_double_list(const std::string& s) {
  std::string norm = s;
  for (char& c : norm)
    if (c == ',') c = ' ';
  std::istringstream ss(norm);
  std::vector<double> out;
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw std::runtime_error("config: invalid boolean for " + key + ": " + s);
}

}  // namespace detail

/// Key=value configuration file. '#' starts a comment; every TrackerConfig
/// field has a key (see README). Unknown keys are an error.
inline void apply_config_line(TrackerConfig& cfg, const std::string& key,
                              const std::string& value) {
  auto d = [&] { return std::stod(value); };
  auto i = [&] { return std::stoi(value); };
  if (key == "k_context") cfg.k_context = i();
  else if (key == "eta_c") cfg.eta_c = d();
  else if (key == "eta_h") cfg.eta_h = d();
  else if (key == "theta1") cfg.theta1 = d();
  else if (key == "theta2") cfg.theta2 = d();
  else if (key == "scales") cfg.scales = detail::parse_double_list(value);
  else if (key == "padding") cfg.padding = d();
  else if (key == "tau_l") cfg.tau_l = d();
  else if (key == "tau_u") cfg.tau_u = d();
  else if (key == "template_max_cells") cfg.template_max_cells = i();
  else if (key == "subcell") cfg.subcell = detail::parse_bool(value, key);
  else if (key == "history_includes_gated_out")
    cfg.history_includes_gated_out = detail::parse_bool(value, key);
  else if (key == "lambda1") cfg.admm.lambda1 = d();
  else if (key == "lambda2") cfg.admm.lambda2 = d();
  else if (key == "rho0") cfg.admm.rho0 = d();
  else if (key == "beta") cfg.admm.beta = d();
  else if (key == "rho_max") cfg.admm.rho_max = d();
  else if (key == "admm_iters") cfg.admm.max_iters = i();
  else if (key == "cell_size") cfg.features.cell_size = i();
  else if (key == "hog_bins") cfg.features.hog_bins = i();
  else if (key == "colornames_path") cfg.features.colornames_path = value;
  else throw std::runtime_error("config: unknown key: " + key);
}

inline TrackerConfig load_config(const std::string& path,
                                 TrackerConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config: expected key=value at " + path + ":" +
                               std::to_string(line_no));
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    try {
      apply_config_line(base, key, value);
    } catch (const std::invalid_argument&) {
      throw std::runtime_error("config: invalid value at " + path + ":" +
                               std::to_string(line_no));
    }
  }
  return base;
}

/// Environment fallback for the color-name table path.
inline void apply_env_overrides(TrackerConfig& cfg) {
  if (cfg.features.colornames_path.empty())
    if (const char* p = std::getenv("CFTRACK_COLORNAMES"))
      cfg.features.colornames_path = p;
}

}  // namespace cftrack
