#pragma once

// Run configuration: per-experiment defaults double as the schema. A user
// file may only contain keys that exist in the defaults, with matching types.

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>

namespace cli {

using nlohmann::json;

class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string key, const std::string& what) : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

private:
  std::string key_;
};

inline const char* experiments[] = {"selfsim", "talanov", "nls", "universal", "painleve3", "painleve2", "asympt",
                                    "sweep-eps"};

inline json frame_defaults() {
  return {{"a", 0.5}, {"T_f", 0.0}, {"X_f", 0.0}, {"Phi_star", 0.0}, {"phi0", 0.0}, {"nu", 0.0}};
}

inline json defaults(const std::string& experiment) {
  json body;
  if (experiment == "selfsim")
    body = {{"T0", 1.0}, {"T1", 2.0}, {"nT", 65}, {"X0", -2.0}, {"X1", 2.0}, {"nX", 65}};
  else if (experiment == "talanov")
    body = {{"A", 1.0 / 6.0}, {"T0", 0.0},     {"T_start", 1.0}, {"delta", 0.0}, {"delta_dot", 1.0},
            {"T_end", 2.0},   {"dt", 1e-3},    {"x_half", 4.0},  {"n", 256},     {"epsilon", 0.05}};
  else if (experiment == "nls")
    body = {{"epsilon", 1.0},
            {"x_half", 40.0},
            {"n", 1024},
            {"dt", 1e-3},
            {"t_end", 1.0},
            {"snapshot_every", 100},
            {"filter", false},
            {"initial", {{"kind", "soliton"}, {"eta", 1.0}, {"x0", 0.0}, {"theta0", 0.0}}}};
  else if (experiment == "universal")
    body = {{"t0s", {-16.0, -32.0, -64.0}},
            {"mollifier_width_factor", 3.0},
            {"x_half", 128.0},
            {"n", 4096},
            {"dt", 0.01},
            {"snapshot_interval", 0.25},
            {"x_window", 20.0},
            {"t_window", 4.0}};
  else if (experiment == "painleve3")
    body = {{"x_max", 100.0}, {"dy", 1e-3}, {"dx", 0.05}, {"envelope_from", 20.0}, {"envelope_to", 100.0}};
  else if (experiment == "painleve2")
    body = {{"z_min", -12.0},
            {"z_max", 12.0},
            {"n_points", 40001},
            {"sign_convention", 1},
            {"cubic_coefficient", 2.0},
            {"decay_seed", nullptr},
            {"max_iterations", 60},
            {"tolerance", 1e-9},
            {"continuation_stages", 6},
            {"threshold", 0.2}};
  else if (experiment == "asympt")
    body = {{"s_min", -6.0}, {"s_max", 6.0}, {"n", 241}, {"t", -10.0}};
  else if (experiment == "sweep-eps")
    body = {{"T_start", -1.024e-3}, {"T_end", 1.024e-4},  {"epsilons", {0.04, 0.02, 0.01}},
            {"mollifier_width_factor", 3.0}, {"inner_dx", 0.0625}, {"inner_dt", 0.01}};
  else
    throw ConfigError("experiment", "unknown experiment '" + experiment + "'");
  return {{"frame", frame_defaults()}, {experiment, body}};
}

namespace detail {
inline bool same_kind(const json& def, const json& v) {
  if (def.is_null()) return v.is_null() || v.is_number();
  if (def.is_number_float()) return v.is_number();
  if (def.is_number_integer()) return v.is_number_integer();
  return def.type() == v.type();
}

// overlay `user` onto `base` in place
inline void overlay(json& base, const json& user, const std::string& path) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError(key, "unknown key");
    json& slot = base[it.key()];
    if (slot.is_object()) {
      if (!it->is_object()) throw ConfigError(key, "expected an object");
      overlay(slot, *it, key);
      continue;
    }
    if (!same_kind(slot, *it)) throw ConfigError(key, "expected " + std::string(slot.type_name()) + ", got " +
                                                          it->type_name());
    if (slot.is_array())
      for (const auto& e : *it)
        if (!e.is_number()) throw ConfigError(key, "array entries must be numbers");
    slot = *it;
  }
}
} // namespace detail

/// Defaults for `experiment` overlaid with the file (if any) and then with
/// dotted key=value overrides, the value parsed as JSON when possible.
inline json resolve(const std::string& experiment, const std::string& file, const std::vector<std::string>& sets) {
  json cfg = defaults(experiment);
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("config", "cannot open '" + file + "'");
    json user;
    try {
      user = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config", e.what());
    }
    if (!user.is_object()) throw ConfigError("config", "top level must be an object");
    detail::overlay(cfg, user, "");
  }
  for (const auto& s : sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError(s, "override must look like key=value");
    const std::string key = s.substr(0, eq), text = s.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    json patch = value;
    std::string rest = key;
    std::vector<std::string> parts;
    for (std::size_t p; (p = rest.find('.')) != std::string::npos; rest = rest.substr(p + 1))
      parts.push_back(rest.substr(0, p));
    parts.push_back(rest);
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) patch = json{{*it, patch}};
    detail::overlay(cfg, patch, "");
  }
  return cfg;
}

template <class T>
T get(const json& section, const std::string& prefix, const char* key) {
  try {
    return section.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(prefix + "." + key, e.what());
  }
}

} // namespace cli
