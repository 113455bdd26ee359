// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/config.hpp"

#include <charconv>
#include <cmath>
#include <set>

#include "rpo/errors.hpp"

namespace rpo {

using nlohmann::json;

std::string_view to_string(Profile p) { return p == Profile::ci ? "ci" : "paper"; }

void RunConfig::validate() const {
  if (method != "bayes" && method != "simplex" && method != "both")
    throw ConfigError("method must be bayes, simplex or both, got '" + method + "'");
  const std::pair<const char*, int> counts[] = {{"restarts", restarts},
                                                {"budget", budget},
                                                {"initial_design", initial_design},
                                                {"mc_samples", mc_samples},
                                                {"workers", workers}};
  for (const auto& [name, v] : counts)
    if (v < 1) throw ConfigError(std::string(name) + " must be >= 1");
  if (budget < initial_design) throw ConfigError("budget must be >= initial_design");
  if (!(q > 0.0 && q <= 1.0)) throw ConfigError("q must lie in (0, 1]");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be finite and >= 0");
  if (setpoint && !std::isfinite(*setpoint)) throw ConfigError("setpoint must be finite");
  if (stations.empty()) throw ConfigError("stations must not be empty");
  for (const auto& [name, b] : control_bounds)
    if (!(b.first < b.second)) throw ConfigError("control_bounds of '" + name + "' must have lo < hi");
}

namespace {

const std::set<std::string, std::less<>> known_keys{
    "seed",       "method",  "profile",        "restarts",    "budget",
    "initial_design", "mc_samples", "q",       "alpha",       "setpoint",
    "stations",   "trajectory_positions", "workers", "control_bounds", "geometry"};

template <class T>
T get(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type: " + j.dump());
  }
}

int get_count(const json& j, std::string_view key) {
  if (!j.is_number_integer()) throw ConfigError("config key '" + std::string(key) + "' must be an integer");
  const auto v = j.get<long long>();
  if (v < 1 || v > 1'000'000'000) throw ConfigError("config key '" + std::string(key) + "' must be >= 1");
  return static_cast<int>(v);
}

double get_real(const json& j, std::string_view key) {
  if (!j.is_number()) throw ConfigError("config key '" + std::string(key) + "' must be a number");
  return j.get<double>();
}

std::uint64_t parse_seed(const json& j, std::string_view origin) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (!s.empty() && r.ec == std::errc() && r.ptr == s.data() + s.size()) return v;
  }
  throw ConfigError("seed from " + std::string(origin) + " must be a non-negative 64-bit integer, got " +
                    j.dump());
}

}  // namespace

RunConfig resolve_config(const std::vector<std::pair<std::string, json>>& layers,
                         std::optional<std::string> env_seed) {
  json merged = json::object();
  std::string seed_source;
  for (const auto& [origin, layer] : layers) {
    if (!layer.is_object()) throw ConfigError(origin + " configuration must be a JSON object");
    for (const auto& [key, value] : layer.items()) {
      if (!known_keys.contains(key)) throw ConfigError("unknown config key '" + key + "' in " + origin);
      merged[key] = value;
      if (key == "seed") seed_source = origin;
    }
  }

  RunConfig c;
  if (merged.contains("profile")) {
    const auto p = get<std::string>(merged["profile"], "profile");
    if (p == "paper") {
      c.profile = Profile::paper;
      c.restarts = 100;
      c.budget = 100;
      c.mc_samples = 10000;
    } else if (p != "ci") {
      throw ConfigError("profile must be ci or paper, got '" + p + "'");
    }
  }
  if (merged.contains("seed")) {
    c.seed = parse_seed(merged["seed"], seed_source);
    c.seed_source = seed_source;
  } else if (env_seed) {
    c.seed = parse_seed(json(*env_seed), "RPO_SEED");
    c.seed_source = "env:RPO_SEED";
  }
  if (merged.contains("method")) c.method = get<std::string>(merged["method"], "method");
  if (merged.contains("restarts")) c.restarts = get_count(merged["restarts"], "restarts");
  if (merged.contains("budget")) c.budget = get_count(merged["budget"], "budget");
  if (merged.contains("initial_design")) c.initial_design = get_count(merged["initial_design"], "initial_design");
  if (merged.contains("mc_samples")) c.mc_samples = get_count(merged["mc_samples"], "mc_samples");
  if (merged.contains("workers")) c.workers = get_count(merged["workers"], "workers");
  if (merged.contains("q")) c.q = get_real(merged["q"], "q");
  if (merged.contains("alpha")) c.alpha = get_real(merged["alpha"], "alpha");
  if (merged.contains("setpoint")) {
    const json& s = merged["setpoint"];
    if (s.is_string() && s.get<std::string>() == "auto")
      c.setpoint.reset();
    else
      c.setpoint = get_real(s, "setpoint");
  }
  if (merged.contains("stations")) {
    const json& s = merged["stations"];
    if (!s.is_array()) throw ConfigError("stations must be an array");
    c.stations.clear();
    for (const auto& st : s) {
      if (!st.is_object() || !st.contains("position") || !st.contains("weight") || st.size() != 2)
        throw ConfigError("each station needs exactly position and weight");
      c.stations.push_back({get_real(st["position"], "stations.position"), get_real(st["weight"], "stations.weight")});
    }
  }
  if (merged.contains("trajectory_positions")) {
    const json& s = merged["trajectory_positions"];
    if (!s.is_array()) throw ConfigError("trajectory_positions must be an array");
    c.trajectory_positions.clear();
    for (const auto& v : s) c.trajectory_positions.push_back(get_real(v, "trajectory_positions"));
  }
  if (merged.contains("control_bounds")) {
    const json& s = merged["control_bounds"];
    if (!s.is_object()) throw ConfigError("control_bounds must be an object");
    for (const auto& [name, b] : s.items()) {
      if (!b.is_array() || b.size() != 2) throw ConfigError("control_bounds." + name + " must be [lo, hi]");
      c.control_bounds[name] = {get_real(b[0], "control_bounds"), get_real(b[1], "control_bounds")};
    }
  }
  if (merged.contains("geometry")) {
    const json& g = merged["geometry"];
    if (!g.is_object()) throw ConfigError("geometry must be an object");
    GaugedGeometry geo;
    for (const auto& [key, v] : g.items()) {
      double* slot = key == "x0_1" ? &geo.x0_1 : key == "y0_1" ? &geo.y0_1
                   : key == "x0_2" ? &geo.x0_2 : key == "y0_2" ? &geo.y0_2 : nullptr;
      if (slot == nullptr) throw ConfigError("unknown geometry key '" + key + "'");
      *slot = get_real(v, "geometry." + key);
    }
    c.geometry = geo;
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["method"] = c.method;
  j["profile"] = to_string(c.profile);
  j["restarts"] = c.restarts;
  j["budget"] = c.budget;
  j["initial_design"] = c.initial_design;
  j["mc_samples"] = c.mc_samples;
  j["q"] = c.q;
  j["alpha"] = c.alpha;
  j["setpoint"] = c.setpoint ? json(*c.setpoint) : json("auto");
  j["stations"] = json::array();
  for (const auto& s : c.stations) j["stations"].push_back({{"position", s.position}, {"weight", s.weight}});
  j["trajectory_positions"] = c.trajectory_positions;
  j["workers"] = c.workers;
  j["control_bounds"] = json::object();
  for (const auto& [name, b] : c.control_bounds) j["control_bounds"][name] = {b.first, b.second};
  if (c.geometry)
    j["geometry"] = {{"x0_1", c.geometry->x0_1}, {"y0_1", c.geometry->y0_1},
                     {"x0_2", c.geometry->x0_2}, {"y0_2", c.geometry->y0_2}};
  return j;
}

}  // namespace rpo
