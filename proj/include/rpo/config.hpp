// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rpo/geometry.hpp"
#include "rpo/objective.hpp"

namespace rpo {

enum class Profile { ci, paper };
std::string_view to_string(Profile p);

/// Resolved settings of one pipeline run.
struct RunConfig {
  std::uint64_t seed = 0;
  /// Where the seed came from: "default", "config", "flag" or "env:RPO_SEED".
  std::string seed_source = "default";
  std::string method = "both";  // bayes, simplex or both
  Profile profile = Profile::ci;
  int restarts = 20;
  int budget = 60;
  int initial_design = 8;
  int mc_samples = 2000;
  double q = 0.99;
  double alpha = 1e-4;
  /// Empty selects the model's end-of-line distance at nominal inputs.
  std::optional<double> setpoint;
  std::vector<Station> stations = default_stations();
  /// Empty selects default_trajectory_positions().
  std::vector<double> trajectory_positions;
  int workers = 1;
  /// Narrowed search ranges by control name.
  std::map<std::string, std::pair<double, double>> control_bounds;
  /// Gauged geometry; the ROM's own when empty.
  std::optional<GaugedGeometry> geometry;

  /// ConfigError unless counts are >= 1, 0 < q <= 1, alpha >= 0 and the
  /// method is known.
  void validate() const;
};

/// Builds a configuration from layered JSON objects. Later layers override
/// earlier ones key by key. The profile fixes the defaults of restarts,
/// budget and mc_samples; explicit keys still win. Without a seed in any
/// layer, `env_seed` (the text of RPO_SEED) is used when present.
///
/// Keys: seed, method, profile, restarts, budget, initial_design,
/// mc_samples, q, alpha, setpoint (number or "auto"), stations
/// ([{"position", "weight"}]), trajectory_positions, workers,
/// control_bounds ({"name": [lo, hi]}), geometry ({"x0_1", ...}).
/// Unknown keys and ill-typed values raise ConfigError.
RunConfig resolve_config(const std::vector<std::pair<std::string, nlohmann::json>>& layers,
                         std::optional<std::string> env_seed = std::nullopt);

/// Every field except seed_source, with the setpoint written as "auto" when
/// unset. resolve_config({{"config", to_json(c)}}) reproduces c.
nlohmann::json to_json(const RunConfig& config);

}  // namespace rpo
