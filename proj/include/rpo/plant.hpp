// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rpo/geometry.hpp"
#include "rpo/parameter_space.hpp"
#include "rpo/random.hpp"
#include "rpo/rom_fit.hpp"

namespace rpo {

/// Closed-form ground-truth plant. The coefficient table is tied to `version`.
struct PlantSpec {
  std::string version = "plant-v1";
  double line_length = 105.85;
  GaugedGeometry geometry;
  ParameterSpace space = ParameterSpace::extrusion_line();
};

/// Smoothstep g(s) = 3 s^2 - 2 s^3 along the line, s = position / line_length.
double plant_profile(const PlantSpec& plant, double position);

/// Displacement (mm) of output dx1, dy1, dx2 or dy2. With g = plant_profile and
/// unit-scaled parameters:
///
///     dx1 = g (0.4 IR + 0.3 G1 + 0.2 G2 - 0.5 F - 0.1 MW + 0.05)
///     dy1 = g (0.2 Pb - 0.1 Ps + 0.3 F - 0.15 v + 0.1)
///     dx2 = g (-0.3 IR - 0.2 G1 + 0.4 F MW + 0.1 RPM - 0.05)
///     dy2 = g (-0.25 G2 + 0.2 v - 0.3 F + 0.15 Pb RPM + 0.2)
///
/// Errors: DomainError (position or parameters out of bounds),
/// UnknownOutputError.
double plant_eval(const PlantSpec& plant, std::string_view output, double position, const Vec& p);

/// Distance between the gauged points computed directly from the plant.
double plant_distance(const PlantSpec& plant, double position, const Vec& p);

struct DatasetOptions {
  /// Snap every coordinate to the nearest node of `grids` (default ROM grids
  /// when empty). Off makes samples continuous.
  bool grid_aligned = true;
  std::vector<std::vector<double>> grids;
};

/// `n_points` scrambled-Halton samples over (position, parameters), one row per
/// sample and output (dx1, dy1, dx2, dy2 in that order).
TrainingDataset generate_dataset(const PlantSpec& plant, std::size_t n_points,
                                 RandomStream& stream, const DatasetOptions& options = {});

}  // namespace rpo
