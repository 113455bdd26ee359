// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rpo/distributions.hpp"
#include "rpo/geometry.hpp"
#include "rpo/random.hpp"
#include "rpo/rom.hpp"

namespace rpo {

struct Station {
  double position = 0.0;  // m
  double weight = 1.0;

  friend bool operator==(const Station&, const Station&) = default;
};

std::vector<Station> default_stations();

/// J = sum_k weight_k (d_k - setpoint)^2 + alpha * ||unit-scaled c||_2.
struct CostSpec {
  double setpoint = 0.0;  // mm
  std::vector<Station> stations = default_stations();
  double alpha = 1e-4;

  /// Throws DomainError on non-positive weights, stations outside
  /// [0, line_length], negative alpha or non-finite values.
  void validate(double line_length) const;
};

/// Distance (mm) between the deformed gauged points at `position`, with the
/// displacements taken from ROM outputs dx1, dy1, dx2, dy2.
double gauged_distance(const RomModel& model, const GaugedGeometry& geometry, const Vec& p,
                       double position);
inline double gauged_distance(const RomModel& model, const Vec& p, double position) {
  return gauged_distance(model, model.geometry(), p, position);
}

/// Deterministic cost at controls `c` and uncertain values `u`.
/// DomainError if either is out of bounds.
double cost(const RomModel& model, const GaugedGeometry& geometry, const CostSpec& spec,
            const Vec& c, const Vec& u);

/// Draws u from `uncertainty` (consuming the stream) and returns cost(c, u).
double stochastic_cost(const RomModel& model, const GaugedGeometry& geometry,
                       const CostSpec& spec, const Vec& c, const UncertaintyModel& uncertainty,
                       RandomStream& stream);

/// End-of-line ROM distance at midpoint controls and nominal uncertain medians.
double auto_setpoint(const RomModel& model, const GaugedGeometry& geometry,
                     const UncertaintyModel& uncertainty);

}  // namespace rpo
