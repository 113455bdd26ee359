// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace rpo {

/// Initial coordinates (mm) of the two gauged profile points.
struct GaugedGeometry {
  double x0_1 = 0.0;
  double y0_1 = 0.0;
  double x0_2 = 10.0;
  double y0_2 = 5.0;

  /// Throws DomainError if any coordinate is non-finite or the points coincide.
  void validate() const;

  friend bool operator==(const GaugedGeometry&, const GaugedGeometry&) = default;
};

}  // namespace rpo
