// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/objective.hpp"

#include <cmath>
#include <string>

#include "rpo/errors.hpp"

namespace rpo {

std::vector<Station> default_stations() { return {{105.85, 1.0}, {100.85, 0.5}, {95.85, 0.25}}; }

void CostSpec::validate(double line_length) const {
  if (!std::isfinite(setpoint)) throw DomainError("setpoint must be finite");
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and >= 0");
  if (stations.empty()) throw DomainError("cost needs at least one station");
  for (const auto& s : stations) {
    if (!(s.weight > 0.0) || !std::isfinite(s.weight))
      throw DomainError("station weight must be positive and finite");
    if (!(s.position >= 0.0 && s.position <= line_length))
      throw DomainError("station position " + std::to_string(s.position) + " outside the line");
  }
}

double gauged_distance(const RomModel& model, const GaugedGeometry& geometry, const Vec& p,
                       double position) {
  const double dx = (geometry.x0_2 + evaluate(model, output::dx2, position, p)) -
                    (geometry.x0_1 + evaluate(model, output::dx1, position, p));
  const double dy = (geometry.y0_2 + evaluate(model, output::dy2, position, p)) -
                    (geometry.y0_1 + evaluate(model, output::dy1, position, p));
  return std::hypot(dx, dy);
}

double cost(const RomModel& model, const GaugedGeometry& geometry, const CostSpec& spec,
            const Vec& c, const Vec& u) {
  const ParameterSpace& space = model.space();
  check_controls(space, c);
  check_uncertain(space, u);
  const Vec p = assemble_full(space, c, u);
  double j = 0.0;
  for (const auto& s : spec.stations) {
    const double e = gauged_distance(model, geometry, p, s.position) - spec.setpoint;
    j += s.weight * e * e;
  }
  if (spec.alpha != 0.0) j += spec.alpha * scale_controls_to_unit(space, c).norm();
  return j;
}

double stochastic_cost(const RomModel& model, const GaugedGeometry& geometry,
                       const CostSpec& spec, const Vec& c, const UncertaintyModel& uncertainty,
                       RandomStream& stream) {
  return cost(model, geometry, spec, c, sample_uncertain(uncertainty, stream));
}

double auto_setpoint(const RomModel& model, const GaugedGeometry& geometry,
                     const UncertaintyModel& uncertainty) {
  const ParameterSpace& space = model.space();
  const Vec c = space.controllable_box().from_unit(Vec::Constant(
      static_cast<Eigen::Index>(space.controllable_indices().size()), 0.5));
  const Vec p = assemble_full(space, c, nominal_medians(uncertainty));
  return gauged_distance(model, geometry, p, model.line_length());
}

}  // namespace rpo
