// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include "rpo/plant.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "rpo/errors.hpp"
#include "rpo/low_discrepancy.hpp"
#include "rpo/rom.hpp"

namespace rpo {

namespace {

// Unit-scaled parameter by canonical index.
enum : Eigen::Index { kV, kPb, kPs, kRpm, kIr, kMw, kG1, kG2, kF };

constexpr std::array<std::string_view, 4> kOutputs{output::dx1, output::dy1, output::dx2,
                                                   output::dy2};

double snap(const std::vector<double>& grid, double x) {
  auto it = std::lower_bound(grid.begin(), grid.end(), x);
  if (it == grid.end()) return grid.back();
  if (it == grid.begin()) return *it;
  const double hi = *it, lo = *(it - 1);
  return (x - lo <= hi - x) ? lo : hi;
}

}  // namespace

double plant_profile(const PlantSpec& plant, double position) {
  if (!(position >= 0.0 && position <= plant.line_length))
    throw DomainError("position " + std::to_string(position) + " outside [0, " +
                      std::to_string(plant.line_length) + "]");
  const double s = position / plant.line_length;
  return s * s * (3.0 - 2.0 * s);
}

double plant_eval(const PlantSpec& plant, std::string_view output, double position, const Vec& p) {
  const double g = plant_profile(plant, position);
  const Vec q = scale_to_unit(plant.space, p);
  if (output == output::dx1)
    return g * (0.4 * q[kIr] + 0.3 * q[kG1] + 0.2 * q[kG2] - 0.5 * q[kF] - 0.1 * q[kMw] + 0.05);
  if (output == output::dy1)
    return g * (0.2 * q[kPb] - 0.1 * q[kPs] + 0.3 * q[kF] - 0.15 * q[kV] + 0.1);
  if (output == output::dx2)
    return g * (-0.3 * q[kIr] - 0.2 * q[kG1] + 0.4 * q[kF] * q[kMw] + 0.1 * q[kRpm] - 0.05);
  if (output == output::dy2)
    return g * (-0.25 * q[kG2] + 0.2 * q[kV] - 0.3 * q[kF] + 0.15 * q[kPb] * q[kRpm] + 0.2);
  throw UnknownOutputError("plant has no output '" + std::string(output) + "'");
}

double plant_distance(const PlantSpec& plant, double position, const Vec& p) {
  const auto& g = plant.geometry;
  const double dx = (g.x0_2 + plant_eval(plant, output::dx2, position, p)) -
                    (g.x0_1 + plant_eval(plant, output::dx1, position, p));
  const double dy = (g.y0_2 + plant_eval(plant, output::dy2, position, p)) -
                    (g.y0_1 + plant_eval(plant, output::dy1, position, p));
  return std::hypot(dx, dy);
}

TrainingDataset generate_dataset(const PlantSpec& plant, std::size_t n_points,
                                 RandomStream& stream, const DatasetOptions& options) {
  if (n_points < 1) throw DomainError("dataset needs at least one point");
  const auto dims = static_cast<Eigen::Index>(plant.space.size() + 1);
  const auto grids = options.grids.empty() ? default_grids(plant.space, plant.line_length)
                                           : options.grids;
  if (grids.size() != static_cast<std::size_t>(dims))
    throw DomainError("dataset grids must cover position and every parameter");

  const auto n = static_cast<Eigen::Index>(n_points);
  const Mat unit = scrambled_halton(n, dims, stream);
  Box box{Vec(dims), Vec(dims)};
  box.lower[0] = 0.0;
  box.upper[0] = plant.line_length;
  const Box params = plant.space.full_box();
  box.lower.tail(dims - 1) = params.lower;
  box.upper.tail(dims - 1) = params.upper;

  TrainingDataset data;
  data.input_names.emplace_back(kPositionInput);
  for (const auto& s : plant.space.specs()) data.input_names.push_back(s.name);
  for (auto o : kOutputs) data.output_names.emplace_back(o);
  data.provenance = plant.version + (options.grid_aligned ? " grid-aligned" : " continuous");
  data.inputs.resize(4 * n, dims);
  data.values.resize(4 * n);
  data.output_of_row.resize(static_cast<std::size_t>(4 * n));

  for (Eigen::Index i = 0; i < n; ++i) {
    Vec x = box.from_unit(unit.row(i).transpose()).cwiseMax(box.lower).cwiseMin(box.upper);
    if (options.grid_aligned)
      for (Eigen::Index k = 0; k < dims; ++k) x[k] = snap(grids[static_cast<std::size_t>(k)], x[k]);
    const Vec p = x.tail(dims - 1);
    for (int o = 0; o < 4; ++o) {
      const Eigen::Index r = 4 * i + o;
      data.inputs.row(r) = x.transpose();
      data.output_of_row[static_cast<std::size_t>(r)] = o;
      data.values[r] = plant_eval(plant, kOutputs[static_cast<std::size_t>(o)], x[0], p);
    }
  }
  return data;
}

}  // namespace rpo
