// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "plant_rom.hpp"
#include "rpo/errors.hpp"
#include "rpo/objective.hpp"
#include "rpo/plant.hpp"

using namespace rpo;

namespace {
// Nominal controls (unit 0.5) with median uncertain values.
Vec nominal(const PlantSpec& plant) {
  Vec p = plant.space.midpoint();
  p[0] = 20.0;
  p[5] = 0.55;
  p[8] = 0.08;
  return p;
}
}  // namespace

TEST_CASE("plant is zero at the start of the line") {
  const PlantSpec plant;
  for (const char* o : {"dx1", "dy1", "dx2", "dy2"}) CHECK(plant_eval(plant, o, 0.0, nominal(plant)) == 0.0);
}

TEST_CASE("nominal end-of-line values") {
  const PlantSpec plant;
  const Vec p = nominal(plant);
  const double f = (0.08 - 0.025) / 0.205;
  CHECK(f == doctest::Approx(0.26829).epsilon(1e-4));
  // Direct substitution with g(1) = 1.
  const double dx1 = 0.4 * 0.5 + 0.3 * 0.5 + 0.2 * 0.5 - 0.5 * f - 0.1 * 0.5 + 0.05;
  const double dy1 = 0.2 * 0.5 - 0.1 * 0.5 + 0.3 * f - 0.15 * 0.5 + 0.1;
  const double dx2 = -0.3 * 0.5 - 0.2 * 0.5 + 0.4 * f * 0.5 + 0.1 * 0.5 - 0.05;
  const double dy2 = -0.25 * 0.5 + 0.2 * 0.5 - 0.3 * f + 0.15 * 0.5 * 0.5 + 0.2;
  CHECK(plant_eval(plant, "dx1", 105.85, p) == doctest::Approx(dx1).epsilon(1e-13));
  CHECK(plant_eval(plant, "dy1", 105.85, p) == doctest::Approx(dy1).epsilon(1e-13));
  CHECK(plant_eval(plant, "dx2", 105.85, p) == doctest::Approx(dx2).epsilon(1e-13));
  CHECK(plant_eval(plant, "dy2", 105.85, p) == doctest::Approx(dy2).epsilon(1e-13));
  CHECK(std::abs(dx1 - 0.31585) < 1e-5);
  CHECK(std::abs(dy1 - 0.15549) < 1e-5);
  CHECK(std::abs(dx2 + 0.19634) < 1e-5);
  CHECK(std::abs(dy2 - 0.13201) < 1e-5);
  CHECK(std::abs(plant_distance(plant, 105.85, p) - 10.7138) < 1e-3);
}

TEST_CASE("dx1 is affine in infrared heat") {
  const PlantSpec plant;
  Vec p = nominal(plant);
  const double pos = 73.0, s = pos / plant.line_length, g = s * s * (3 - 2 * s);
  const double range = 1.10 - 0.80;
  for (double ir : {0.81, 0.9, 1.0}) {
    p[4] = ir;
    const double a = plant_eval(plant, "dx1", pos, p);
    p[4] = ir + 0.05;
    const double b = plant_eval(plant, "dx1", pos, p);
    CHECK((b - a) / 0.05 == doctest::Approx(0.4 * g / range).epsilon(1e-9));
  }
}

TEST_CASE("plant rejects out-of-domain inputs") {
  const PlantSpec plant;
  Vec p = nominal(plant);
  CHECK_THROWS_AS(plant_eval(plant, "dx1", -0.1, p), DomainError);
  CHECK_THROWS_AS(plant_eval(plant, "dx1", 105.9, p), DomainError);
  CHECK_THROWS_AS(plant_eval(plant, "temperature", 1.0, p), UnknownOutputError);
  p[1] = 2000;
  CHECK_THROWS_AS(plant_eval(plant, "dx1", 1.0, p), DomainError);
}

TEST_CASE("dataset rows") {
  const PlantSpec plant;
  RandomStream a(6), b(6);
  const TrainingDataset d = generate_dataset(plant, 300, a);
  CHECK(d.rows() == 1200);
  CHECK(d.input_names.size() == 10);
  const TrainingDataset e = generate_dataset(plant, 300, b);
  CHECK(d.inputs == e.inputs);
  CHECK(d.values == e.values);
  const auto grids = default_grids(plant.space, plant.line_length);
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    const Vec x = d.inputs.row(r).transpose();
    const auto& name = d.output_names[static_cast<std::size_t>(d.output_of_row[static_cast<std::size_t>(r)])];
    CHECK(d.values[r] == plant_eval(plant, name, x[0], x.tail(9)));
    for (Eigen::Index k = 0; k < 10; ++k) {
      const auto& g = grids[static_cast<std::size_t>(k)];
      CHECK(std::find(g.begin(), g.end(), x[k]) != g.end());
    }
  }
  RandomStream c(6);
  DatasetOptions cont;
  cont.grid_aligned = false;
  const TrainingDataset f = generate_dataset(plant, 50, c, cont);
  CHECK(f.rows() == 200);
  CHECK(plant.space.full_box().contains(f.inputs.row(0).tail(9).transpose()));
}

TEST_CASE("hand-built plant ROM reproduces the plant") {
  const PlantSpec plant;
  const RomModel rom = testing::plant_rom(plant);
  RandomStream s(1);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Vec q(9);
    for (auto& v : q) v = s.uniform();
    const Vec p = plant.space.full_box().from_unit(q);
    const double pos = plant.line_length * s.uniform();
    for (const char* o : {"dx1", "dy1", "dx2", "dy2"})
      worst = std::max(worst, std::abs(evaluate(rom, o, pos, p) - plant_eval(plant, o, pos, p)));
  }
  // Piecewise-linear g on 64 nodes: |g''| <= 6 / L^2 per m^2 in s, times coefficients <= 1.
  CHECK(worst < 2e-4);
  CHECK(gauged_distance(rom, nominal(plant), 105.85) == doctest::Approx(plant_distance(plant, 105.85, nominal(plant))).epsilon(1e-14));
}
