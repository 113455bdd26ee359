// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "rpo/errors.hpp"
#include "rpo/plant.hpp"
#include "rpo/rom_fit.hpp"

using namespace rpo;

namespace {

struct Problem {
  Mat x;
  Vec y;
  std::vector<std::string> names;
  std::vector<std::vector<double>> grids;
};

// Exact samples of a random rank-1 model on the extrusion-line grids. With
// `signed_values` one factor changes sign inside its range.
Problem rank_one(RandomStream& s, Eigen::Index n, bool signed_values) {
  const auto space = ParameterSpace::extrusion_line();
  Problem p;
  p.grids = default_grids(space, 105.85, 20, 9);
  p.names.emplace_back("position");
  for (const auto& spec : space.specs()) p.names.push_back(spec.name);
  Term t{1.7, {}};
  for (std::size_t k = 0; k < p.grids.size(); ++k) {
    Factor f{p.names[k], p.grids[k], {}};
    for (std::size_t j = 0; j < f.grid.size(); ++j)
      f.values.push_back(signed_values && k == 4 ? 2.0 * s.uniform() - 1.0 : 0.5 + s.uniform());
    t.factors.push_back(std::move(f));
  }
  const Expansion truth{t};
  p.x.resize(n, static_cast<Eigen::Index>(p.grids.size()));
  p.y.resize(n);
  std::vector<double> row(p.grids.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& g = p.grids[k];
      row[k] = g.front() + (g.back() - g.front()) * s.uniform();
      p.x(r, static_cast<Eigen::Index>(k)) = row[k];
    }
    p.y[r] = evaluate_terms(truth, row);
  }
  return p;
}

bool non_increasing(const std::vector<double>& h) {
  for (std::size_t i = 1; i < h.size(); ++i)
    if (h[i] > h[i - 1]) return false;
  return true;
}

}  // namespace

TEST_CASE("rank-1 exact data is recovered within 100 sweeps") {
  for (bool signed_values : {false, true}) {
    CAPTURE(signed_values);
    RandomStream s(signed_values ? 21 : 20);
    const Problem p = rank_one(s, 3000, signed_values);
    AlsOptions o;
    o.terms = 1;
    o.max_sweeps = 100;
    const AlsResult r = fit_als(p.x, p.y, p.names, p.grids, o);
    CHECK(r.sweeps <= 100);
    CHECK(r.rmse < 1e-6);
    CHECK(non_increasing(r.loss_history));
    CHECK(r.terms.size() == 1);
  }
}

TEST_CASE("loss history is non-increasing on arbitrary data") {
  RandomStream s(5);
  Problem p = rank_one(s, 500, true);
  for (auto& v : p.y) v = s.uniform() - 0.5;  // pure noise
  for (std::size_t m : {1, 3, 6}) {
    AlsOptions o;
    o.terms = m;
    o.max_sweeps = 15;
    o.refine_iterations = 3;
    const AlsResult r = fit_als(p.x, p.y, p.names, p.grids, o);
    CHECK(non_increasing(r.loss_history));
    CHECK(r.loss_history.size() >= 2);
    CHECK(std::sqrt(r.loss_history.back()) == doctest::Approx(r.rmse));
  }
}

TEST_CASE("plant-v1 outputs are fitted to round-off on grid-aligned data") {
  const PlantSpec plant;
  RandomStream s(3);
  const TrainingDataset data = generate_dataset(plant, 6000, s);
  const auto grids = default_grids(plant.space, plant.line_length);
  AlsOptions o;
  o.terms = 8;
  const RomFit fit = fit_rom(data, plant.space, plant.line_length, plant.geometry, grids, o,
                             {"dx1", "dy1"});
  for (const auto& [name, rmse] : fit.rmse) {
    CAPTURE(name);
    CHECK(rmse < 1e-6);
  }
  RandomStream probe(4);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    Vec q(9);
    for (auto& v : q) v = probe.uniform();
    const Vec p = plant.space.full_box().from_unit(q);
    const double pos = plant.line_length * probe.uniform();
    for (const char* name : {"dx1", "dy1"})
      worst = std::max(worst, std::abs(evaluate(fit.model, name, pos, p) - plant_eval(plant, name, pos, p)));
  }
  CHECK(worst < 1e-3);
}

TEST_CASE("refinement keeps the fit monotone and never worsens it") {
  const PlantSpec plant;
  RandomStream s(9);
  const TrainingDataset data = generate_dataset(plant, 1500, s);
  const auto grids = default_grids(plant.space, plant.line_length, 16, 5);
  AlsOptions o;
  o.terms = 4;
  o.max_sweeps = 10;
  const AlsResult base = fit_als(data, "dx2", grids, o);
  o.refine_iterations = 5;
  const AlsResult refined = fit_als(data, "dx2", grids, o);
  CHECK(non_increasing(refined.loss_history));
  CHECK(refined.rmse <= base.rmse);
}

TEST_CASE("fitting errors") {
  RandomStream s(1);
  const Problem p = rank_one(s, 50, false);
  AlsOptions o;
  CHECK_THROWS_AS(fit_als(Mat(0, 10), Vec(0), p.names, p.grids, o), EmptyDatasetError);
  o.terms = 0;
  CHECK_THROWS_AS(fit_als(p.x, p.y, p.names, p.grids, o), DomainError);
  o.terms = 2;
  auto grids = p.grids;
  grids[3][2] = grids[3][1];
  CHECK_THROWS_AS(fit_als(p.x, p.y, p.names, grids, o), DomainError);
  Mat x = p.x;
  x(0, 0) = -1.0;
  CHECK_THROWS_AS(fit_als(x, p.y, p.names, p.grids, o), ExtrapolationError);

  // All-zero inputs in the only populated column make every block singular.
  std::vector<std::string> names{"a"};
  CHECK_THROWS_AS(fit_als(Mat::Zero(4, 1), Vec::Ones(4), names, {{0.0, 1.0}}, o), SingularSolveError);

  // Squared residuals of targets near 1e300 overflow.
  CHECK_THROWS_AS(fit_als(p.x, Vec::Constant(p.y.size(), 1e300), p.names, p.grids, o), NumericalError);

  TrainingDataset data;
  data.input_names = p.names;
  data.output_names = {"dx1"};
  CHECK_THROWS_AS(data.slice("dx1"), EmptyDatasetError);
  CHECK_THROWS_AS(data.slice("dy1"), EmptyDatasetError);
}

TEST_CASE("unconstrained grid nodes fall back to the ridge solve") {
  // Data covers only the lower half of the grid: upper nodes have no rows.
  std::vector<std::string> names{"a", "b"};
  std::vector<std::vector<double>> grids{{0.0, 0.25, 0.5, 0.75, 1.0}, {0.0, 1.0}};
  RandomStream s(2);
  Mat x(40, 2);
  Vec y(40);
  for (Eigen::Index r = 0; r < 40; ++r) {
    x(r, 0) = 0.4 * s.uniform();
    x(r, 1) = s.uniform();
    y[r] = (1.0 + x(r, 0)) * (2.0 - x(r, 1));
  }
  AlsOptions o;
  o.terms = 1;
  const AlsResult r = fit_als(x, y, names, grids, o);
  CHECK(r.rmse < 1e-6);
  for (const auto& f : r.terms[0].factors)
    for (double v : f.values) CHECK(std::isfinite(v));
}
