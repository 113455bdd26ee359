// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

#include "plant_rom.hpp"
#include "rpo/errors.hpp"
#include "rpo/parallel.hpp"
#include "rpo/pipeline.hpp"

using namespace rpo;

namespace {

struct Fixture {
  PlantSpec plant;
  RomModel rom = testing::plant_rom(plant);
  Problem problem{&rom, plant.geometry, {}, extrusion_line_uncertainty(rom.space())};
  Fixture() { problem.spec.setpoint = auto_setpoint(rom, plant.geometry, problem.uncertainty); }
  Vec mid() const { return problem.control_box().from_unit(Vec::Constant(6, 0.5)); }
};

// Outputs depend on position only, so every uncertain draw gives the same distance.
struct FlatFixture {
  PlantSpec plant;
  RomModel rom = testing::position_only_model(plant.space, plant.line_length, plant.geometry,
                                              {0.0, plant.line_length}, {{"dx2", {0.0, 2.0}}});
  Problem problem{&rom, plant.geometry, CostSpec{10.0}, extrusion_line_uncertainty(rom.space())};
};

RestartResult fake(int id, Vec c, Method m = Method::bayes, double observed = 0.0) {
  RestartResult r;
  r.run_id = id;
  r.method = m;
  r.ok = true;
  r.controls = std::move(c);
  r.observed_cost = observed;
  return r;
}

}  // namespace

TEST_CASE("percentile is the nearest-rank order statistic") {
  std::vector<double> v(10000);
  std::iota(v.begin(), v.end(), 1.0);
  std::reverse(v.begin(), v.end());
  CHECK(percentile(v, 0.99) == 9900.0);
  CHECK(percentile(v, 1.0) == 10000.0);
  CHECK(percentile(v, 0.01) == 100.0);
  CHECK(percentile(v, 1e-9) == 1.0);
  const std::vector<double> odd{5, 1, 4, 2, 3};
  CHECK(percentile(odd, 0.5) == 3.0);
  CHECK(percentile(odd, 0.2) == 1.0);
  CHECK(percentile(odd, 0.21) == 2.0);
  CHECK_THROWS_AS(percentile(std::vector<double>{}, 0.5), EmptyInputError);
  CHECK_THROWS_AS(percentile(odd, 0.0), DomainError);
  CHECK_THROWS_AS(percentile(odd, 1.5), DomainError);
}

TEST_CASE("percentile matches an integer-arithmetic rank oracle and is monotone in q") {
  RandomStream s(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto n = 1 + s.below(300);
    std::vector<double> v(n);
    for (auto& x : v) x = s.uniform();
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    // q = a / 1000: rank = ceil(a n / 1000) in exact integer arithmetic.
    double last = -INFINITY;
    for (std::uint64_t a = 1; a <= 1000; a += 1 + s.below(40)) {
      const std::uint64_t rank = (a * n + 999) / 1000;
      const double got = percentile(v, static_cast<double>(a) / 1000.0);
      CHECK(got == sorted[rank - 1]);
      CHECK(got >= last);
      last = got;
    }
  }
}

TEST_CASE("summaries are ordered") {
  RandomStream s(3);
  std::vector<double> v(777);
  for (auto& x : v) x = std::log(s.uniform());
  const Quantiles q = summarize(v);
  CHECK(q.min <= q.p1);
  CHECK(q.p1 <= q.p25);
  CHECK(q.p25 <= q.p50);
  CHECK(q.p50 <= q.p75);
  CHECK(q.p75 <= q.p99);
  CHECK(q.p99 <= q.max);
  CHECK(q.p99 == percentile(v, 0.99));
  CHECK(q.min == *std::min_element(v.begin(), v.end()));
}

TEST_CASE("parallel_for fills every slot and reports the lowest failing index") {
  std::vector<int> out(1000, -1);
  parallel_for(out.size(), 8, [&](std::size_t i) { out[i] = static_cast<int>(i * i % 97); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i % 97));
  for (int w : {1, 3, 8}) {
    try {
      parallel_for(100, w, [](std::size_t i) {
        if (i % 10 == 7) throw DomainError("fail " + std::to_string(i));
      });
      FAIL("no exception");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()) == "fail 7");
    }
  }
}

TEST_CASE("mc samples use one derived stream per sample") {
  const Fixture f;
  const RandomStream master(5);
  const Vec c = f.mid();
  const McSamples s = mc_samples(f.problem, c, 50, master);
  for (std::size_t i = 0; i < 50; ++i) {
    RandomStream si = master.derive("mc", i);
    const Vec u = sample_uncertain(f.problem.uncertainty, si);
    CHECK(s.cost[i] == cost(f.rom, f.plant.geometry, f.problem.spec, c, u));
    CHECK(s.distance[i] ==
          gauged_distance(f.rom, f.plant.geometry, assemble_full(f.rom.space(), c, u), f.rom.line_length()));
  }
}

TEST_CASE("mc_evaluate is independent of the worker count") {
  const Fixture f;
  const RandomStream master(6);
  const CandidateEvaluation a = mc_evaluate(f.problem, f.mid(), 3000, master, 1);
  const CandidateEvaluation b = mc_evaluate(f.problem, f.mid(), 3000, master, 8);
  CHECK(a.cost == b.cost);
  CHECK(a.distance == b.distance);
  CHECK(a.mean_cost == b.mean_cost);
  CHECK(a.risk == b.risk);
  CHECK(a.samples == 3000);
  CHECK(a.risk == a.cost.p99);
  CHECK(a.cost.p99 >= a.cost.p50);
  CHECK(a.cost.p50 >= a.cost.p25);
  // Every cost carries at least the control penalty.
  CHECK(a.cost.min >= f.problem.spec.alpha * Vec::Constant(6, 0.5).norm());
  CHECK_THROWS_AS(mc_evaluate(f.problem, f.mid(), 0, master), DomainError);
  Vec bad = f.mid();
  bad[0] = 1e6;
  CHECK_THROWS_AS(mc_evaluate(f.problem, bad, 10, master), DomainError);
}

TEST_CASE("uncertainty that does not reach the outputs collapses every quantile") {
  const FlatFixture f;
  const Vec c = f.problem.control_box().lower;  // zero control penalty
  const CandidateEvaluation e = mc_evaluate(f.problem, c, 500, RandomStream(1));
  // d(x) = |(10 + 2 x / L, 5)|, so the end-of-line distance is 13.
  const auto d = [](double x) { return std::hypot(10.0 + 2.0 * x / 105.85, 5.0); };
  CHECK(e.distance.min == doctest::Approx(13.0).epsilon(1e-15));
  CHECK(e.distance.min == e.distance.max);
  CHECK(e.cost.min == e.cost.max);
  const double j = 9.0 + 0.5 * std::pow(d(100.85) - 10.0, 2) + 0.25 * std::pow(d(95.85) - 10.0, 2);
  CHECK(e.risk == doctest::Approx(j).epsilon(1e-12));
}

TEST_CASE("select_best picks the lowest risk with ties to the lowest run id") {
  const FlatFixture f;
  const Box box = f.problem.control_box();
  // Costs differ only through the control penalty alpha * ||unit c||.
  const Vec near = box.from_unit(Vec::Constant(6, 0.1));
  const Vec far = box.from_unit(Vec::Constant(6, 0.9));
  const RandomStream s(2);
  std::vector<RestartResult> cands{fake(0, far), fake(1, near)};
  const Selection sel = select_best(cands, f.problem, 100, s);
  CHECK(sel.evaluations.size() == 2);
  CHECK(sel.chosen().run_id == 1);
  CHECK(sel.evaluations[0].risk > sel.evaluations[1].risk);

  std::vector<RestartResult> tied{fake(7, near), fake(3, near), fake(5, far)};
  CHECK(select_best(tied, f.problem, 100, s).chosen().run_id == 3);
  std::reverse(tied.begin(), tied.end());
  CHECK(select_best(tied, f.problem, 100, s).chosen().run_id == 3);

  std::vector<RestartResult> single{fake(9, far)};
  CHECK(select_best(single, f.problem, 10, s).chosen().run_id == 9);

  RestartResult failed;
  failed.run_id = 0;
  std::vector<RestartResult> none{failed};
  CHECK_THROWS_AS(select_best(none, f.problem, 10, s), EmptyInputError);
  std::vector<RestartResult> mixed{failed, fake(4, near)};
  const Selection m = select_best(mixed, f.problem, 10, s);
  CHECK(m.evaluations.size() == 1);
  CHECK(m.chosen().run_id == 4);
}

TEST_CASE("select_best compares candidates on common random numbers") {
  const Fixture f;
  const RandomStream s(8);
  const Vec c = f.mid();
  std::vector<RestartResult> cands{fake(0, c), fake(1, c)};
  const Selection sel = select_best(cands, f.problem, 500, s);
  CHECK(sel.evaluations[0].cost == sel.evaluations[1].cost);
  CHECK(sel.chosen().run_id == 0);
}

TEST_CASE("simplex representative has the lowest observed cost") {
  const Vec c = Vec::Zero(6);
  std::vector<RestartResult> v{fake(0, c, Method::simplex, 3.0), fake(1, c, Method::simplex, 1.0),
                               fake(2, c, Method::simplex, 1.0), fake(3, c, Method::bayes, 0.5)};
  CHECK(simplex_representative(v).run_id == 1);
  v[1].ok = false;
  CHECK(simplex_representative(v).run_id == 2);
  std::vector<RestartResult> b{fake(0, c)};
  CHECK_THROWS_AS(simplex_representative(b), EmptyInputError);
}

TEST_CASE("restarts are reproducible, independent of workers and stay in the box") {
  const Fixture f;
  RestartOptions o;
  o.bo.budget = 12;
  o.bo.candidates = 256;
  const RandomStream master(21);
  for (Method m : {Method::bayes, Method::simplex}) {
    const auto a = run_restarts(f.problem, m, 3, master, o);
    o.workers = 3;
    const auto b = run_restarts(f.problem, m, 3, master, o);
    o.workers = 1;
    REQUIRE(a.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(a[k].ok);
      CHECK(a[k].run_id == static_cast<int>(k));
      CHECK(a[k].method == m);
      CHECK(a[k].controls == b[k].controls);
      CHECK(a[k].observed_cost == b[k].observed_cost);
      CHECK(f.problem.control_box().contains(a[k].controls));
      if (m == Method::bayes) CHECK(a[k].evaluations == 12);
    }
    CHECK(a[0].controls != a[1].controls);
  }
  const auto one = run_restarts(f.problem, Method::simplex, 1, master, o);
  CHECK(one.size() == 1);
  CHECK(one[0].controls == run_restarts(f.problem, Method::simplex, 2, master, o)[0].controls);
}

TEST_CASE("restart failures") {
  const Fixture f;
  RestartOptions o;
  o.bo.budget = 4;  // below the initial design: every run fails
  CHECK_THROWS_AS(run_restarts(f.problem, Method::bayes, 2, RandomStream(1), o), DomainError);
  CHECK_THROWS_AS(run_restarts(f.problem, Method::bayes, 0, RandomStream(1)), DomainError);
  Problem bad = f.problem;
  bad.spec.stations = {{200.0, 1.0}};
  CHECK_THROWS_AS(run_restarts(bad, Method::simplex, 1, RandomStream(1)), DomainError);
  bad = f.problem;
  std::swap(bad.uncertainty[0], bad.uncertainty[1]);
  CHECK_THROWS_AS(run_restarts(bad, Method::simplex, 1, RandomStream(1)), DomainError);
}

TEST_CASE("trajectory bands nest, match the end-of-line samples and ignore workers") {
  const Fixture f;
  const auto pos = default_trajectory_positions();
  CHECK(pos.size() == 109);
  CHECK(std::is_sorted(pos.begin(), pos.end()));
  CHECK(pos.back() == 105.85);
  const RandomStream s(4);
  const Vec c = f.mid();
  const PercentileBands a = trajectory_bands(f.problem, c, 400, pos, s, 1);
  const PercentileBands b = trajectory_bands(f.problem, c, 400, pos, s, 8);
  REQUIRE(a.bands.size() == pos.size());
  for (std::size_t j = 0; j < pos.size(); ++j) {
    const Quantiles& q = a.bands[j];
    CHECK(q == b.bands[j]);
    CHECK(q.min <= q.p1);
    CHECK(q.p1 <= q.p25);
    CHECK(q.p25 <= q.p50);
    CHECK(q.p50 <= q.p75);
    CHECK(q.p75 <= q.p99);
    CHECK(q.p99 <= q.max);
  }
  // Position 0 has no deformation: every band sits on the initial distance.
  CHECK(a.bands.front().min == doctest::Approx(std::hypot(10.0, 5.0)).epsilon(1e-15));
  CHECK(a.bands.front().max == a.bands.front().min);
  CHECK(a.bands.back() == mc_evaluate(f.problem, c, 400, s).distance);
}

TEST_CASE("trajectory bands collapse onto the median when the uncertainty does not matter") {
  const FlatFixture f;
  const std::vector<double> pos{0.0, 50.0, 105.85};
  const PercentileBands b = trajectory_bands(f.problem, f.problem.control_box().upper, 50, pos, RandomStream(2));
  for (std::size_t j = 0; j < pos.size(); ++j) {
    CHECK(b.bands[j].min == b.bands[j].p50);
    CHECK(b.bands[j].max == b.bands[j].p50);
    CHECK(b.bands[j].p50 == doctest::Approx(std::hypot(10.0 + 2.0 * pos[j] / 105.85, 5.0)).epsilon(1e-14));
  }
  const std::vector<double> descending{50.0, 10.0};
  CHECK_THROWS_AS(trajectory_bands(f.problem, f.problem.control_box().upper, 5, descending, RandomStream(2)),
                  DomainError);
  const std::vector<double> outside{0.0, 200.0};
  CHECK_THROWS_AS(trajectory_bands(f.problem, f.problem.control_box().upper, 5, outside, RandomStream(2)),
                  DomainError);
}

TEST_CASE("plant-v1 selected candidate reaches the set point on average") {
  const Fixture f;
  RestartOptions o;
  o.bo.budget = 30;
  o.bo.candidates = 512;
  const RandomStream master(1);
  const auto runs = run_restarts(f.problem, Method::bayes, 3, master.derive("bayes", 0), o);
  const Selection sel = select_best(runs, f.problem, 1000, master.derive("select", 0));
  const auto bands = trajectory_bands(f.problem, sel.chosen().controls, 1000, default_trajectory_positions(),
                                      master.derive("trajectory", 0));
  CHECK(std::abs(bands.bands.back().p50 - f.problem.spec.setpoint) < 0.02 * f.problem.spec.setpoint);
}

TEST_CASE("reals are written in shortest round-trip form") {
  RandomStream s(77);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(s.uniform() - 0.5, static_cast<int>(s.below(200)) - 100);
    const std::string t = format_real(v);
    double back = 0.0;
    std::from_chars(t.data(), t.data() + t.size(), back);
    CHECK(back == v);
  }
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(105.85) == "105.85");
}

TEST_CASE("CSV layouts") {
  CandidateEvaluation e;
  e.run_id = 2;
  e.cost = {1, 2, 3, 4, 5, 6, 7};
  e.mean_cost = 0.5;
  std::ostringstream box;
  write_boxplot_csv(box, {e});
  CHECK(box.str() == "run_id,min,p1,p25,p50,p75,p99,max,mean\n2,1,2,3,4,5,6,7,0.5\n");

  std::ostringstream bands;
  write_bands_csv(bands, {{0.0, 95.85}, {{1, 1, 1, 1, 1, 1, 1}, {1, 2, 3, 4, 5, 6, 7}}});
  CHECK(bands.str() == "position_m,min,p1,p25,p50,p75,p99,max\n0,1,1,1,1,1,1,1\n95.85,1,2,3,4,5,6,7\n");

  std::ostringstream cmp;
  write_comparison_csv(cmp, {{"bayes", 0.25, 0.125}, {"simplex", 1.0, 0.5}});
  CHECK(cmp.str() == "method,P99,median\nbayes,0.25,0.125\nsimplex,1,0.5\n");

  const ParameterSpace space = ParameterSpace::extrusion_line();
  RestartResult bad;
  bad.run_id = 1;
  bad.error = "domain: x, y";
  std::ostringstream cand;
  write_candidates_csv(cand, space, {fake(0, Vec::LinSpaced(6, 1, 6), Method::simplex, 0.5), bad});
  CHECK(cand.str() ==
        "run_id,method,ok,observed_cost,evaluations,pressure_big_cavity,pressure_small_cavity,rpm_ratio,"
        "infrared_heat,gas_oven_1_temperature,gas_oven_2_temperature,error\n"
        "0,simplex,1,0.5,0,1,2,3,4,5,6,\n"
        "1,bayes,0,,0,,,,,,,\"domain: x, y\"\n");

  std::ostringstream smp;
  write_samples_csv(smp, {{0.5, 2.0}, {10.0, 11.0}});
  CHECK(smp.str() == "sample,cost,end_distance_mm\n0,0.5,10\n1,2,11\n");
}

TEST_CASE("restricted control boxes") {
  const Fixture f;
  Problem p = f.problem;
  Box box = p.space().controllable_box();
  box.lower[0] += 100.0;
  box.upper[0] -= 100.0;
  p.controls = box;
  const auto runs = run_restarts(p, Method::simplex, 2, RandomStream(3));
  for (const auto& r : runs) CHECK(box.contains(r.controls));
  box.upper[1] += 1.0;
  p.controls = box;
  CHECK_THROWS_AS(p.validate(), DomainError);
  box = p.space().controllable_box();
  box.lower[2] = box.upper[2];
  p.controls = box;
  CHECK_THROWS_AS(p.validate(), DomainError);
}
