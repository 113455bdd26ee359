// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "model_factory.hpp"
#include "rom_oracle.hpp"
#include "rpo/errors.hpp"
#include "rpo/rom.hpp"

using namespace rpo;
using oracle::naive_eval;

TEST_CASE("constant factors multiply with the weight") {
  Expansion terms{{2.0, {{"a", {0.0, 1.0}, {3.0, 3.0}}, {"b", {0.0, 1.0}, {4.0, 4.0}}}}};
  const std::vector<double> x{0.3, 0.9};
  CHECK(evaluate_terms(terms, x) == 24.0);
}

TEST_CASE("evaluation at grid nodes is exact") {
  RandomStream s(8);
  const RomModel m = testing::random_model(s, 1, 9);
  // Two terms on shared grids so one node index addresses every factor.
  Term first = m.terms("dx1")[0];
  Term second = first;
  second.weight = -0.75;
  for (auto& f : second.factors)
    for (auto& v : f.values) v = v * v - 0.3;
  const Expansion terms{first, second};
  for (std::size_t j = 0; j < 9; ++j) {
    std::vector<double> x;
    for (const auto& f : first.factors) x.push_back(f.grid[std::min(j, f.grid.size() - 1)]);
    double expect = 0.0;
    for (const auto& t : terms) {
      double prod = t.weight;
      for (std::size_t n = 0; n < x.size(); ++n)
        prod *= t.factors[n].values[std::min(j, t.factors[n].grid.size() - 1)];
      expect += prod;
    }
    CHECK(evaluate_terms(terms, x) == expect);
  }
}

TEST_CASE("evaluate agrees with the naive oracle on 1000 random models") {
  RandomStream s(1);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    RandomStream ms = s.derive("model", static_cast<std::uint64_t>(i));
    const RomModel m = testing::random_model(ms, 1 + ms.below(5), 2 + ms.below(8));
    for (int q = 0; q < 5; ++q) {
      const auto x = testing::random_input(m, ms);
      const Vec p = Eigen::Map<const Vec>(x.data() + 1, static_cast<Eigen::Index>(x.size() - 1));
      for (const auto& [name, terms] : m.outputs())
        worst = std::max(worst, std::abs(evaluate(m, name, x[0], p) - naive_eval(terms, x)));
    }
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("additivity and homogeneity") {
  RandomStream s(2);
  const RomModel a = testing::random_model(s, 3, 5);
  const RomModel b = testing::random_model(s, 2, 5);
  Expansion joined = a.terms("dx1");
  joined.insert(joined.end(), b.terms("dx1").begin(), b.terms("dx1").end());
  const RomModel scaled = a.scaled(-2.5);
  for (int q = 0; q < 100; ++q) {
    const auto x = testing::random_input(a, s);
    const double ea = evaluate_terms(a.terms("dx1"), x), eb = evaluate_terms(b.terms("dx1"), x);
    CHECK(evaluate_terms(joined, x) == doctest::Approx(ea + eb).epsilon(1e-13));
    CHECK(evaluate_terms(scaled.terms("dx1"), x) == doctest::Approx(-2.5 * ea).epsilon(1e-13));
  }
}

TEST_CASE("no silent extrapolation at either end of any input") {
  RandomStream s(3);
  const RomModel m = testing::random_model(s, 2, 4);
  const auto x = testing::random_input(m, s);
  Vec p = Eigen::Map<const Vec>(x.data() + 1, 9);
  CHECK_NOTHROW(evaluate(m, "dx1", 0.0, p));
  CHECK_NOTHROW(evaluate(m, "dx1", m.line_length(), p));
  CHECK_THROWS_AS(evaluate(m, "dx1", -1e-12, p), ExtrapolationError);
  CHECK_THROWS_AS(evaluate(m, "dx1", std::nextafter(m.line_length(), 1e9), p), ExtrapolationError);
  CHECK_THROWS_AS(evaluate(m, "dx1", NAN, p), ExtrapolationError);
  for (Eigen::Index j = 0; j < 9; ++j) {
    Vec q = p;
    q[j] = m.input_lower(static_cast<std::size_t>(j) + 1);
    CHECK_NOTHROW(evaluate(m, "dx1", 1.0, q));
    q[j] = std::nextafter(q[j], -1e9);
    CHECK_THROWS_AS(evaluate(m, "dx1", 1.0, q), ExtrapolationError);
    q[j] = m.input_upper(static_cast<std::size_t>(j) + 1);
    CHECK_NOTHROW(evaluate(m, "dx1", 1.0, q));
    q[j] = std::nextafter(q[j], 1e9);
    CHECK_THROWS_AS(evaluate(m, "dx1", 1.0, q), ExtrapolationError);
  }
}

TEST_CASE("unknown output") {
  RandomStream s(4);
  const RomModel m = testing::random_model(s, 1, 3);
  CHECK_THROWS_AS(evaluate(m, "temperature", 1.0, m.space().midpoint()), UnknownOutputError);
  CHECK(m.has_output("dy2"));
}

TEST_CASE("model construction enforces structure and grid spans") {
  RandomStream s(5);
  const RomModel m = testing::random_model(s, 2, 3);
  auto outputs = m.outputs();
  outputs["dx1"][0].factors.pop_back();
  CHECK_THROWS_AS(RomModel(m.line_length(), m.space(), m.geometry(), outputs), FormatError);

  outputs = m.outputs();
  outputs["dx1"][1].factors[3].grid.back() += 0.01;
  CHECK_THROWS_AS(RomModel(m.line_length(), m.space(), m.geometry(), outputs), FormatError);

  outputs = m.outputs();
  std::swap(outputs["dx1"][0].factors[2], outputs["dx1"][0].factors[3]);
  CHECK_THROWS_AS(RomModel(m.line_length(), m.space(), m.geometry(), outputs), FormatError);
}

TEST_CASE("linspace keeps exact endpoints") {
  const auto g = linspace(0.3015, 0.3685, 17);
  CHECK(g.size() == 17);
  CHECK(g.front() == 0.3015);
  CHECK(g.back() == 0.3685);
  for (std::size_t j = 1; j < g.size(); ++j) CHECK(g[j] > g[j - 1]);
  const auto grids = default_grids(ParameterSpace::extrusion_line(), 105.85);
  CHECK(grids.size() == 10);
  CHECK(grids[0].size() == 64);
  CHECK(grids[0].back() == 105.85);
  CHECK(grids[9].size() == 17);
}
