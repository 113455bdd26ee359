// Copyright 2026 The rpo Authors
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "rpo/config.hpp"
#include "rpo/dataset_io.hpp"
#include "rpo/errors.hpp"
#include "rpo/plant.hpp"

using namespace rpo;
using nlohmann::json;

TEST_CASE("defaults are the CI profile") {
  const RunConfig c = resolve_config({});
  CHECK(c.profile == Profile::ci);
  CHECK(c.restarts == 20);
  CHECK(c.budget == 60);
  CHECK(c.mc_samples == 2000);
  CHECK(c.initial_design == 8);
  CHECK(c.q == 0.99);
  CHECK(c.alpha == 1e-4);
  CHECK(!c.setpoint);
  CHECK(c.method == "both");
  CHECK(c.seed == 0);
  CHECK(c.seed_source == "default");
  CHECK(c.stations == default_stations());
}

TEST_CASE("paper profile and precedence flag > file > default") {
  const RunConfig p = resolve_config({{"config", {{"profile", "paper"}}}});
  CHECK(p.restarts == 100);
  CHECK(p.budget == 100);
  CHECK(p.mc_samples == 10000);

  const json file = {{"profile", "paper"}, {"budget", 70}, {"seed", 4}, {"setpoint", 11.0}};
  const json flags = {{"budget", 80}, {"setpoint", "auto"}};
  const RunConfig c = resolve_config({{"config", file}, {"flag", flags}}, "99");
  CHECK(c.restarts == 100);
  CHECK(c.budget == 80);
  CHECK(!c.setpoint);
  CHECK(c.seed == 4);
  CHECK(c.seed_source == "config");

  CHECK(resolve_config({{"config", file}, {"flag", {{"seed", "12"}}}}).seed_source == "flag");
  const RunConfig e = resolve_config({{"config", {{"budget", 70}}}}, "99");
  CHECK(e.seed == 99);
  CHECK(e.seed_source == "env:RPO_SEED");
  CHECK(resolve_config({}, "18446744073709551615").seed == 18446744073709551615ULL);
}

TEST_CASE("configuration round trip") {
  const json file = {{"seed", 7},
                     {"method", "bayes"},
                     {"q", 0.95},
                     {"stations", {{{"position", 100.0}, {"weight", 2.0}}}},
                     {"trajectory_positions", {0.0, 50.0}},
                     {"control_bounds", {{"rpm_ratio", {0.31, 0.32}}}},
                     {"geometry", {{"x0_2", 3.0}}},
                     {"workers", 3}};
  const RunConfig a = resolve_config({{"config", file}});
  CHECK(a.stations == std::vector<Station>{{100.0, 2.0}});
  CHECK(a.geometry->x0_2 == 3.0);
  CHECK(a.geometry->y0_2 == 5.0);
  const RunConfig b = resolve_config({{"config", to_json(a)}});
  CHECK(to_json(b) == to_json(a));
  CHECK(b.control_bounds.at("rpm_ratio") == std::pair{0.31, 0.32});
}

TEST_CASE("configuration errors") {
  const auto bad = [](json j) { CHECK_THROWS_AS(resolve_config({{"config", j}}), ConfigError); };
  bad({{"restarts", 0}});
  bad({{"budget", 2.5}});
  bad({{"budget", 4}});  // below the initial design
  bad({{"q", 0.0}});
  bad({{"q", 1.5}});
  bad({{"alpha", -1.0}});
  bad({{"method", "genetic"}});
  bad({{"profile", "huge"}});
  bad({{"seed", -3}});
  bad({{"seed", "x12"}});
  bad({{"colour", "red"}});
  bad({{"stations", {{{"position", 1.0}}}}});
  bad({{"control_bounds", {{"rpm_ratio", {0.4, 0.3}}}}});
  bad({{"geometry", {{"z", 1.0}}}});
  bad({{"setpoint", "near"}});
  bad(json::array());
  CHECK_THROWS_AS(resolve_config({}, "abc"), ConfigError);
}

TEST_CASE("dataset CSV round trip") {
  PlantSpec plant;
  RandomStream s(4);
  DatasetOptions o;
  o.grid_aligned = false;
  const TrainingDataset d = generate_dataset(plant, 37, s, o);
  std::stringstream io;
  write_dataset_csv(io, d);
  const TrainingDataset e = read_dataset_csv(io);
  CHECK(e.input_names == d.input_names);
  CHECK(e.output_names == d.output_names);
  CHECK(e.output_of_row == d.output_of_row);
  CHECK(e.inputs == d.inputs);
  CHECK(e.values == d.values);
}

TEST_CASE("dataset CSV errors carry the line") {
  const auto fails = [](const std::string& text, const std::string& needle) {
    std::istringstream in(text);
    try {
      read_dataset_csv(in);
      FAIL("accepted: " << text);
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  fails("", "empty");
  fails("x,a,output,value_mm\n", "header");
  fails("position_m,a,output,value_mm\n1,2,dx1\n", "line 2");
  fails("position_m,a,output,value_mm\n1,2,dx1,3\n1,zz,dx1,3\n", "line 3");
  fails("position_m,a,output,value_mm\n1,2,,3\n", "no output");
}
