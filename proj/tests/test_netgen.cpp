// Copyright 2026 The sdploc Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include "doctest.h"
#include "sdploc/errors.hpp"
#include "sdploc/network.hpp"

using namespace sdploc;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("generation rejects zero sensors") {
  GenConfig cfg;
  cfg.n = 0;
  CHECK_THROWS_AS(generate_network(cfg), std::invalid_argument);
}

TEST_CASE("generation is bitwise deterministic") {
  GenConfig cfg;
  cfg.n = 80;
  cfg.m = 5;
  cfg.seed = 7;
  NetworkTruth a = generate_network(cfg);
  NetworkTruth b = generate_network(cfg);
  REQUIRE(a.sensors.size() == b.sensors.size());
  for (int i = 0; i < a.n(); ++i) {
    CHECK(a.sensors[i].x == b.sensors[i].x);
    CHECK(a.sensors[i].y == b.sensors[i].y);
  }
  for (int k = 0; k < a.m(); ++k) {
    CHECK(a.anchors[k].x == b.anchors[k].x);
    CHECK(a.anchors[k].y == b.anchors[k].y);
  }
}

TEST_CASE("all generated points lie inside the centered unit square") {
  GenConfig cfg;
  cfg.n = 80;
  cfg.m = 5;
  cfg.seed = 123;
  NetworkTruth truth = generate_network(cfg);
  auto inside = [](const Point2& p) {
    return p.x >= -0.5 && p.x < 0.5 && p.y >= -0.5 && p.y < 0.5;
  };
  for (const auto& p : truth.sensors) CHECK(inside(p));
  for (const auto& p : truth.anchors) CHECK(inside(p));
}

TEST_CASE("noise-free in-range pair becomes one exact edge") {
  GenConfig cfg;
  cfg.n = 2;
  cfg.m = 1;
  cfg.radio_range = 0.25;
  cfg.noise_std = 0.0;
  NetworkTruth truth;
  truth.sensors = {{0.0, 0.0}, {0.2, 0.0}};
  truth.anchors = {{0.05, 0.0}};
  MeasurementGraph g = build_measurements(truth, cfg);
  REQUIRE(g.sensor_edges.size() == 1);
  CHECK(g.sensor_edges[0].i == 0);
  CHECK(g.sensor_edges[0].j == 1);
  CHECK(g.sensor_edges[0].d_hat == 0.2);
}

TEST_CASE("out-of-range pair produces no sensor edge") {
  GenConfig cfg;
  cfg.n = 2;
  cfg.m = 1;
  cfg.radio_range = 0.25;
  cfg.noise_std = 0.0;
  NetworkTruth truth;
  truth.sensors = {{0.0, 0.0}, {0.3, 0.0}};
  truth.anchors = {{0.05, 0.0}};  // keeps the graph nonempty
  MeasurementGraph g = build_measurements(truth, cfg);
  CHECK(g.sensor_edges.empty());
  CHECK(g.anchor_edges.size() == 2);
}

TEST_CASE("graph with no edges at all throws EmptyGraphError") {
  GenConfig cfg;
  cfg.n = 2;
  cfg.m = 0;
  cfg.radio_range = 0.01;
  NetworkTruth truth;
  truth.sensors = {{-0.4, -0.4}, {0.4, 0.4}};
  CHECK_THROWS_AS(build_measurements(truth, cfg), EmptyGraphError);
}

TEST_CASE("edge rule matches an exhaustive distance scan") {
  GenConfig cfg;
  cfg.n = 7;
  cfg.m = 3;
  cfg.radio_range = 0.4;
  cfg.noise_std = 0.05;
  cfg.seed = 19;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph g = build_measurements(truth, cfg);
  std::set<std::pair<int, int>> got;
  for (const auto& e : g.sensor_edges) got.insert({e.i, e.j});
  for (int i = 0; i < cfg.n; ++i)
    for (int j = i + 1; j < cfg.n; ++j) {
      const bool expected = distance(truth.sensors[i], truth.sensors[j]) <= cfg.radio_range;
      CHECK(got.count({i, j}) == (expected ? 1u : 0u));
    }
  std::set<std::pair<int, int>> got_a;
  for (const auto& e : g.anchor_edges) got_a.insert({e.j, e.k});
  for (int j = 0; j < cfg.n; ++j)
    for (int k = 0; k < cfg.m; ++k) {
      const bool expected = distance(truth.sensors[j], truth.anchors[k]) <= cfg.radio_range;
      CHECK(got_a.count({j, k}) == (expected ? 1u : 0u));
    }
}

TEST_CASE("zero noise reproduces true distances exactly") {
  GenConfig cfg;
  cfg.n = 10;
  cfg.m = 2;
  cfg.radio_range = 0.5;
  cfg.noise_std = 0.0;
  cfg.seed = 77;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph g = build_measurements(truth, cfg);
  for (const auto& e : g.sensor_edges)
    CHECK(e.d_hat == distance(truth.sensors[e.i], truth.sensors[e.j]));
  for (const auto& e : g.anchor_edges)
    CHECK(e.d_hat == distance(truth.sensors[e.j], truth.anchors[e.k]));
}

TEST_CASE("noisy distances stay strictly positive under huge noise") {
  GenConfig cfg;
  cfg.n = 30;
  cfg.m = 3;
  cfg.radio_range = 0.8;
  cfg.noise_std = 50.0;  // most draws would go negative without clamping
  cfg.seed = 5;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph g = build_measurements(truth, cfg);
  for (const auto& e : g.sensor_edges) CHECK(e.d_hat > 0.0);
  for (const auto& e : g.anchor_edges) CHECK(e.d_hat > 0.0);
}

TEST_CASE("multiplicative noise model scales with distance") {
  GenConfig cfg;
  cfg.n = 2;
  cfg.m = 1;
  cfg.radio_range = 1.0;
  cfg.noise_std = 0.1;
  cfg.noise_model = NoiseModel::Multiplicative;
  cfg.seed = 3;
  NetworkTruth truth;
  truth.sensors = {{0.0, 0.0}, {0.2, 0.0}};
  truth.anchors = {{-0.3, 0.0}};
  MeasurementGraph g = build_measurements(truth, cfg);
  // same seed, additive model: the same gaussian draw enters differently
  cfg.noise_model = NoiseModel::Additive;
  MeasurementGraph ga = build_measurements(truth, cfg);
  const double gauss = (ga.sensor_edges[0].d_hat - 0.2) / cfg.noise_std;
  CHECK(g.sensor_edges[0].d_hat == doctest::Approx(0.2 * (1.0 + 0.1 * gauss)).epsilon(1e-12));
}

TEST_CASE("degree cap holds for every sensor") {
  GenConfig cfg;
  cfg.n = 80;
  cfg.m = 5;
  cfg.radio_range = 0.25;
  cfg.noise_std = 0.05;
  cfg.max_degree = 7;
  cfg.seed = 2;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph g = build_measurements(truth, cfg);
  std::vector<int> degree(cfg.n, 0);
  for (const auto& e : g.sensor_edges) {
    ++degree[e.i];
    ++degree[e.j];
  }
  for (int d : degree) CHECK(d <= 7);
  // anchor edges are never pruned
  GenConfig uncapped = cfg;
  uncapped.max_degree.reset();
  MeasurementGraph gu = build_measurements(truth, uncapped);
  CHECK(g.anchor_edges.size() == gu.anchor_edges.size());
  CHECK(g.sensor_edges.size() <= gu.sensor_edges.size());
}

TEST_CASE("pruning keeps the nearest neighbors") {
  GenConfig cfg;
  cfg.n = 4;
  cfg.m = 1;
  cfg.radio_range = 1.0;
  cfg.noise_std = 0.0;
  cfg.max_degree = 1;
  NetworkTruth truth;
  truth.sensors = {{0.0, 0.0}, {0.1, 0.0}, {0.3, 0.0}, {0.45, 0.0}};
  truth.anchors = {{0.0, 0.2}};
  MeasurementGraph g = build_measurements(truth, cfg);
  // mutual nearest pairs survive: (0,1) and (2,3)
  REQUIRE(g.sensor_edges.size() == 2);
  CHECK(g.sensor_edges[0].i == 0);
  CHECK(g.sensor_edges[0].j == 1);
  CHECK(g.sensor_edges[1].i == 2);
  CHECK(g.sensor_edges[1].j == 3);
}

TEST_CASE("instance save/load round trip is exact") {
  GenConfig cfg;
  cfg.n = 15;
  cfg.m = 4;
  cfg.radio_range = 0.4;
  cfg.noise_std = 0.05;
  cfg.seed = 99;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph g = build_measurements(truth, cfg);
  const std::string path = temp_path("sdploc_roundtrip.json");
  save_instance(truth, g, path);
  Instance inst = load_instance(path);
  REQUIRE(inst.has_sensor_truth);
  REQUIRE(inst.truth.n() == truth.n());
  REQUIRE(inst.truth.m() == truth.m());
  for (int i = 0; i < truth.n(); ++i) {
    CHECK(inst.truth.sensors[i].x == truth.sensors[i].x);
    CHECK(inst.truth.sensors[i].y == truth.sensors[i].y);
  }
  for (int k = 0; k < truth.m(); ++k) {
    CHECK(inst.truth.anchors[k].x == truth.anchors[k].x);
    CHECK(inst.truth.anchors[k].y == truth.anchors[k].y);
  }
  REQUIRE(inst.graph.sensor_edges.size() == g.sensor_edges.size());
  REQUIRE(inst.graph.anchor_edges.size() == g.anchor_edges.size());
  for (std::size_t e = 0; e < g.sensor_edges.size(); ++e) {
    CHECK(inst.graph.sensor_edges[e].i == g.sensor_edges[e].i);
    CHECK(inst.graph.sensor_edges[e].j == g.sensor_edges[e].j);
    CHECK(inst.graph.sensor_edges[e].d_hat == g.sensor_edges[e].d_hat);
  }
  for (std::size_t e = 0; e < g.anchor_edges.size(); ++e)
    CHECK(inst.graph.anchor_edges[e].d_hat == g.anchor_edges[e].d_hat);
  CHECK(inst.graph.radio_range == g.radio_range);
  CHECK(inst.graph.noise_std == g.noise_std);
  std::filesystem::remove(path);
}

TEST_CASE("missing required field raises FormatError naming it") {
  const std::string path = temp_path("sdploc_badfield.json");
  std::ofstream out(path);
  out << R"({"version":1,"n":1,"m":1,"noise_std":0.0,"noise_model":"additive",)"
      << R"("anchors":[[0.0,0.0]],"sensors":[[0.1,0.1]],)"
      << R"("sensor_edges":[],"anchor_edges":[[0,0,0.1415]]})";
  out.close();
  try {
    load_instance(path);
    FAIL("expected FormatError");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("radio_range") != std::string::npos);
  }
  std::filesystem::remove(path);
}

TEST_CASE("hand-written 1-sensor 3-anchor instance parses to v = 3") {
  const std::string path = temp_path("sdploc_hand.json");
  std::ofstream out(path);
  out << R"({"version":1,"n":1,"m":3,"radio_range":2.0,"noise_std":0.0,)"
      << R"("noise_model":"additive","anchors":[[0.0,0.0],[1.0,0.0],[0.0,1.0]],)"
      << R"("sensors":[[0.3,0.4]],"sensor_edges":[],)"
      << R"("anchor_edges":[[0,0,0.5],[0,1,0.8062257748298549],[0,2,0.6708203932499369]]})";
  out.close();
  Instance inst = load_instance(path);
  CHECK(inst.graph.num_edges() == 3);
  CHECK(inst.graph.n == 1);
  CHECK(inst.graph.m == 3);
  std::filesystem::remove(path);
}

TEST_CASE("instances without sensor truth load but flag it") {
  const std::string path = temp_path("sdploc_notruth.json");
  std::ofstream out(path);
  out << R"({"version":1,"n":1,"m":1,"radio_range":1.0,"noise_std":0.0,)"
      << R"("noise_model":"additive","anchors":[[0.0,0.0]],)"
      << R"("sensor_edges":[],"anchor_edges":[[0,0,0.25]]})";
  out.close();
  Instance inst = load_instance(path);
  CHECK(!inst.has_sensor_truth);
  CHECK(inst.graph.num_edges() == 1);
  std::filesystem::remove(path);
}

TEST_CASE("loading a missing file raises IoError") {
  CHECK_THROWS_AS(load_instance(temp_path("definitely_not_here.json")), IoError);
}

TEST_CASE("measurement construction is deterministic") {
  GenConfig cfg;
  cfg.n = 25;
  cfg.m = 3;
  cfg.radio_range = 0.4;
  cfg.noise_std = 0.05;
  cfg.seed = 31;
  NetworkTruth truth = generate_network(cfg);
  MeasurementGraph a = build_measurements(truth, cfg);
  MeasurementGraph b = build_measurements(truth, cfg);
  REQUIRE(a.sensor_edges.size() == b.sensor_edges.size());
  for (std::size_t e = 0; e < a.sensor_edges.size(); ++e)
    CHECK(a.sensor_edges[e].d_hat == b.sensor_edges[e].d_hat);
}

TEST_CASE("edges shared between two radio ranges carry identical noise") {
  GenConfig small;
  small.n = 20;
  small.m = 3;
  small.radio_range = 0.3;
  small.noise_std = 0.05;
  small.seed = 55;
  GenConfig big = small;
  big.radio_range = 0.5;
  NetworkTruth truth = generate_network(small);
  MeasurementGraph gs = build_measurements(truth, small);
  MeasurementGraph gb = build_measurements(truth, big);
  std::map<std::pair<int, int>, double> big_hat;
  for (const auto& e : gb.sensor_edges) big_hat[{e.i, e.j}] = e.d_hat;
  for (const auto& e : gs.sensor_edges) {
    REQUIRE(big_hat.count({e.i, e.j}) == 1);
    CHECK(big_hat[{e.i, e.j}] == e.d_hat);
  }
}
