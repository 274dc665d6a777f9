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

#include "sdploc/network.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "sdploc/errors.hpp"
#include "sdploc/rng.hpp"

namespace sdploc {

namespace {

constexpr double kMinDistance = 1e-8;  // clamp for noisy draws that go nonpositive

double noisy_distance(double d_true, const GenConfig& cfg, double gauss) {
  double d = cfg.noise_model == NoiseModel::Additive
                 ? d_true + cfg.noise_std * gauss
                 : d_true * (1.0 + cfg.noise_std * gauss);
  return std::max(kMinDistance, d);
}

}  // namespace

void validate_config(const GenConfig& cfg) {
  if (cfg.n < 1) throw std::invalid_argument("GenConfig: n must be >= 1");
  if (cfg.m < 0) throw std::invalid_argument("GenConfig: m must be >= 0");
  if (!(cfg.radio_range > 0.0)) throw std::invalid_argument("GenConfig: radio_range must be > 0");
  if (!(cfg.noise_std >= 0.0)) throw std::invalid_argument("GenConfig: noise_std must be >= 0");
  if (cfg.max_degree && *cfg.max_degree < 1)
    throw std::invalid_argument("GenConfig: max_degree must be >= 1");
}

NetworkTruth generate_network(const GenConfig& cfg) {
  validate_config(cfg);
  Rng rng(cfg.seed, Rng::Purpose::Placement);
  NetworkTruth truth;
  truth.anchors.reserve(cfg.m);
  truth.sensors.reserve(cfg.n);
  for (int k = 0; k < cfg.m; ++k)
    truth.anchors.push_back({rng.uniform() - 0.5, rng.uniform() - 0.5});
  for (int i = 0; i < cfg.n; ++i)
    truth.sensors.push_back({rng.uniform() - 0.5, rng.uniform() - 0.5});
  return truth;
}

MeasurementGraph build_measurements(const NetworkTruth& truth, const GenConfig& cfg) {
  validate_config(cfg);
  if (truth.n() != cfg.n || truth.m() != cfg.m)
    throw std::invalid_argument("build_measurements: truth counts do not match config");

  Rng rng(cfg.seed, Rng::Purpose::Noise);
  MeasurementGraph g;
  g.n = cfg.n;
  g.m = cfg.m;
  g.radio_range = cfg.radio_range;
  g.noise_std = cfg.noise_std;
  g.noise_model = cfg.noise_model;

  // True distances of kept sensor edges, parallel to g.sensor_edges; needed
  // for nearest-neighbor pruning below.
  std::vector<double> true_dist;

  for (int i = 0; i < cfg.n; ++i) {
    for (int j = i + 1; j < cfg.n; ++j) {
      const double gauss = rng.normal();
      const double d = distance(truth.sensors[i], truth.sensors[j]);
      if (d <= cfg.radio_range) {
        g.sensor_edges.push_back({i, j, noisy_distance(d, cfg, gauss)});
        true_dist.push_back(d);
      }
    }
  }
  for (int j = 0; j < cfg.n; ++j) {
    for (int k = 0; k < cfg.m; ++k) {
      const double gauss = rng.normal();
      const double d = distance(truth.sensors[j], truth.anchors[k]);
      if (d <= cfg.radio_range) {
        g.anchor_edges.push_back({j, k, noisy_distance(d, cfg, gauss)});
      }
    }
  }

  if (cfg.max_degree) {
    // Keep an edge only if it ranks within the nearest max_degree (by true
    // distance, ties by the other endpoint's index) for both endpoints.
    const int cap = *cfg.max_degree;
    const int e_count = static_cast<int>(g.sensor_edges.size());
    std::vector<std::vector<int>> incident(cfg.n);
    for (int e = 0; e < e_count; ++e) {
      incident[g.sensor_edges[e].i].push_back(e);
      incident[g.sensor_edges[e].j].push_back(e);
    }
    std::vector<int> rank(e_count, 0);  // worst rank over the two endpoints
    for (int s = 0; s < cfg.n; ++s) {
      auto order = incident[s];
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        const int oa = g.sensor_edges[a].i == s ? g.sensor_edges[a].j : g.sensor_edges[a].i;
        const int ob = g.sensor_edges[b].i == s ? g.sensor_edges[b].j : g.sensor_edges[b].i;
        if (true_dist[a] != true_dist[b]) return true_dist[a] < true_dist[b];
        return oa < ob;
      });
      for (int r = 0; r < static_cast<int>(order.size()); ++r)
        rank[order[r]] = std::max(rank[order[r]], r);
    }
    std::vector<SensorEdge> kept;
    for (int e = 0; e < e_count; ++e)
      if (rank[e] < cap) kept.push_back(g.sensor_edges[e]);
    g.sensor_edges = std::move(kept);
  }

  if (g.num_edges() == 0)
    throw EmptyGraphError("no measurement edges: radio range too small for this layout");
  return g;
}

std::string noise_model_name(NoiseModel model) {
  return model == NoiseModel::Additive ? "additive" : "multiplicative";
}

NoiseModel parse_noise_model(const std::string& name) {
  if (name == "additive") return NoiseModel::Additive;
  if (name == "multiplicative") return NoiseModel::Multiplicative;
  throw FormatError("unknown noise_model '" + name + "'");
}

void save_instance(const NetworkTruth& truth, const MeasurementGraph& graph,
                   const std::string& path) {
  nlohmann::ordered_json j;
  j["version"] = 1;
  j["n"] = graph.n;
  j["m"] = graph.m;
  j["radio_range"] = graph.radio_range;
  j["noise_std"] = graph.noise_std;
  j["noise_model"] = noise_model_name(graph.noise_model);
  auto points = [](const std::vector<Point2>& ps) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& p : ps) a.push_back({p.x, p.y});
    return a;
  };
  j["anchors"] = points(truth.anchors);
  j["sensors"] = points(truth.sensors);
  nlohmann::ordered_json se = nlohmann::ordered_json::array();
  for (const auto& e : graph.sensor_edges) se.push_back({e.i, e.j, e.d_hat});
  j["sensor_edges"] = se;
  nlohmann::ordered_json ae = nlohmann::ordered_json::array();
  for (const auto& e : graph.anchor_edges) ae.push_back({e.j, e.k, e.d_hat});
  j["anchor_edges"] = ae;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(1) << "\n";
  if (!out) throw IoError("write failed on '" + path + "'");
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const std::string& key) {
  auto it = j.find(key);
  if (it == j.end()) throw FormatError("missing required field '" + key + "'");
  return *it;
}

std::vector<Point2> parse_points(const nlohmann::json& arr, const std::string& key) {
  std::vector<Point2> out;
  if (!arr.is_array()) throw FormatError("field '" + key + "' must be an array");
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2)
      throw FormatError("field '" + key + "' entries must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid instance file: ") + e.what());
  }
  try {
    Instance inst;
    const int version = require_field(j, "version").get<int>();
    if (version != 1) throw FormatError("unsupported instance version");
    inst.graph.n = require_field(j, "n").get<int>();
    inst.graph.m = require_field(j, "m").get<int>();
    inst.graph.radio_range = require_field(j, "radio_range").get<double>();
    inst.graph.noise_std = require_field(j, "noise_std").get<double>();
    inst.graph.noise_model = parse_noise_model(require_field(j, "noise_model").get<std::string>());
    inst.truth.anchors = parse_points(require_field(j, "anchors"), "anchors");
    if (j.contains("sensors")) {
      inst.truth.sensors = parse_points(j["sensors"], "sensors");
      inst.has_sensor_truth = !inst.truth.sensors.empty();
    } else {
      inst.has_sensor_truth = false;
    }
    if (static_cast<int>(inst.truth.anchors.size()) != inst.graph.m)
      throw FormatError("anchors length does not match m");
    if (inst.has_sensor_truth && static_cast<int>(inst.truth.sensors.size()) != inst.graph.n)
      throw FormatError("sensors length does not match n");

    for (const auto& e : require_field(j, "sensor_edges")) {
      if (!e.is_array() || e.size() != 3) throw FormatError("sensor_edges entries must be [i, j, d_hat]");
      SensorEdge se{e[0].get<int>(), e[1].get<int>(), e[2].get<double>()};
      if (se.i < 0 || se.j >= inst.graph.n || se.i >= se.j)
        throw FormatError("sensor edge indices out of range or not i < j");
      if (!(se.d_hat > 0.0)) throw FormatError("sensor edge d_hat must be > 0");
      inst.graph.sensor_edges.push_back(se);
    }
    for (const auto& e : require_field(j, "anchor_edges")) {
      if (!e.is_array() || e.size() != 3) throw FormatError("anchor_edges entries must be [j, k, d_hat]");
      AnchorEdge ae{e[0].get<int>(), e[1].get<int>(), e[2].get<double>()};
      if (ae.j < 0 || ae.j >= inst.graph.n || ae.k < 0 || ae.k >= inst.graph.m)
        throw FormatError("anchor edge indices out of range");
      if (!(ae.d_hat > 0.0)) throw FormatError("anchor edge d_hat must be > 0");
      inst.graph.anchor_edges.push_back(ae);
    }
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid instance file: ") + e.what());
  }
}

}  // namespace sdploc
