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

#ifndef SDPLOC_NETWORK_HPP_
#define SDPLOC_NETWORK_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdploc {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Ground truth: anchor coordinates are known inputs to the localization
// models, sensor coordinates are what the models estimate.
struct NetworkTruth {
  std::vector<Point2> anchors;
  std::vector<Point2> sensors;  // may be empty for instances loaded without truth

  int m() const { return static_cast<int>(anchors.size()); }
  int n() const { return static_cast<int>(sensors.size()); }
};

enum class NoiseModel { Additive, Multiplicative };

struct SensorEdge {
  int i = 0;  // sensor, i < j
  int j = 0;  // sensor
  double d_hat = 0.0;
};

struct AnchorEdge {
  int j = 0;  // sensor
  int k = 0;  // anchor
  double d_hat = 0.0;
};

struct MeasurementGraph {
  int n = 0;
  int m = 0;
  std::vector<SensorEdge> sensor_edges;
  std::vector<AnchorEdge> anchor_edges;
  double radio_range = 0.0;
  double noise_std = 0.0;
  NoiseModel noise_model = NoiseModel::Additive;

  int num_edges() const {
    return static_cast<int>(sensor_edges.size() + anchor_edges.size());
  }
};

// Placement region is the centered unit square [-0.5, 0.5]^2.
enum class Placement { UnitSquareCentered };

struct GenConfig {
  int n = 80;
  int m = 5;
  double radio_range = 0.25;
  double noise_std = 0.05;
  NoiseModel noise_model = NoiseModel::Additive;
  std::optional<int> max_degree;  // sensor-to-sensor connectivity cap
  std::uint64_t seed = 0;
  Placement placement = Placement::UnitSquareCentered;
};

// Throws std::invalid_argument describing the first violated field.
void validate_config(const GenConfig& cfg);

// Draws n sensors and m anchors i.i.d. uniform from the placement square.
// Deterministic in cfg.seed; the placement stream is independent of the
// noise stream so measurement settings never move the points.
NetworkTruth generate_network(const GenConfig& cfg);

// Creates an edge for every pair (sensor-sensor and sensor-anchor) whose true
// distance is <= radio_range. Noisy distances are clamped to 1e-8 from below.
// One noise draw is consumed per candidate pair whether or not it is in
// range, so sweeps over radio_range see identical noise on shared edges.
// Throws EmptyGraphError if no edge results.
MeasurementGraph build_measurements(const NetworkTruth& truth, const GenConfig& cfg);

struct Instance {
  NetworkTruth truth;
  MeasurementGraph graph;
  bool has_sensor_truth = true;
};

// Instance files are JSON with fields version, n, m, radio_range, noise_std,
// noise_model, anchors, sensors, sensor_edges, anchor_edges. Reals round-trip
// exactly. The sensors field is optional on load (truth-free instances).
void save_instance(const NetworkTruth& truth, const MeasurementGraph& graph,
                   const std::string& path);
Instance load_instance(const std::string& path);

std::string noise_model_name(NoiseModel model);
NoiseModel parse_noise_model(const std::string& name);

}  // namespace sdploc

#endif  // SDPLOC_NETWORK_HPP_
