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

#ifndef SDPLOC_EXPERIMENTS_HPP_
#define SDPLOC_EXPERIMENTS_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sdploc/models.hpp"
#include "sdploc/network.hpp"
#include "sdploc/solver.hpp"

namespace sdploc {

struct GammaSweep {
  std::vector<double> values;
};
struct NoiseSweep {
  std::vector<double> values;
};
struct RangeSweep {
  std::vector<double> values;
};
struct ScaleSweep {
  std::vector<int> values;
};
struct EntropyComparison {
  double bin_width = 0.0049;
  double sigma_ref = 0.008;
  double threshold = 0.022;
};

using Sweep = std::variant<GammaSweep, NoiseSweep, RangeSweep, ScaleSweep, EntropyComparison>;

struct ExperimentConfig {
  int num_networks = 50;
  GenConfig base;
  std::vector<ObjectiveKind> objectives;
  Sweep sweep;
  std::uint64_t master_seed = 1;
  // When false, solve times are written as zero so output bytes are a pure
  // function of the configuration.
  bool record_timing = true;
  SolverSettings solver;
};

struct SweepRow {
  double sweep_value = 0.0;
  std::string objective;
  double mean_pe = 0.0;
  double std_pe = 0.0;
  double mean_solve_time = 0.0;
  double mean_iterations = 0.0;
  std::optional<double> mean_relative_entropy;
  std::optional<double> mean_tail_fraction;
  int networks_succeeded = 0;
  int num_networks = 0;
};

struct NetworkLog {
  double sweep_value = 0.0;
  std::string objective;
  int network_index = 0;
  std::optional<double> pe;
  double solve_time = 0.0;
  int iterations = 0;
  std::string status;
  std::optional<double> relative_entropy;
  std::optional<double> tail_fraction;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<NetworkLog> logs;
};

// Network i of every sweep cell is generated from derive_network_seed(
// master_seed, i), so comparisons across sweep values and objectives are
// paired. A network whose generation or solve fails is logged and excluded
// from the aggregates; it never aborts the sweep.
SweepResult run_gamma_sweep(const ExperimentConfig& cfg);
SweepResult run_noise_sweep(const ExperimentConfig& cfg);
SweepResult run_range_sweep(const ExperimentConfig& cfg);
SweepResult run_scale_sweep(const ExperimentConfig& cfg);
SweepResult run_entropy_comparison(const ExperimentConfig& cfg);
SweepResult run_sweep(const ExperimentConfig& cfg);  // dispatches on cfg.sweep

std::string sweep_kind_name(const Sweep& sweep);

// CSVs with reals at 10 significant digits; absent metrics are empty fields.
void write_aggregate_csv(const SweepResult& result, std::ostream& os);
void write_network_csv(const SweepResult& result, std::ostream& os);

// JSON config file; kind_override replaces the sweep kind (keeping per-kind
// default values unless the file provides matching ones).
ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::optional<std::string>& kind_override = {});

// Desk-scale defaults: at most 20 networks and 60 sensors.
void apply_quick_mode(ExperimentConfig& cfg);

}  // namespace sdploc

#endif  // SDPLOC_EXPERIMENTS_HPP_
