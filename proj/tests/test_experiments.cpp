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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "sdploc/errors.hpp"
#include "sdploc/experiments.hpp"

using namespace sdploc;

namespace {

ExperimentConfig tiny_config() {
  ExperimentConfig cfg;
  cfg.num_networks = 3;
  cfg.base.n = 8;
  cfg.base.m = 3;
  cfg.base.radio_range = 0.6;
  cfg.base.noise_std = 0.05;
  cfg.master_seed = 404;
  cfg.record_timing = false;
  cfg.objectives = {ObjectiveKind::biswas_ye(), ObjectiveKind::proposed_qp()};
  return cfg;
}

std::string csv_of(const SweepResult& result) {
  std::ostringstream agg, net;
  write_aggregate_csv(result, agg);
  write_network_csv(result, net);
  return agg.str() + "\n--\n" + net.str();
}

std::string temp_file(const std::string& name, const std::string& content) {
  const std::string path = (std::filesystem::temp_directory_path() / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("identical configs produce identical CSV bytes") {
  ExperimentConfig cfg = tiny_config();
  cfg.sweep = GammaSweep{{10.0, 1000.0}};
  const std::string a = csv_of(run_gamma_sweep(cfg));
  const std::string b = csv_of(run_gamma_sweep(cfg));
  CHECK(a == b);
  CHECK(!a.empty());
}

TEST_CASE("sweep values see identical paired networks") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::least_squares()};
  // the same noise level twice: rows must agree bitwise if instances pair
  cfg.sweep = NoiseSweep{{0.05, 0.05}};
  SweepResult res = run_noise_sweep(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].mean_pe == res.rows[1].mean_pe);
  CHECK(res.rows[0].std_pe == res.rows[1].std_pe);
}

TEST_CASE("one network's failure never aborts the sweep") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::least_squares()};
  cfg.sweep = RangeSweep{{0.001, 0.6}};  // first value yields empty graphs
  SweepResult res = run_range_sweep(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].networks_succeeded == 0);
  CHECK(res.rows[1].networks_succeeded == cfg.num_networks);
  int failed_logs = 0;
  for (const auto& log : res.logs)
    if (log.status.rfind("failed:", 0) == 0) ++failed_logs;
  CHECK(failed_logs == cfg.num_networks);
}

TEST_CASE("entropy comparison carries the KL and tail columns") {
  ExperimentConfig cfg = tiny_config();
  cfg.base.n = 10;
  cfg.sweep = EntropyComparison{};
  SweepResult res = run_entropy_comparison(cfg);
  REQUIRE(res.rows.size() == cfg.objectives.size());
  for (const auto& row : res.rows) {
    CHECK(row.mean_relative_entropy.has_value());
    CHECK(row.mean_tail_fraction.has_value());
    CHECK(*row.mean_relative_entropy >= 0.0);
  }
}

TEST_CASE("noise sweep rows have no entropy columns") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::least_squares()};
  cfg.sweep = NoiseSweep{{0.05}};
  SweepResult res = run_noise_sweep(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(!res.rows[0].mean_relative_entropy.has_value());
}

TEST_CASE("aggregates are recomputable from the per-network logs") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::biswas_ye()};
  cfg.sweep = NoiseSweep{{0.05}};
  SweepResult res = run_noise_sweep(cfg);
  REQUIRE(res.rows.size() == 1);
  double sum = 0.0;
  int count = 0;
  for (const auto& log : res.logs) {
    if (log.pe) {
      sum += *log.pe;
      ++count;
    }
  }
  REQUIRE(count == res.rows[0].networks_succeeded);
  const double mean = sum / count;
  CHECK(std::abs(res.rows[0].mean_pe - mean) < 1e-12);
  double var = 0.0;
  for (const auto& log : res.logs)
    if (log.pe) var += (*log.pe - mean) * (*log.pe - mean);
  CHECK(std::abs(res.rows[0].std_pe - std::sqrt(var / (count - 1))) < 1e-12);
}

TEST_CASE("wider radio range does not hurt the qp accuracy") {
  ExperimentConfig cfg;
  cfg.num_networks = 6;
  cfg.base.n = 60;
  cfg.base.m = 5;
  cfg.base.noise_std = 0.05;
  cfg.master_seed = 77;
  cfg.objectives = {ObjectiveKind::biswas_ye(), ObjectiveKind::proposed_qp()};
  cfg.sweep = RangeSweep{{0.25, 0.4}};
  SweepResult res = run_range_sweep(cfg);
  std::map<std::pair<double, std::string>, double> pe;
  for (const auto& row : res.rows) {
    REQUIRE(row.networks_succeeded == cfg.num_networks);
    pe[{row.sweep_value, row.objective}] = row.mean_pe;
  }
  CHECK(pe[{0.4, "qp"}] <= pe[{0.25, "qp"}]);
  // the large-sample ordering; at this sample size it is decisive at r = 0.4
  CHECK(pe[{0.4, "qp"}] < pe[{0.4, "biswas-ye"}]);
}

TEST_CASE("zero-noise gamma sweep recovers positions exactly") {
  ExperimentConfig cfg;
  cfg.num_networks = 1;
  cfg.base.n = 8;
  cfg.base.m = 3;
  cfg.base.radio_range = 0.7;
  cfg.base.noise_std = 0.0;
  cfg.master_seed = 12;
  cfg.sweep = GammaSweep{{1000.0}};
  SweepResult res = run_gamma_sweep(cfg);
  REQUIRE(res.rows.size() == 1);
  REQUIRE(res.rows[0].networks_succeeded == 1);
  CHECK(res.rows[0].mean_pe < 1e-3);
}

TEST_CASE("scale sweep honors the base degree cap") {
  ExperimentConfig cfg = tiny_config();
  cfg.num_networks = 2;
  cfg.objectives = {ObjectiveKind::least_squares()};
  cfg.base.max_degree = 3;
  cfg.sweep = ScaleSweep{{8, 12}};
  SweepResult res = run_scale_sweep(cfg);
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].sweep_value == 8.0);
  CHECK(res.rows[1].sweep_value == 12.0);
  CHECK(res.rows[0].networks_succeeded > 0);
}

TEST_CASE("run_sweep dispatches on the variant") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::least_squares()};
  cfg.sweep = NoiseSweep{{0.02}};
  SweepResult res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].objective == "ls");
  CHECK(sweep_kind_name(cfg.sweep) == "noise");
}

TEST_CASE("CSV headers match the documented columns") {
  ExperimentConfig cfg = tiny_config();
  cfg.objectives = {ObjectiveKind::least_squares()};
  cfg.sweep = NoiseSweep{{0.05}};
  SweepResult res = run_noise_sweep(cfg);
  std::ostringstream agg, net;
  write_aggregate_csv(res, agg);
  write_network_csv(res, net);
  CHECK(agg.str().rfind("sweep_value,objective,mean_pe,std_pe,mean_solve_time,"
                        "mean_iterations,mean_relative_entropy,mean_tail_fraction,"
                        "networks_succeeded\n",
                        0) == 0);
  CHECK(net.str().rfind("sweep_value,objective,network_index,pe,solve_time,iterations,"
                        "status,relative_entropy,tail_fraction\n",
                        0) == 0);
}

TEST_CASE("experiment config loads from JSON") {
  const std::string path = temp_file("sdploc_cfg.json", R"({
    "num_networks": 4,
    "master_seed": 11,
    "base": {"n": 12, "m": 3, "radio_range": 0.5, "noise_std": 0.02,
             "noise_model": "multiplicative", "max_degree": 6},
    "objectives": ["biswas-ye", "ls", "qp-gamma"],
    "gamma": 500.0,
    "sweep": {"kind": "noise", "values": [0.01, 0.02]}
  })");
  ExperimentConfig cfg = load_experiment_config(path);
  CHECK(cfg.num_networks == 4);
  CHECK(cfg.master_seed == 11);
  CHECK(cfg.base.n == 12);
  CHECK(cfg.base.noise_model == NoiseModel::Multiplicative);
  REQUIRE(cfg.base.max_degree.has_value());
  CHECK(*cfg.base.max_degree == 6);
  REQUIRE(cfg.objectives.size() == 3);
  CHECK(cfg.objectives[2].tag == ObjectiveKind::Tag::ProposedQpGamma);
  CHECK(cfg.objectives[2].gamma == 500.0);
  REQUIRE(std::holds_alternative<NoiseSweep>(cfg.sweep));
  CHECK(std::get<NoiseSweep>(cfg.sweep).values == std::vector<double>{0.01, 0.02});
  std::filesystem::remove(path);
}

TEST_CASE("kind override replaces the sweep with per-kind defaults") {
  const std::string path = temp_file("sdploc_cfg2.json", R"({
    "num_networks": 2,
    "sweep": {"kind": "noise", "values": [0.01]}
  })");
  ExperimentConfig cfg = load_experiment_config(path, std::string("entropy"));
  CHECK(std::holds_alternative<EntropyComparison>(cfg.sweep));
  CHECK(std::get<EntropyComparison>(cfg.sweep).bin_width == 0.0049);
  CHECK(std::get<EntropyComparison>(cfg.sweep).sigma_ref == 0.008);
  std::filesystem::remove(path);
}

TEST_CASE("quick mode shrinks networks and sensor count") {
  ExperimentConfig cfg;
  cfg.num_networks = 50;
  cfg.base.n = 80;
  apply_quick_mode(cfg);
  CHECK(cfg.num_networks == 20);
  CHECK(cfg.base.n == 60);
  // never grows small configs
  cfg.num_networks = 5;
  cfg.base.n = 10;
  apply_quick_mode(cfg);
  CHECK(cfg.num_networks == 5);
  CHECK(cfg.base.n == 10);
}

TEST_CASE("config errors surface as typed exceptions") {
  CHECK_THROWS_AS(load_experiment_config("/no/such/config.json"), IoError);
  const std::string path = temp_file("sdploc_bad.json", "{ not json");
  CHECK_THROWS_AS(load_experiment_config(path), FormatError);
  std::filesystem::remove(path);
  const std::string path2 = temp_file("sdploc_nosweep.json", R"({"num_networks": 2})");
  CHECK_THROWS_AS(load_experiment_config(path2), FormatError);
  std::filesystem::remove(path2);
}
