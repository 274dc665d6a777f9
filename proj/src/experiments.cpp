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

#include "sdploc/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "json.hpp"
#include "sdploc/errors.hpp"
#include "sdploc/metrics.hpp"
#include "sdploc/rng.hpp"

namespace sdploc {

namespace {

struct CellOutcome {
  NetworkLog log;
  bool success = false;
  double pe = 0.0;
  double solve_time = 0.0;
  int iterations = 0;
  std::optional<double> entropy;
  std::optional<double> tail;
};

// Generates, builds, solves and measures one (sweep value, objective,
// network) cell. Entropy metrics are computed only when entropy_params is
// set.
CellOutcome run_cell(const ExperimentConfig& cfg, const GenConfig& gen_cfg,
                     const ObjectiveKind& objective, double sweep_value, int network_index,
                     const EntropyComparison* entropy_params) {
  CellOutcome out;
  out.log.sweep_value = sweep_value;
  out.log.objective = objective.name();
  out.log.network_index = network_index;
  try {
    const NetworkTruth truth = generate_network(gen_cfg);
    const MeasurementGraph graph = build_measurements(truth, gen_cfg);
    const LocalizationModel model = build_model(objective, graph, truth.anchors);
    const SolveResult result = solve(model.program, cfg.solver);
    out.log.status = status_name(result.status);
    out.solve_time = cfg.record_timing ? result.wall_time : 0.0;
    out.iterations = result.iterations;
    out.log.solve_time = out.solve_time;
    out.log.iterations = out.iterations;
    if (result.status != SolveStatus::Optimal) return out;

    const EstimatedPositions est = extract_positions(model, result);
    out.pe = position_error(truth, est).pe;
    out.log.pe = out.pe;
    if (entropy_params) {
      const std::vector<double> errors = extract_errors(model, result);
      const ErrorHistogram hist = histogram(errors, entropy_params->bin_width);
      const std::vector<double> q = discretized_gaussian(hist, entropy_params->sigma_ref);
      out.entropy = relative_entropy(hist.probabilities, q);
      out.tail = tail_fraction(errors, entropy_params->threshold);
      out.log.relative_entropy = out.entropy;
      out.log.tail_fraction = out.tail;
    }
    out.success = true;
  } catch (const Error& e) {
    out.log.status = std::string("failed: ") + e.what();
  }
  return out;
}

// Runs num_networks cells for a fixed (sweep value, objective) and folds the
// successes into one aggregate row.
void run_series(const ExperimentConfig& cfg, const GenConfig& base_for_value,
                const ObjectiveKind& objective, double sweep_value,
                const EntropyComparison* entropy_params, SweepResult& result) {
  SweepRow row;
  row.sweep_value = sweep_value;
  row.objective = objective.name();
  row.num_networks = cfg.num_networks;

  std::vector<double> pes;
  double time_sum = 0.0, iter_sum = 0.0, entropy_sum = 0.0, tail_sum = 0.0;
  bool have_entropy = false;

  for (int i = 0; i < cfg.num_networks; ++i) {
    GenConfig gen_cfg = base_for_value;
    gen_cfg.seed = derive_network_seed(cfg.master_seed, static_cast<std::uint64_t>(i));
    CellOutcome out = run_cell(cfg, gen_cfg, objective, sweep_value, i, entropy_params);
    result.logs.push_back(out.log);
    if (!out.success) continue;
    pes.push_back(out.pe);
    time_sum += out.solve_time;
    iter_sum += out.iterations;
    if (out.entropy) {
      entropy_sum += *out.entropy;
      tail_sum += *out.tail;
      have_entropy = true;
    }
  }

  const int ok = static_cast<int>(pes.size());
  row.networks_succeeded = ok;
  if (ok > 0) {
    double mean = 0.0;
    for (double pe : pes) mean += pe;
    mean /= ok;
    double var = 0.0;
    for (double pe : pes) var += (pe - mean) * (pe - mean);
    row.mean_pe = mean;
    row.std_pe = ok > 1 ? std::sqrt(var / (ok - 1)) : 0.0;
    row.mean_solve_time = time_sum / ok;
    row.mean_iterations = iter_sum / ok;
    if (have_entropy) {
      row.mean_relative_entropy = entropy_sum / ok;
      row.mean_tail_fraction = tail_sum / ok;
    }
  }
  result.rows.push_back(row);
}

}  // namespace

SweepResult run_gamma_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = std::get<GammaSweep>(cfg.sweep);
  SweepResult result;
  for (double gamma : sweep.values) {
    run_series(cfg, cfg.base, ObjectiveKind::proposed_qp_gamma(gamma), gamma, nullptr, result);
  }
  return result;
}

SweepResult run_noise_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = std::get<NoiseSweep>(cfg.sweep);
  SweepResult result;
  for (double sigma : sweep.values) {
    GenConfig base = cfg.base;
    base.noise_std = sigma;
    for (const auto& objective : cfg.objectives)
      run_series(cfg, base, objective, sigma, nullptr, result);
  }
  return result;
}

SweepResult run_range_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = std::get<RangeSweep>(cfg.sweep);
  SweepResult result;
  for (double r : sweep.values) {
    GenConfig base = cfg.base;
    base.radio_range = r;
    for (const auto& objective : cfg.objectives)
      run_series(cfg, base, objective, r, nullptr, result);
  }
  return result;
}

SweepResult run_scale_sweep(const ExperimentConfig& cfg) {
  const auto& sweep = std::get<ScaleSweep>(cfg.sweep);
  SweepResult result;
  for (int n : sweep.values) {
    GenConfig base = cfg.base;
    base.n = n;
    for (const auto& objective : cfg.objectives)
      run_series(cfg, base, objective, static_cast<double>(n), nullptr, result);
  }
  return result;
}

SweepResult run_entropy_comparison(const ExperimentConfig& cfg) {
  const auto& params = std::get<EntropyComparison>(cfg.sweep);
  SweepResult result;
  for (const auto& objective : cfg.objectives)
    run_series(cfg, cfg.base, objective, 0.0, &params, result);
  return result;
}

SweepResult run_sweep(const ExperimentConfig& cfg) {
  if (std::holds_alternative<GammaSweep>(cfg.sweep)) return run_gamma_sweep(cfg);
  if (std::holds_alternative<NoiseSweep>(cfg.sweep)) return run_noise_sweep(cfg);
  if (std::holds_alternative<RangeSweep>(cfg.sweep)) return run_range_sweep(cfg);
  if (std::holds_alternative<ScaleSweep>(cfg.sweep)) return run_scale_sweep(cfg);
  return run_entropy_comparison(cfg);
}

std::string sweep_kind_name(const Sweep& sweep) {
  if (std::holds_alternative<GammaSweep>(sweep)) return "gamma";
  if (std::holds_alternative<NoiseSweep>(sweep)) return "noise";
  if (std::holds_alternative<RangeSweep>(sweep)) return "range";
  if (std::holds_alternative<ScaleSweep>(sweep)) return "scale";
  return "entropy";
}

namespace {

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt10(*v) : std::string(); }

}  // namespace

void write_aggregate_csv(const SweepResult& result, std::ostream& os) {
  os << "sweep_value,objective,mean_pe,std_pe,mean_solve_time,mean_iterations,"
        "mean_relative_entropy,mean_tail_fraction,networks_succeeded\n";
  for (const auto& row : result.rows) {
    os << fmt10(row.sweep_value) << ',' << row.objective << ','
       << (row.networks_succeeded > 0 ? fmt10(row.mean_pe) : std::string()) << ','
       << (row.networks_succeeded > 0 ? fmt10(row.std_pe) : std::string()) << ','
       << (row.networks_succeeded > 0 ? fmt10(row.mean_solve_time) : std::string()) << ','
       << (row.networks_succeeded > 0 ? fmt10(row.mean_iterations) : std::string()) << ','
       << fmt_opt(row.mean_relative_entropy) << ',' << fmt_opt(row.mean_tail_fraction) << ','
       << row.networks_succeeded << '\n';
  }
}

void write_network_csv(const SweepResult& result, std::ostream& os) {
  os << "sweep_value,objective,network_index,pe,solve_time,iterations,status,"
        "relative_entropy,tail_fraction\n";
  for (const auto& log : result.logs) {
    os << fmt10(log.sweep_value) << ',' << log.objective << ',' << log.network_index << ','
       << fmt_opt(log.pe) << ',' << fmt10(log.solve_time) << ',' << log.iterations << ','
       << log.status << ',' << fmt_opt(log.relative_entropy) << ','
       << fmt_opt(log.tail_fraction) << '\n';
  }
}

namespace {

Sweep default_sweep(const std::string& kind) {
  if (kind == "gamma") return GammaSweep{{1.0, 10.0, 100.0, 1000.0, 10000.0}};
  if (kind == "noise") return NoiseSweep{{0.02, 0.05, 0.1}};
  if (kind == "range") return RangeSweep{{0.2, 0.25, 0.3, 0.35}};
  if (kind == "scale") return ScaleSweep{{30, 50, 70}};
  if (kind == "entropy") return EntropyComparison{};
  throw FormatError("unknown sweep kind '" + kind + "'");
}

Sweep parse_sweep(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  Sweep sweep = default_sweep(kind);
  if (j.contains("values")) {
    if (kind == "gamma") std::get<GammaSweep>(sweep).values = j["values"].get<std::vector<double>>();
    if (kind == "noise") std::get<NoiseSweep>(sweep).values = j["values"].get<std::vector<double>>();
    if (kind == "range") std::get<RangeSweep>(sweep).values = j["values"].get<std::vector<double>>();
    if (kind == "scale") std::get<ScaleSweep>(sweep).values = j["values"].get<std::vector<int>>();
  }
  if (kind == "entropy") {
    auto& e = std::get<EntropyComparison>(sweep);
    if (j.contains("bin_width")) e.bin_width = j["bin_width"].get<double>();
    if (j.contains("sigma_ref")) e.sigma_ref = j["sigma_ref"].get<double>();
    if (j.contains("threshold")) e.threshold = j["threshold"].get<double>();
  }
  return sweep;
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path,
                                        const std::optional<std::string>& kind_override) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid config file: ") + e.what());
  }
  try {
    ExperimentConfig cfg;
    if (j.contains("num_networks")) cfg.num_networks = j["num_networks"].get<int>();
    if (cfg.num_networks < 1) throw FormatError("num_networks must be >= 1");
    if (j.contains("master_seed")) cfg.master_seed = j["master_seed"].get<std::uint64_t>();
    if (j.contains("record_timing")) cfg.record_timing = j["record_timing"].get<bool>();
    if (j.contains("base")) {
      const auto& b = j["base"];
      if (b.contains("n")) cfg.base.n = b["n"].get<int>();
      if (b.contains("m")) cfg.base.m = b["m"].get<int>();
      if (b.contains("radio_range")) cfg.base.radio_range = b["radio_range"].get<double>();
      if (b.contains("noise_std")) cfg.base.noise_std = b["noise_std"].get<double>();
      if (b.contains("noise_model"))
        cfg.base.noise_model = parse_noise_model(b["noise_model"].get<std::string>());
      if (b.contains("max_degree") && !b["max_degree"].is_null())
        cfg.base.max_degree = b["max_degree"].get<int>();
    }
    const double gamma = j.contains("gamma") ? j["gamma"].get<double>() : 100.0;
    if (j.contains("objectives")) {
      for (const auto& name : j["objectives"])
        cfg.objectives.push_back(parse_objective(name.get<std::string>(), gamma));
    } else {
      cfg.objectives = {ObjectiveKind::biswas_ye(), ObjectiveKind::least_squares(),
                        ObjectiveKind::proposed_qp()};
    }
    if (kind_override) {
      if (j.contains("sweep") && j["sweep"].contains("kind") &&
          j["sweep"]["kind"].get<std::string>() == *kind_override) {
        cfg.sweep = parse_sweep(j["sweep"]);
      } else {
        cfg.sweep = default_sweep(*kind_override);
      }
    } else if (j.contains("sweep")) {
      cfg.sweep = parse_sweep(j["sweep"]);
    } else {
      throw FormatError("config needs a sweep section or a kind override");
    }
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid config file: ") + e.what());
  }
}

void apply_quick_mode(ExperimentConfig& cfg) {
  cfg.num_networks = std::min(cfg.num_networks, 20);
  cfg.base.n = std::min(cfg.base.n, 60);
}

}  // namespace sdploc
