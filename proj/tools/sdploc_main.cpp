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
//
// Command line front end: instance generation, single-instance solving,
// estimate evaluation, experiment sweeps, and the qualitative scatter dump.
//
// Exit codes: 0 ok, 2 invalid flags/config, 3 empty measurement graph,
// 4 solver numerical failure, 5 suspected infeasible, 6 all sweep networks
// failed.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sdploc/errors.hpp"
#include "sdploc/experiments.hpp"
#include "sdploc/metrics.hpp"
#include "sdploc/models.hpp"
#include "sdploc/network.hpp"
#include "sdploc/solver.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitEmptyGraph = 3;
constexpr int kExitNumericalFailure = 4;
constexpr int kExitInfeasible = 5;
constexpr int kExitAllNetworksFailed = 6;

std::string fmt(double v, const char* format = "%.10g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

void write_positions_csv(const std::vector<sdploc::Point2>& pts, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sdploc::IoError("cannot open '" + path + "' for writing");
  out << "index,x,y\n";
  for (std::size_t i = 0; i < pts.size(); ++i)
    out << i << ',' << fmt(pts[i].x, "%.17g") << ',' << fmt(pts[i].y, "%.17g") << '\n';
}

void write_errors_csv(const sdploc::LocalizationModel& model, const std::vector<double>& errors,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw sdploc::IoError("cannot open '" + path + "' for writing");
  out << "edge_kind,i,j_or_k,error\n";
  for (std::size_t e = 0; e < errors.size(); ++e) {
    const auto& edge = model.edge_order[e];
    out << (edge.is_sensor_edge ? "sensor" : "anchor") << ',' << edge.i << ',' << edge.j_or_k
        << ',' << fmt(errors[e], "%.17g") << '\n';
  }
}

std::vector<sdploc::Point2> read_positions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw sdploc::IoError("cannot open '" + path + "' for reading");
  std::vector<sdploc::Point2> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string idx, xs, ys;
    if (!std::getline(ss, idx, ',') || !std::getline(ss, xs, ',') || !std::getline(ss, ys))
      throw sdploc::FormatError("positions CSV rows must be index,x,y");
    try {
      pts.push_back({std::stod(xs), std::stod(ys)});
    } catch (const std::exception&) {
      if (pts.empty() && idx == "index") continue;  // header
      throw sdploc::FormatError("cannot parse positions CSV line: " + line);
    }
  }
  return pts;
}

int run_gen(const sdploc::GenConfig& cfg, const std::string& out_path) {
  const sdploc::NetworkTruth truth = sdploc::generate_network(cfg);
  const sdploc::MeasurementGraph graph = sdploc::build_measurements(truth, cfg);
  sdploc::save_instance(truth, graph, out_path);
  std::cout << "v=" << graph.num_edges() << "\n";
  return kExitOk;
}

int run_solve(const std::string& in_path, const std::string& objective_name, double gamma,
              const sdploc::SolverSettings& settings, const std::string& out_positions,
              const std::string& out_errors) {
  using sdploc::SolveStatus;
  const sdploc::Instance inst = sdploc::load_instance(in_path);
  const sdploc::ObjectiveKind kind = sdploc::parse_objective(objective_name, gamma);
  const sdploc::LocalizationModel model =
      sdploc::build_model(kind, inst.graph, inst.truth.anchors);
  const sdploc::SolveResult result = sdploc::solve(model.program, settings);

  std::cout << "status=" << sdploc::status_name(result.status) << " gap=" << fmt(result.gap)
            << " res_primal=" << fmt(result.res_primal) << " res_dual=" << fmt(result.res_dual)
            << " iterations=" << result.iterations << " wall_time=" << fmt(result.wall_time)
            << " objective=" << fmt(result.primal_objective(model.program));

  if (result.status == SolveStatus::NumericalFailure) {
    std::cout << "\n";
    std::cerr << "solver failed: " << result.message << "\n";
    return kExitNumericalFailure;
  }
  if (result.status == SolveStatus::SuspectedInfeasible) {
    std::cout << "\n";
    std::cerr << "solver failed: " << result.message << "\n";
    return kExitInfeasible;
  }

  const sdploc::EstimatedPositions est = sdploc::extract_positions(model, result);
  const std::vector<double> errors = sdploc::extract_errors(model, result);
  if (!out_positions.empty()) write_positions_csv(est.x_hat, out_positions);
  if (!out_errors.empty()) write_errors_csv(model, errors, out_errors);
  if (inst.has_sensor_truth) {
    const sdploc::AccuracyReport report = sdploc::position_error(inst.truth, est);
    std::cout << " pe=" << fmt(report.pe);
  }
  std::cout << "\n";
  return kExitOk;
}

int run_eval(const std::string& truth_path, const std::string& estimate_path, double bin_width,
             double sigma_ref, double threshold, const std::string& out_histogram) {
  const sdploc::Instance inst = sdploc::load_instance(truth_path);
  const std::vector<sdploc::Point2> est_pts = read_positions_csv(estimate_path);
  if (static_cast<int>(est_pts.size()) != inst.graph.n)
    throw sdploc::LengthMismatchError("estimate has " + std::to_string(est_pts.size()) +
                                      " sensors but instance has " +
                                      std::to_string(inst.graph.n));

  // Signed squared-distance errors of the estimate: estimated squared edge
  // length minus measured squared distance.
  std::vector<double> errors;
  for (const auto& e : inst.graph.sensor_edges) {
    const double d = sdploc::distance(est_pts[e.i], est_pts[e.j]);
    errors.push_back(d * d - e.d_hat * e.d_hat);
  }
  for (const auto& e : inst.graph.anchor_edges) {
    const double d = sdploc::distance(est_pts[e.j], inst.truth.anchors[e.k]);
    errors.push_back(d * d - e.d_hat * e.d_hat);
  }
  if (errors.empty()) throw sdploc::EmptyGraphError("instance has no edges");

  const sdploc::ErrorHistogram hist = sdploc::histogram(errors, bin_width);
  const std::vector<double> q = sdploc::discretized_gaussian(hist, sigma_ref);
  const double d_bits = sdploc::relative_entropy(hist.probabilities, q);
  const double tail = sdploc::tail_fraction(errors, threshold);

  if (inst.has_sensor_truth) {
    sdploc::EstimatedPositions est;
    est.x_hat = est_pts;
    std::cout << "pe=" << fmt(sdploc::position_error(inst.truth, est).pe) << " ";
  }
  std::cout << "relative_entropy_bits=" << fmt(d_bits) << " tail_fraction=" << fmt(tail) << "\n";

  if (!out_histogram.empty()) {
    std::ofstream out(out_histogram);
    if (!out) throw sdploc::IoError("cannot open '" + out_histogram + "' for writing");
    sdploc::write_histogram_csv(hist, q, out);
  }
  return kExitOk;
}

int run_sweep_cmd(const std::string& kind, const std::string& config_path,
                  const std::string& out_dir, bool quick) {
  std::optional<std::string> kind_override;
  if (!kind.empty()) kind_override = kind;
  sdploc::ExperimentConfig cfg = sdploc::load_experiment_config(config_path, kind_override);
  if (quick) sdploc::apply_quick_mode(cfg);

  const sdploc::SweepResult result = sdploc::run_sweep(cfg);

  std::filesystem::create_directories(out_dir);
  const std::string kind_name = sdploc::sweep_kind_name(cfg.sweep);
  const std::string agg_path = out_dir + "/" + kind_name + "_aggregate.csv";
  const std::string net_path = out_dir + "/" + kind_name + "_networks.csv";
  {
    std::ofstream agg(agg_path);
    if (!agg) throw sdploc::IoError("cannot open '" + agg_path + "'");
    sdploc::write_aggregate_csv(result, agg);
    std::ofstream net(net_path);
    if (!net) throw sdploc::IoError("cannot open '" + net_path + "'");
    sdploc::write_network_csv(result, net);
  }

  int succeeded = 0, total = 0;
  for (const auto& row : result.rows) {
    succeeded += row.networks_succeeded;
    total += row.num_networks;
    std::cout << kind_name << " value=" << fmt(row.sweep_value) << " objective=" << row.objective
              << " mean_pe=" << (row.networks_succeeded ? fmt(row.mean_pe) : "n/a")
              << " networks=" << row.networks_succeeded << "/" << row.num_networks << "\n";
  }
  std::cout << "wrote " << agg_path << " and " << net_path << "\n";
  if (total > 0 && succeeded == 0) {
    std::cerr << "all networks failed\n";
    return kExitAllNetworksFailed;
  }
  return kExitOk;
}

int run_dump_fig9(std::uint64_t seed, const std::string& out_path, double gamma) {
  // Qualitative scatter setup: 20 sensors, 5 anchors, r = 0.4, sigma = 0.01.
  sdploc::GenConfig cfg;
  cfg.n = 20;
  cfg.m = 5;
  cfg.radio_range = 0.4;
  cfg.noise_std = 0.01;
  cfg.seed = seed;
  const sdploc::NetworkTruth truth = sdploc::generate_network(cfg);
  const sdploc::MeasurementGraph graph = sdploc::build_measurements(truth, cfg);

  std::ofstream out(out_path);
  if (!out) throw sdploc::IoError("cannot open '" + out_path + "' for writing");
  out << "objective,index,true_x,true_y,est_x,est_y\n";
  for (std::size_t k = 0; k < truth.anchors.size(); ++k) {
    out << "anchor," << k << ',' << fmt(truth.anchors[k].x, "%.17g") << ','
        << fmt(truth.anchors[k].y, "%.17g") << ',' << fmt(truth.anchors[k].x, "%.17g") << ','
        << fmt(truth.anchors[k].y, "%.17g") << '\n';
  }
  const std::vector<sdploc::ObjectiveKind> kinds = {
      sdploc::ObjectiveKind::biswas_ye(), sdploc::ObjectiveKind::least_squares(),
      sdploc::ObjectiveKind::proposed_qp(), sdploc::ObjectiveKind::proposed_qp_gamma(gamma)};
  for (const auto& kind : kinds) {
    const sdploc::LocalizationModel model = sdploc::build_model(kind, graph, truth.anchors);
    const sdploc::SolveResult result = sdploc::solve(model.program);
    if (result.status != sdploc::SolveStatus::Optimal) {
      std::cerr << kind.name() << " did not converge: " << result.message << "\n";
      continue;
    }
    const sdploc::EstimatedPositions est = sdploc::extract_positions(model, result);
    for (int i = 0; i < model.n; ++i) {
      out << kind.name() << ',' << i << ',' << fmt(truth.sensors[i].x, "%.17g") << ','
          << fmt(truth.sensors[i].y, "%.17g") << ',' << fmt(est.x_hat[i].x, "%.17g") << ','
          << fmt(est.x_hat[i].y, "%.17g") << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SDP-relaxation localization toolkit"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a random instance file");
  sdploc::GenConfig gen_cfg;
  std::string gen_noise_model = "additive";
  int gen_max_degree = 0;
  std::string gen_out;
  std::uint64_t gen_seed = 0;
  gen->add_option("--sensors", gen_cfg.n, "number of sensors")->default_val(80);
  gen->add_option("--anchors", gen_cfg.m, "number of anchors")->default_val(5);
  gen->add_option("--radio-range", gen_cfg.radio_range, "connectivity radius")->default_val(0.25);
  gen->add_option("--noise-std", gen_cfg.noise_std, "measurement noise std")->default_val(0.05);
  gen->add_option("--noise-model", gen_noise_model, "additive|multiplicative")
      ->default_val("additive");
  gen->add_option("--max-degree", gen_max_degree, "sensor-to-sensor degree cap (0 = none)")
      ->default_val(0);
  gen->add_option("--seed", gen_seed, "RNG seed")->default_val(0);
  gen->add_option("--out", gen_out, "output instance path")->required();

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "solve one instance");
  std::string solve_in, solve_objective = "qp", solve_out_positions, solve_out_errors;
  double solve_gamma = 0.0;
  sdploc::SolverSettings solve_settings;
  solve_cmd->add_option("--in", solve_in, "instance path")->required();
  solve_cmd->add_option("--objective", solve_objective, "biswas-ye|ls|qp|qp-gamma")
      ->default_val("qp");
  solve_cmd->add_option("--gamma", solve_gamma, "regularization coefficient (qp-gamma)");
  solve_cmd->add_option("--tol-gap", solve_settings.tol_gap, "relative gap tolerance")
      ->default_val(1e-7);
  solve_cmd->add_option("--max-iters", solve_settings.max_iters, "iteration cap")
      ->default_val(100);
  solve_cmd->add_option("--out-positions", solve_out_positions, "positions CSV path");
  solve_cmd->add_option("--out-errors", solve_out_errors, "errors CSV path");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate an estimate against an instance");
  std::string eval_truth, eval_estimate, eval_hist = "histogram.csv";
  double eval_bin_width = 0.0049, eval_sigma_ref = 0.008, eval_threshold = 0.022;
  eval_cmd->add_option("--truth", eval_truth, "instance path (with measurements)")->required();
  eval_cmd->add_option("--estimate", eval_estimate, "positions CSV path")->required();
  eval_cmd->add_option("--bin-width", eval_bin_width, "histogram bin width")->default_val(0.0049);
  eval_cmd->add_option("--sigma-ref", eval_sigma_ref, "reference Gaussian std")
      ->default_val(0.008);
  eval_cmd->add_option("--threshold", eval_threshold, "tail threshold")->default_val(0.022);
  eval_cmd->add_option("--out-histogram", eval_hist, "histogram CSV path")
      ->default_val("histogram.csv");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run an experiment sweep");
  std::string sweep_kind, sweep_config, sweep_out_dir = ".";
  bool sweep_quick = false;
  sweep_cmd->add_option("--kind", sweep_kind, "gamma|noise|range|scale|entropy");
  sweep_cmd->add_option("--config", sweep_config, "experiment config JSON")->required();
  sweep_cmd->add_option("--out-dir", sweep_out_dir, "output directory")->default_val(".");
  sweep_cmd->add_flag("--quick", sweep_quick, "desk-scale defaults (<=20 networks, n<=60)");

  // dump-fig9
  auto* fig9 = app.add_subcommand("dump-fig9", "dump the qualitative scatter data");
  std::uint64_t fig9_seed = 0;
  std::string fig9_out = "fig9.csv";
  double fig9_gamma = 1000.0;
  fig9->add_option("--seed", fig9_seed, "RNG seed")->default_val(0);
  fig9->add_option("--out", fig9_out, "output CSV path")->default_val("fig9.csv");
  fig9->add_option("--gamma", fig9_gamma, "gamma for the qp-gamma column")->default_val(1000.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen->parsed()) {
      gen_cfg.noise_model = sdploc::parse_noise_model(gen_noise_model);
      gen_cfg.seed = gen_seed;
      if (gen_max_degree > 0) gen_cfg.max_degree = gen_max_degree;
      return run_gen(gen_cfg, gen_out);
    }
    if (solve_cmd->parsed()) {
      if (solve_objective == "qp-gamma" && !(solve_gamma > 0.0)) {
        std::cerr << "--objective qp-gamma requires --gamma > 0\n";
        return kExitUsage;
      }
      return run_solve(solve_in, solve_objective, solve_gamma, solve_settings,
                       solve_out_positions, solve_out_errors);
    }
    if (eval_cmd->parsed())
      return run_eval(eval_truth, eval_estimate, eval_bin_width, eval_sigma_ref, eval_threshold,
                      eval_hist);
    if (sweep_cmd->parsed())
      return run_sweep_cmd(sweep_kind, sweep_config, sweep_out_dir, sweep_quick);
    if (fig9->parsed()) return run_dump_fig9(fig9_seed, fig9_out, fig9_gamma);
  } catch (const sdploc::EmptyGraphError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitEmptyGraph;
  } catch (const sdploc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
