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

#ifndef SDPLOC_MODELS_HPP_
#define SDPLOC_MODELS_HPP_

#include <string>
#include <vector>

#include "sdploc/cone_program.hpp"
#include "sdploc/network.hpp"
#include "sdploc/solver.hpp"

namespace sdploc {

// The four localization objectives. All share the same lifted variable
// Z = [I2 X; X' Y] >= 0 with the top-left block pinned to the identity and
// one equality row per measurement edge; they differ in how the signed
// squared-distance errors alpha_e enter the objective:
//   BiswasYe:        minimize sum(alpha+ + alpha-)        (l1)
//   LeastSquares:    minimize ||alpha||                   (same minimizers as ||alpha||^2)
//   ProposedQp:      minimize v*t1 + t2 with t1 >= ||alpha + w||^2,
//                    t2 >= ||alpha - v w||^2, w = mean(alpha)
//   ProposedQpGamma: as ProposedQp but the first shift is 1/(2 gamma)
struct ObjectiveKind {
  enum class Tag { BiswasYe, LeastSquares, ProposedQp, ProposedQpGamma };
  Tag tag = Tag::BiswasYe;
  double gamma = 0.0;  // ProposedQpGamma only, > 0

  static ObjectiveKind biswas_ye() { return {Tag::BiswasYe, 0.0}; }
  static ObjectiveKind least_squares() { return {Tag::LeastSquares, 0.0}; }
  static ObjectiveKind proposed_qp() { return {Tag::ProposedQp, 0.0}; }
  static ObjectiveKind proposed_qp_gamma(double gamma) { return {Tag::ProposedQpGamma, gamma}; }

  std::string name() const;
};

ObjectiveKind parse_objective(const std::string& name, double gamma);

struct ModelOptions {
  // Adds the >= r^2 rows (with nonnegative slacks) for every unconnected
  // pair. Off by default: the baseline model drops them to stay small.
  bool include_range_lower_bounds = false;
};

struct EdgeRef {
  bool is_sensor_edge = true;
  int i = 0;       // sensor index (first endpoint)
  int j_or_k = 0;  // other sensor, or anchor index
  double d_hat = 0.0;
};

struct LocalizationModel {
  ConeProgram program;
  ObjectiveKind kind;
  int n = 0;  // sensors
  int m = 0;  // anchors
  int v = 0;  // measurement edges
  IndexRange z_block;  // svec'd PSD matrix of side n + 2

  // Per-edge error carriers. Biswas-Ye keeps explicit slack pairs; the other
  // objectives carry alpha_e (plus a known shift) inside a cone block.
  std::vector<int> alpha_plus, alpha_minus;  // Biswas-Ye
  std::vector<int> error_slots;              // LeastSquares / ProposedQp*
  double error_shift_const = 0.0;            // ProposedQpGamma: 1/(2 gamma)
  bool error_shift_by_w = false;             // ProposedQp: subtract w
  int w_plus = -1, w_minus = -1;             // split of the free mean variable

  struct Aux {
    int s1 = -1, s2 = -1;  // SOC heads
    int t1 = -1, t2 = -1;  // epigraph diagonal slots
  } aux;
  int ls_head = -1;  // LeastSquares norm bound

  std::vector<EdgeRef> edge_order;  // N_s edges then N_a edges
  std::vector<Point2> anchors;

  int psd_side() const { return n + 2; }
};

// Anchor coordinates are known model data and are passed alongside the graph.
LocalizationModel build_biswas_ye(const MeasurementGraph& g, const std::vector<Point2>& anchors,
                                  const ModelOptions& opts = {});
LocalizationModel build_least_squares(const MeasurementGraph& g,
                                      const std::vector<Point2>& anchors,
                                      const ModelOptions& opts = {});
LocalizationModel build_proposed_qp(const MeasurementGraph& g, const std::vector<Point2>& anchors,
                                    const ModelOptions& opts = {});
LocalizationModel build_proposed_qp_gamma(const MeasurementGraph& g,
                                          const std::vector<Point2>& anchors, double gamma,
                                          const ModelOptions& opts = {});
LocalizationModel build_model(const ObjectiveKind& kind, const MeasurementGraph& g,
                              const std::vector<Point2>& anchors, const ModelOptions& opts = {});

struct EstimatedPositions {
  std::vector<Point2> x_hat;
  Eigen::MatrixXd y_block;  // the n x n Gram part of Z, kept for diagnostics
};

// Reads the estimate out of the lifted matrix. Requires Optimal or
// MaxIterations; throws BadStatusError otherwise.
EstimatedPositions extract_positions(const LocalizationModel& model, const SolveResult& result);

// Signed squared-distance errors in edge order. Each error is recomputed
// from Z (quadratic form minus d_hat^2) and checked against the carrier
// variables; disagreement beyond the residual-scaled bound throws.
std::vector<double> extract_errors(const LocalizationModel& model, const SolveResult& result);

}  // namespace sdploc

#endif  // SDPLOC_MODELS_HPP_
