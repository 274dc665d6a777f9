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

#ifndef SDPLOC_SOLVER_HPP_
#define SDPLOC_SOLVER_HPP_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "sdploc/cone_program.hpp"

namespace sdploc {

struct SolverSettings {
  double tol_gap = 1e-7;       // relative duality-gap tolerance
  double tol_feas = 1e-7;      // relative primal/dual residual tolerance
  int max_iters = 100;
  double step_fraction = 0.98; // fraction-to-boundary damping
  bool predictor_corrector = true;
  bool record_trace = false;   // keep per-iteration stats in the result
};

enum class SolveStatus { Optimal, MaxIterations, NumericalFailure, SuspectedInfeasible };

std::string status_name(SolveStatus status);

// Per-iteration scalars, recorded when SolverSettings.record_trace is set.
struct IterateStats {
  double mu = 0.0;        // <x, z> / barrier degree
  double pres = 0.0;      // relative primal residual
  double dres = 0.0;      // relative dual residual
  double relgap = 0.0;    // <x, z> / (1 + |pobj| + |dobj|)
  double pobj = 0.0;
  double dobj = 0.0;
  double step_primal = 0.0;
  double step_dual = 0.0;
  double min_margin_x = 0.0;  // distance of x from its cone boundary
  double min_margin_z = 0.0;
  double rp_norm = 0.0;   // ||b - A x||
  double rd_norm = 0.0;   // ||c - A'y - z||
  double x_norm = 0.0;
  double y_norm = 0.0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::NumericalFailure;
  Eigen::VectorXd x;  // primal iterate
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // dual cone iterate
  double gap = 0.0;        // final relative duality gap
  double res_primal = 0.0;
  double res_dual = 0.0;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
  std::string message;
  std::vector<IterateStats> trace;

  double primal_objective(const ConeProgram& p) const { return p.objective.dot(x); }
};

// Primal-dual path-following interior-point method with Nesterov-Todd
// scaling on every block and optional Mehrotra predictor-corrector.
// Search directions come from dense normal equations A H A' dy = r.
// Throws std::invalid_argument if validate(p) is nonempty; rank-deficient
// equality rows surface as NumericalFailure, not undefined behavior.
SolveResult solve(const ConeProgram& p, const SolverSettings& settings = {});

}  // namespace sdploc

#endif  // SDPLOC_SOLVER_HPP_
