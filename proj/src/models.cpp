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

#include "sdploc/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "sdploc/errors.hpp"
#include "sdploc/svec.hpp"

namespace sdploc {

namespace {

// Objective weight on the split of the free mean-sum variable sum(alpha) =
// w+ - w-. Restores strict dual feasibility (otherwise the two dual slots are
// pinned to zero) and keeps the split pair bounded along the central path;
// the induced bias on the solution is O(eps / v).
inline double split_regularization(int v) { return 1e-5 * (1.0 + v); }

std::vector<EdgeRef> canonical_edges(const MeasurementGraph& g) {
  std::vector<EdgeRef> edges;
  edges.reserve(g.num_edges());
  for (const auto& e : g.sensor_edges) edges.push_back({true, e.i, e.j, e.d_hat});
  for (const auto& e : g.anchor_edges) edges.push_back({false, e.j, e.k, e.d_hat});
  return edges;
}

// Coefficients of the quadratic form u' Z u on svec(Z) slots, where u is
// (0; e_i - e_j) for a sensor edge and (a_k; -e_j) for an anchor edge.
// Off-diagonal slots store sqrt(2) Z_ij, so a weight q on Z_ij (counting both
// symmetric entries) contributes q / sqrt(2) * ... i.e. coefficient
// 2 q_half / sqrt(2) on the slot.
std::vector<std::pair<int, double>> quadform_coeffs(const EdgeRef& e,
                                                    const std::vector<Point2>& anchors) {
  std::vector<std::pair<int, double>> c;
  if (e.is_sensor_edge) {
    const int a = 2 + e.i, b = 2 + e.j_or_k;
    c.emplace_back(svec_index(a, a), 1.0);
    c.emplace_back(svec_index(b, b), 1.0);
    c.emplace_back(svec_index(a, b), -kSqrt2);
  } else {
    const Point2& a = anchors[e.j_or_k];
    const int p = 2 + e.i;
    if (a.x != 0.0) c.emplace_back(svec_index(0, 0), a.x * a.x);
    if (a.y != 0.0) c.emplace_back(svec_index(1, 1), a.y * a.y);
    if (a.x * a.y != 0.0) c.emplace_back(svec_index(0, 1), kSqrt2 * a.x * a.y);
    if (a.x != 0.0) c.emplace_back(svec_index(0, p), -kSqrt2 * a.x);
    if (a.y != 0.0) c.emplace_back(svec_index(1, p), -kSqrt2 * a.y);
    c.emplace_back(svec_index(p, p), 1.0);
  }
  std::sort(c.begin(), c.end());
  return c;
}

double quadform_value(const EdgeRef& e, const std::vector<Point2>& anchors,
                      const Eigen::MatrixXd& Z) {
  if (e.is_sensor_edge) {
    const int a = 2 + e.i, b = 2 + e.j_or_k;
    return Z(a, a) + Z(b, b) - 2.0 * Z(a, b);
  }
  const Point2& a = anchors[e.j_or_k];
  const int p = 2 + e.i;
  return a.x * a.x * Z(0, 0) + a.y * a.y * Z(1, 1) + 2.0 * a.x * a.y * Z(0, 1) -
         2.0 * a.x * Z(0, p) - 2.0 * a.y * Z(1, p) + Z(p, p);
}

void require_graph(const MeasurementGraph& g, const std::vector<Point2>& anchors) {
  if (g.num_edges() < 1) throw EmptyGraphError("localization model needs at least one edge");
  if (static_cast<int>(anchors.size()) != g.m)
    throw std::invalid_argument("anchor coordinate count does not match graph");
}

// Shared skeleton: Z block plus the three rows pinning the top-left 2x2 of Z
// to the identity.
LocalizationModel begin_model(const ObjectiveKind& kind, const MeasurementGraph& g,
                              const std::vector<Point2>& anchors) {
  LocalizationModel model;
  model.kind = kind;
  model.n = g.n;
  model.m = g.m;
  model.v = g.num_edges();
  model.anchors = anchors;
  model.edge_order = canonical_edges(g);
  model.z_block = model.program.append_block(ConeBlock::psd(g.n + 2), "Z");

  SparseRow r00;
  r00.add(svec_index(0, 0), 1.0);
  r00.rhs = 1.0;
  SparseRow r11;
  r11.add(svec_index(1, 1), 1.0);
  r11.rhs = 1.0;
  SparseRow r01;  // slot stores sqrt(2) Z01; pin it to zero
  r01.add(svec_index(0, 1), 1.0);
  r01.rhs = 0.0;
  model.program.rows.push_back(r00);
  model.program.rows.push_back(r11);
  model.program.rows.push_back(r01);
  return model;
}

// Appends the lower-bound rows "quadform >= r^2" for every unconnected pair,
// one nonnegative slack each.
void append_range_lower_bounds(LocalizationModel& model, const MeasurementGraph& g) {
  std::vector<std::pair<bool, std::pair<int, int>>> missing;
  std::vector<std::vector<bool>> has_ss(g.n, std::vector<bool>(g.n, false));
  for (const auto& e : g.sensor_edges) has_ss[e.i][e.j] = true;
  std::vector<std::vector<bool>> has_sa(g.n, std::vector<bool>(std::max(1, g.m), false));
  for (const auto& e : g.anchor_edges) has_sa[e.j][e.k] = true;
  for (int i = 0; i < g.n; ++i)
    for (int j = i + 1; j < g.n; ++j)
      if (!has_ss[i][j]) missing.push_back({true, {i, j}});
  for (int j = 0; j < g.n; ++j)
    for (int k = 0; k < g.m; ++k)
      if (!has_sa[j][k]) missing.push_back({false, {j, k}});
  if (missing.empty()) return;

  const IndexRange slacks = model.program.append_block(
      ConeBlock::nonneg(static_cast<int>(missing.size())), "range_slack");
  const double r2 = g.radio_range * g.radio_range;
  for (std::size_t t = 0; t < missing.size(); ++t) {
    EdgeRef e{missing[t].first, missing[t].second.first, missing[t].second.second, 0.0};
    SparseRow row;
    row.entries = quadform_coeffs(e, model.anchors);
    row.add(slacks.begin + static_cast<int>(t), -1.0);
    row.rhs = r2;
    model.program.rows.push_back(row);
  }
}

void finish_objective(LocalizationModel& model, const Eigen::VectorXd& c) {
  model.program.objective = c;
}

}  // namespace

std::string ObjectiveKind::name() const {
  switch (tag) {
    case Tag::BiswasYe: return "biswas-ye";
    case Tag::LeastSquares: return "ls";
    case Tag::ProposedQp: return "qp";
    case Tag::ProposedQpGamma: return "qp-gamma";
  }
  return "unknown";
}

ObjectiveKind parse_objective(const std::string& name, double gamma) {
  if (name == "biswas-ye") return ObjectiveKind::biswas_ye();
  if (name == "ls") return ObjectiveKind::least_squares();
  if (name == "qp") return ObjectiveKind::proposed_qp();
  if (name == "qp-gamma") {
    if (!(gamma > 0.0)) throw std::invalid_argument("qp-gamma requires gamma > 0");
    return ObjectiveKind::proposed_qp_gamma(gamma);
  }
  throw std::invalid_argument("unknown objective '" + name + "'");
}

LocalizationModel build_biswas_ye(const MeasurementGraph& g, const std::vector<Point2>& anchors,
                                  const ModelOptions& opts) {
  require_graph(g, anchors);
  LocalizationModel model = begin_model(ObjectiveKind::biswas_ye(), g, anchors);
  const int v = model.v;
  const IndexRange alpha = model.program.append_block(ConeBlock::nonneg(2 * v), "alpha");
  model.alpha_plus.resize(v);
  model.alpha_minus.resize(v);
  for (int e = 0; e < v; ++e) {
    model.alpha_plus[e] = alpha.begin + e;
    model.alpha_minus[e] = alpha.begin + v + e;
  }
  for (int e = 0; e < v; ++e) {
    SparseRow row;
    row.entries = quadform_coeffs(model.edge_order[e], anchors);
    row.add(model.alpha_plus[e], -1.0);
    row.add(model.alpha_minus[e], 1.0);
    row.rhs = model.edge_order[e].d_hat * model.edge_order[e].d_hat;
    model.program.rows.push_back(row);
  }
  if (opts.include_range_lower_bounds) append_range_lower_bounds(model, g);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(model.program.num_vars);
  c.segment(alpha.begin, 2 * v).setOnes();
  finish_objective(model, c);
  return model;
}

LocalizationModel build_least_squares(const MeasurementGraph& g,
                                      const std::vector<Point2>& anchors,
                                      const ModelOptions& opts) {
  require_graph(g, anchors);
  LocalizationModel model = begin_model(ObjectiveKind::least_squares(), g, anchors);
  const int v = model.v;
  const IndexRange soc = model.program.append_block(ConeBlock::second_order(v + 1), "soc_ls");
  model.ls_head = soc.begin;
  model.error_slots.resize(v);
  for (int e = 0; e < v; ++e) model.error_slots[e] = soc.begin + 1 + e;
  for (int e = 0; e < v; ++e) {
    SparseRow row;
    row.entries = quadform_coeffs(model.edge_order[e], anchors);
    row.add(model.error_slots[e], -1.0);
    row.rhs = model.edge_order[e].d_hat * model.edge_order[e].d_hat;
    model.program.rows.push_back(row);
  }
  if (opts.include_range_lower_bounds) append_range_lower_bounds(model, g);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(model.program.num_vars);
  c[model.ls_head] = 1.0;
  finish_objective(model, c);
  return model;
}

namespace {

// Shared construction for the two quadratic variants. The first SOC tail
// carries alpha_e + shift, where shift is the scalar mean w (canonical) or
// the constant 1/(2 gamma); the second carries alpha_e - v w. Squares of the
// SOC heads are bounded by t1, t2 through 2x2 PSD epigraph blocks.
// The free scalar sum(alpha) = v w is split into w+ - w-; the scaled form
// keeps every coefficient on the split pair at most 1.
LocalizationModel build_qp_common(const ObjectiveKind& kind, const MeasurementGraph& g,
                                  const std::vector<Point2>& anchors, const ModelOptions& opts) {
  require_graph(g, anchors);
  LocalizationModel model = begin_model(kind, g, anchors);
  const int v = model.v;
  const bool canonical = kind.tag == ObjectiveKind::Tag::ProposedQp;
  const double shift = canonical ? 0.0 : 1.0 / (2.0 * kind.gamma);

  const IndexRange w = model.program.append_block(ConeBlock::nonneg(2), "w");
  model.w_plus = w.begin;
  model.w_minus = w.begin + 1;
  const IndexRange soc1 = model.program.append_block(ConeBlock::second_order(v + 1), "soc1");
  const IndexRange soc2 = model.program.append_block(ConeBlock::second_order(v + 1), "soc2");
  const IndexRange epi1 = model.program.append_block(ConeBlock::psd(2), "epi1");
  const IndexRange epi2 = model.program.append_block(ConeBlock::psd(2), "epi2");
  model.aux.s1 = soc1.begin;
  model.aux.s2 = soc2.begin;
  model.aux.t1 = epi1.begin + svec_index(1, 1);
  model.aux.t2 = epi2.begin + svec_index(1, 1);
  model.error_slots.resize(v);
  for (int e = 0; e < v; ++e) model.error_slots[e] = soc1.begin + 1 + e;
  model.error_shift_by_w = canonical;
  model.error_shift_const = shift;

  double rhs_sum = 0.0;
  std::map<int, double> sum_coeffs;  // quadforms accumulated over all edges

  for (int e = 0; e < v; ++e) {
    const auto& edge = model.edge_order[e];
    const double d2 = edge.d_hat * edge.d_hat;
    const auto qf = quadform_coeffs(edge, anchors);
    for (const auto& [slot, coeff] : qf) sum_coeffs[slot] += coeff;
    rhs_sum += d2;

    // q1_e = alpha_e + shift-term, with w = (w+ - w-) / v
    SparseRow row1;
    row1.entries = qf;
    if (canonical) {
      row1.add(model.w_plus, 1.0 / v);
      row1.add(model.w_minus, -1.0 / v);
      row1.rhs = d2;
    } else {
      row1.rhs = d2 - shift;
    }
    row1.add(soc1.begin + 1 + e, -1.0);
    std::sort(row1.entries.begin(), row1.entries.end());
    model.program.rows.push_back(row1);

    // q2_e = alpha_e - v w = alpha_e - (w+ - w-)
    SparseRow row2;
    row2.entries = qf;
    row2.add(model.w_plus, -1.0);
    row2.add(model.w_minus, 1.0);
    row2.add(soc2.begin + 1 + e, -1.0);
    row2.rhs = d2;
    std::sort(row2.entries.begin(), row2.entries.end());
    model.program.rows.push_back(row2);
  }

  // w+ - w- = sum(alpha): sum of quadforms - (w+ - w-) = sum d^2
  SparseRow wdef;
  for (const auto& [slot, coeff] : sum_coeffs) wdef.add(slot, coeff);
  wdef.add(model.w_plus, -1.0);
  wdef.add(model.w_minus, 1.0);
  wdef.rhs = rhs_sum;
  std::sort(wdef.entries.begin(), wdef.entries.end());
  model.program.rows.push_back(wdef);

  // [1, s; s, t] >= 0 pins and head links for both epigraphs.
  for (const auto& [epi, head] :
       {std::pair{epi1, soc1.begin}, std::pair{epi2, soc2.begin}}) {
    SparseRow pin;
    pin.add(epi.begin + svec_index(0, 0), 1.0);
    pin.rhs = 1.0;
    model.program.rows.push_back(pin);
    SparseRow link;  // slot holds sqrt(2) P01; force P01 = head
    link.add(epi.begin + svec_index(0, 1), 1.0 / kSqrt2);
    link.add(head, -1.0);
    link.rhs = 0.0;
    std::sort(link.entries.begin(), link.entries.end());
    model.program.rows.push_back(link);
  }

  if (opts.include_range_lower_bounds) append_range_lower_bounds(model, g);

  Eigen::VectorXd c = Eigen::VectorXd::Zero(model.program.num_vars);
  c[model.aux.t1] = static_cast<double>(v);
  c[model.aux.t2] = 1.0;
  c[model.w_plus] = split_regularization(v);
  c[model.w_minus] = split_regularization(v);
  finish_objective(model, c);
  return model;
}

}  // namespace

LocalizationModel build_proposed_qp(const MeasurementGraph& g, const std::vector<Point2>& anchors,
                                    const ModelOptions& opts) {
  return build_qp_common(ObjectiveKind::proposed_qp(), g, anchors, opts);
}

LocalizationModel build_proposed_qp_gamma(const MeasurementGraph& g,
                                          const std::vector<Point2>& anchors, double gamma,
                                          const ModelOptions& opts) {
  if (!(gamma > 0.0)) throw std::invalid_argument("build_proposed_qp_gamma: gamma must be > 0");
  return build_qp_common(ObjectiveKind::proposed_qp_gamma(gamma), g, anchors, opts);
}

LocalizationModel build_model(const ObjectiveKind& kind, const MeasurementGraph& g,
                              const std::vector<Point2>& anchors, const ModelOptions& opts) {
  switch (kind.tag) {
    case ObjectiveKind::Tag::BiswasYe: return build_biswas_ye(g, anchors, opts);
    case ObjectiveKind::Tag::LeastSquares: return build_least_squares(g, anchors, opts);
    case ObjectiveKind::Tag::ProposedQp: return build_proposed_qp(g, anchors, opts);
    case ObjectiveKind::Tag::ProposedQpGamma:
      return build_proposed_qp_gamma(g, anchors, kind.gamma, opts);
  }
  throw std::invalid_argument("build_model: unknown objective kind");
}

namespace {

void require_usable(const SolveResult& result) {
  if (result.status == SolveStatus::Optimal || result.status == SolveStatus::MaxIterations) return;
  throw BadStatusError("cannot extract from solve with status " + status_name(result.status));
}

}  // namespace

EstimatedPositions extract_positions(const LocalizationModel& model, const SolveResult& result) {
  require_usable(result);
  const Eigen::MatrixXd Z =
      smat(result.x.segment(model.z_block.begin, model.z_block.size()));
  EstimatedPositions est;
  est.x_hat.resize(model.n);
  for (int i = 0; i < model.n; ++i) est.x_hat[i] = {Z(0, 2 + i), Z(1, 2 + i)};
  est.y_block = Z.bottomRightCorner(model.n, model.n);
  return est;
}

std::vector<double> extract_errors(const LocalizationModel& model, const SolveResult& result) {
  require_usable(result);
  const Eigen::MatrixXd Z =
      smat(result.x.segment(model.z_block.begin, model.z_block.size()));

  std::vector<double> errors(model.v);
  for (int e = 0; e < model.v; ++e) {
    double alpha_based;
    if (model.kind.tag == ObjectiveKind::Tag::BiswasYe) {
      alpha_based = result.x[model.alpha_plus[e]] - result.x[model.alpha_minus[e]];
    } else {
      alpha_based = result.x[model.error_slots[e]] - model.error_shift_const;
      if (model.error_shift_by_w)
        alpha_based -= (result.x[model.w_plus] - result.x[model.w_minus]) / model.v;
    }
    errors[e] = alpha_based;
  }

  // Cross-check against Z: both sides of the same equality row, so they can
  // disagree only by the achieved primal residual.
  double b_norm = 0.0;
  for (const auto& row : model.program.rows) b_norm += row.rhs * row.rhs;
  b_norm = std::sqrt(b_norm);
  const double tol = 10.0 * std::max(1e-7, result.res_primal) * (1.0 + b_norm);
  for (int e = 0; e < model.v; ++e) {
    const auto& edge = model.edge_order[e];
    const double z_based =
        quadform_value(edge, model.anchors, Z) - edge.d_hat * edge.d_hat;
    if (std::abs(z_based - errors[e]) > tol)
      throw Error("extract_errors: carrier and Z-based errors disagree on edge " +
                  std::to_string(e));
  }
  return errors;
}

}  // namespace sdploc
