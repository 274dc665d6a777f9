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
// Primal-dual path-following interior-point solver over products of
// nonnegative, second-order and PSD cone blocks. Nesterov-Todd scaling is
// used uniformly; search directions come from the dense normal equations
// (A H A') dy = r with H = W'W applied blockwise. The scaled complementarity
// linearization is lambda o (W^{-T} dx + W dz) = d, so
//   dx = W'(ds) - H dz,   dz = rd - A' dy,
//   (A H A') dy = rp - A W' ds + A H rd.

#include "sdploc/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "sdploc/svec.hpp"

namespace sdploc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BlockLayout {
  ConeBlock block;
  int begin = 0;
  int slots = 0;
};

// ---------------------------------------------------------------------------
// Per-block Nesterov-Todd scaling state.
// ---------------------------------------------------------------------------

struct Scaling {
  // NonNeg: h = x/z (diagonal of H), lambda = sqrt(x .* z)
  Eigen::VectorXd h;
  // SecondOrder: W = sqrt(eta) * M(wbar), H = eta (2 wbar wbar' - J)
  double eta = 0.0;
  Eigen::VectorXd wbar;
  // Psd: R R' Z R R' = X, lambda matrix = diag(sigma), T = R R'
  Eigen::MatrixXd R, Rinv, T;
  Eigen::VectorXd sigma;

  Eigen::VectorXd lambda;  // scaled point in slot space, all kinds
};

Eigen::MatrixXd smat_seg(const Eigen::Ref<const Eigen::VectorXd>& v, int side) {
  Eigen::MatrixXd M(side, side);
  int slot = 0;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double val = i == j ? v[slot] : v[slot] / kSqrt2;
      M(i, j) = val;
      M(j, i) = val;
      ++slot;
    }
  }
  return M;
}

void svec_into(const Eigen::MatrixXd& M, Eigen::Ref<Eigen::VectorXd> out) {
  const int side = static_cast<int>(M.rows());
  int slot = 0;
  for (int j = 0; j < side; ++j) {
    for (int i = 0; i <= j; ++i) {
      out[slot++] = i == j ? M(i, j) : kSqrt2 * 0.5 * (M(i, j) + M(j, i));
    }
  }
}

// M(w) v for the second-order cone, M(w) = [w0 w1'; w1 I + w1 w1'/(1+w0)].
void soc_arrow_apply(const Eigen::VectorXd& w, const Eigen::Ref<const Eigen::VectorXd>& v,
                     Eigen::Ref<Eigen::VectorXd> out) {
  const int d = static_cast<int>(w.size());
  const double dot1 = w.tail(d - 1).dot(v.tail(d - 1));
  out[0] = w[0] * v[0] + dot1;
  out.tail(d - 1) = v[0] * w.tail(d - 1) + v.tail(d - 1) +
                    (dot1 / (1.0 + w[0])) * w.tail(d - 1);
}

bool compute_scaling(const BlockLayout& lay, const Eigen::Ref<const Eigen::VectorXd>& x,
                     const Eigen::Ref<const Eigen::VectorXd>& z, Scaling& s) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg: {
      if ((x.array() <= 0.0).any() || (z.array() <= 0.0).any()) return false;
      s.h = (x.array() / z.array()).matrix();
      s.lambda = (x.array() * z.array()).sqrt().matrix();
      return true;
    }
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      const double xq = x[0] * x[0] - x.tail(d - 1).squaredNorm();
      const double zq = z[0] * z[0] - z.tail(d - 1).squaredNorm();
      if (!(x[0] > 0.0) || !(z[0] > 0.0) || !(xq > 0.0) || !(zq > 0.0)) return false;
      const double a = std::sqrt(xq), b = std::sqrt(zq);
      Eigen::VectorXd xbar = x / a, zbar = z / b;
      const double gamma = std::sqrt((1.0 + xbar.dot(zbar)) * 0.5);
      if (!(gamma > 0.0)) return false;
      s.wbar.resize(d);
      s.wbar[0] = (xbar[0] + zbar[0]) / (2.0 * gamma);
      s.wbar.tail(d - 1) = (xbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
      s.eta = a / b;
      // lambda = W z = sqrt(eta) M(wbar) z
      s.lambda.resize(d);
      soc_arrow_apply(s.wbar, z, s.lambda);
      s.lambda *= std::sqrt(s.eta);
      return true;
    }
    case ConeBlock::Kind::Psd: {
      const int side = lay.block.size;
      Eigen::MatrixXd X = smat_seg(x, side), Z = smat_seg(z, side);
      Eigen::LLT<Eigen::MatrixXd> lx(X), lz(Z);
      if (lx.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      Eigen::MatrixXd L1 = lx.matrixL(), L2 = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(L2.transpose() * L1,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      s.sigma = svd.singularValues();
      if (s.sigma.minCoeff() <= 0.0) return false;
      Eigen::VectorXd inv_sqrt = s.sigma.array().sqrt().inverse().matrix();
      s.R = L1 * svd.matrixV() * inv_sqrt.asDiagonal();
      s.Rinv = inv_sqrt.asDiagonal() * svd.matrixU().transpose() * L2.transpose();
      s.T = s.R * s.R.transpose();
      s.lambda = Eigen::VectorXd::Zero(lay.slots);
      for (int j = 0; j < side; ++j) s.lambda[svec_index(j, j)] = s.sigma[j];
      return true;
    }
  }
  return false;
}

// Dense blockwise operator applications. Each writes the block segment of
// `out` from the block segment of `v`.

void apply_H(const BlockLayout& lay, const Scaling& s,
             const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Ref<Eigen::VectorXd> out) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      out = (s.h.array() * v.array()).matrix();
      return;
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      const double wv = s.wbar.dot(v);
      out = 2.0 * wv * s.wbar;
      out[0] -= v[0];
      out.tail(d - 1) += v.tail(d - 1);
      out *= s.eta;
      return;
    }
    case ConeBlock::Kind::Psd: {
      Eigen::MatrixXd M = smat_seg(v, lay.block.size);
      svec_into(s.T * M * s.T, out);
      return;
    }
  }
}

// W' v: adjoint of the scaling map (for PSD: R M R').
void apply_Wt(const BlockLayout& lay, const Scaling& s,
              const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Ref<Eigen::VectorXd> out) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      out = (s.h.array().sqrt() * v.array()).matrix();
      return;
    case ConeBlock::Kind::SecondOrder:
      soc_arrow_apply(s.wbar, v, out);
      out *= std::sqrt(s.eta);
      return;
    case ConeBlock::Kind::Psd: {
      Eigen::MatrixXd M = smat_seg(v, lay.block.size);
      svec_into(s.R * M * s.R.transpose(), out);
      return;
    }
  }
}

// W v (for PSD: R' M R); equals W' v for the symmetric kinds.
void apply_W(const BlockLayout& lay, const Scaling& s,
             const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Ref<Eigen::VectorXd> out) {
  if (lay.block.kind == ConeBlock::Kind::Psd) {
    Eigen::MatrixXd M = smat_seg(v, lay.block.size);
    svec_into(s.R.transpose() * M * s.R, out);
    return;
  }
  apply_Wt(lay, s, v, out);
}

// W^{-T} v (for PSD: R^{-1} M R^{-T}).
void apply_Winv_t(const BlockLayout& lay, const Scaling& s,
                  const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Ref<Eigen::VectorXd> out) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      out = (v.array() / s.h.array().sqrt()).matrix();
      return;
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      Eigen::VectorXd jw(d);
      jw[0] = s.wbar[0];
      jw.tail(d - 1) = -s.wbar.tail(d - 1);
      soc_arrow_apply(jw, v, out);
      out /= std::sqrt(s.eta);
      return;
    }
    case ConeBlock::Kind::Psd: {
      Eigen::MatrixXd M = smat_seg(v, lay.block.size);
      svec_into(s.Rinv * M * s.Rinv.transpose(), out);
      return;
    }
  }
}

// Jordan product u o v in slot space.
void jordan_product(const BlockLayout& lay, const Eigen::Ref<const Eigen::VectorXd>& u,
                    const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Ref<Eigen::VectorXd> out) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      out = (u.array() * v.array()).matrix();
      return;
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      out[0] = u.dot(v);
      out.tail(d - 1) = u[0] * v.tail(d - 1) + v[0] * u.tail(d - 1);
      return;
    }
    case ConeBlock::Kind::Psd: {
      Eigen::MatrixXd U = smat_seg(u, lay.block.size), V = smat_seg(v, lay.block.size);
      Eigen::MatrixXd P = U * V;
      svec_into(0.5 * (P + P.transpose()), out);
      return;
    }
  }
}

// Solves lambda o s = r for s. For PSD the scaled point is diagonal, so the
// Sylvester system is solved entrywise.
bool lambda_solve(const BlockLayout& lay, const Scaling& s,
                  const Eigen::Ref<const Eigen::VectorXd>& r, Eigen::Ref<Eigen::VectorXd> out) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      if ((s.lambda.array() <= 0.0).any()) return false;
      out = (r.array() / s.lambda.array()).matrix();
      return true;
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      const double det = s.lambda[0] * s.lambda[0] - s.lambda.tail(d - 1).squaredNorm();
      if (!(det > 0.0) || !(s.lambda[0] > 0.0)) return false;
      const double s0 = (s.lambda[0] * r[0] - s.lambda.tail(d - 1).dot(r.tail(d - 1))) / det;
      out[0] = s0;
      out.tail(d - 1) = (r.tail(d - 1) - s0 * s.lambda.tail(d - 1)) / s.lambda[0];
      return true;
    }
    case ConeBlock::Kind::Psd: {
      const int side = lay.block.size;
      Eigen::MatrixXd Rm = smat_seg(r, side);
      Eigen::MatrixXd S(side, side);
      for (int i = 0; i < side; ++i)
        for (int j = 0; j < side; ++j) {
          const double den = s.sigma[i] + s.sigma[j];
          if (!(den > 0.0)) return false;
          S(i, j) = 2.0 * Rm(i, j) / den;
        }
      svec_into(S, out);
      return true;
    }
  }
  return false;
}

// Identity element of the block's Jordan algebra.
void unit_point(const BlockLayout& lay, Eigen::Ref<Eigen::VectorXd> out) {
  out.setZero();
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      out.setOnes();
      return;
    case ConeBlock::Kind::SecondOrder:
      out[0] = 1.0;
      return;
    case ConeBlock::Kind::Psd:
      for (int j = 0; j < lay.block.size; ++j) out[svec_index(j, j)] = 1.0;
      return;
  }
}

// Largest step alpha with x + alpha dx still in the (closed) cone.
double max_step(const BlockLayout& lay, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& dx) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg: {
      double alpha = kInf;
      for (int i = 0; i < x.size(); ++i)
        if (dx[i] < 0.0) alpha = std::min(alpha, -x[i] / dx[i]);
      return alpha;
    }
    case ConeBlock::Kind::SecondOrder: {
      const int d = lay.block.size;
      const double a = dx[0] * dx[0] - dx.tail(d - 1).squaredNorm();
      const double b = 2.0 * (x[0] * dx[0] - x.tail(d - 1).dot(dx.tail(d - 1)));
      const double c = x[0] * x[0] - x.tail(d - 1).squaredNorm();
      if (std::abs(a) < 1e-300) return b < 0.0 ? -c / b : kInf;
      const double disc = b * b - 4.0 * a * c;
      if (a < 0.0) {
        // opens down with f(0) = c > 0: exactly one positive root
        const double sq = std::sqrt(std::max(0.0, disc));
        const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
        const double r1 = q / a, r2 = (q != 0.0) ? c / q : kInf;
        return r1 > 0.0 ? r1 : r2;
      }
      if (disc < 0.0 || b >= 0.0) return kInf;  // opens up, never crosses for alpha > 0
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b - sq);  // b < 0 so q > 0
      const double r1 = q / a, r2 = c / q;
      return std::min(r1, r2);
    }
    case ConeBlock::Kind::Psd: {
      const int side = lay.block.size;
      Eigen::MatrixXd X = smat_seg(x, side), D = smat_seg(dx, side);
      Eigen::LLT<Eigen::MatrixXd> llt(X);
      if (llt.info() != Eigen::Success) return 0.0;
      Eigen::MatrixXd L = llt.matrixL();
      Eigen::MatrixXd Mtx = L.triangularView<Eigen::Lower>().solve(D);
      Mtx = L.triangularView<Eigen::Lower>().solve(Mtx.transpose()).transpose();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (Mtx + Mtx.transpose()),
                                                        Eigen::EigenvaluesOnly);
      const double lam_min = es.eigenvalues().minCoeff();
      return lam_min < 0.0 ? 1.0 / (-lam_min) : kInf;
    }
  }
  return 0.0;
}

// Distance of x from the boundary of its cone (trace diagnostics only).
double min_margin(const BlockLayout& lay, const Eigen::Ref<const Eigen::VectorXd>& x) {
  switch (lay.block.kind) {
    case ConeBlock::Kind::NonNeg:
      return x.minCoeff();
    case ConeBlock::Kind::SecondOrder:
      return x[0] - x.tail(lay.block.size - 1).norm();
    case ConeBlock::Kind::Psd: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(smat_seg(x, lay.block.size),
                                                        Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff();
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Rows split by block, with PSD rows additionally kept as small local
// matrices so A H A' can be assembled without dense scratch per row.
// ---------------------------------------------------------------------------

struct PsdDotEntry {
  int i = 0, j = 0;     // matrix indices, i <= j
  double weight = 0.0;  // c for diagonal slots, sqrt(2) c for off-diagonal
};

struct SubRow {
  int block_index = 0;
  std::vector<std::pair<int, double>> slots;  // (local slot, coeff)
  // Psd only:
  std::vector<PsdDotEntry> psd_entries;
  std::vector<int> K;    // distinct matrix indices touched
  Eigen::MatrixXd Ek;    // |K| x |K| local symmetric matrix
};

struct RowSplit {
  std::vector<SubRow> subs;
};

std::vector<RowSplit> split_rows(const ConeProgram& p, const std::vector<BlockLayout>& layout) {
  std::vector<RowSplit> out(p.rows.size());
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    for (std::size_t b = 0; b < layout.size(); ++b) {
      const auto& lay = layout[b];
      SubRow sub;
      sub.block_index = static_cast<int>(b);
      for (const auto& [idx, coeff] : p.rows[r].entries) {
        if (idx >= lay.begin && idx < lay.begin + lay.slots)
          sub.slots.emplace_back(idx - lay.begin, coeff);
      }
      if (sub.slots.empty()) continue;
      std::sort(sub.slots.begin(), sub.slots.end());
      if (lay.block.kind == ConeBlock::Kind::Psd) {
        std::vector<int> K;
        for (const auto& [slot, coeff] : sub.slots) {
          // invert slot = j(j+1)/2 + i
          int j = static_cast<int>((std::sqrt(8.0 * slot + 1.0) - 1.0) / 2.0);
          while (svec_index(0, j + 1) <= slot) ++j;
          while (svec_index(0, j) > slot) --j;
          const int i = slot - svec_index(0, j);
          sub.psd_entries.push_back({i, j, i == j ? coeff : kSqrt2 * coeff});
          K.push_back(i);
          K.push_back(j);
        }
        std::sort(K.begin(), K.end());
        K.erase(std::unique(K.begin(), K.end()), K.end());
        sub.K = K;
        auto pos = [&K](int idx) {
          return static_cast<int>(std::lower_bound(K.begin(), K.end(), idx) - K.begin());
        };
        sub.Ek = Eigen::MatrixXd::Zero(K.size(), K.size());
        int slot_at = 0;
        for (const auto& [slot, coeff] : sub.slots) {
          (void)slot;
          const auto& e = sub.psd_entries[slot_at++];
          if (e.i == e.j) {
            sub.Ek(pos(e.i), pos(e.i)) += coeff;
          } else {
            sub.Ek(pos(e.i), pos(e.j)) += coeff / kSqrt2;
            sub.Ek(pos(e.j), pos(e.i)) += coeff / kSqrt2;
          }
        }
      }
      out[r].subs.push_back(std::move(sub));
    }
  }
  return out;
}

// Sorted sparse-sparse dot with a per-slot weight callback.
template <typename WeightFn>
double merged_dot(const std::vector<std::pair<int, double>>& a,
                  const std::vector<std::pair<int, double>>& b, WeightFn weight) {
  double acc = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia].first < b[ib].first) {
      ++ia;
    } else if (a[ia].first > b[ib].first) {
      ++ib;
    } else {
      acc += a[ia].second * b[ib].second * weight(a[ia].first);
      ++ia;
      ++ib;
    }
  }
  return acc;
}

}  // namespace

std::string status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
    case SolveStatus::SuspectedInfeasible: return "SuspectedInfeasible";
  }
  return "Unknown";
}

namespace {

class Ipm {
 public:
  Ipm(const ConeProgram& p, const SolverSettings& settings)
      : p_(p), st_(settings), nrows_(static_cast<int>(p.rows.size())) {
    int at = 0;
    for (const auto& blk : p.blocks) {
      layout_.push_back({blk, at, blk.slots()});
      at += blk.slots();
      nu_ += blk.kind == ConeBlock::Kind::SecondOrder ? 1 : blk.size;
    }
    splits_ = split_rows(p, layout_);
    b_.resize(nrows_);
    for (int r = 0; r < nrows_; ++r) b_[r] = p.rows[r].rhs;
    b_norm_ = b_.norm();
    c_norm_ = p.objective.norm();
  }

  SolveResult run();

 private:
  using Segment = Eigen::Ref<Eigen::VectorXd>;

  Eigen::VectorXd apply_A(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(nrows_);
    for (int r = 0; r < nrows_; ++r) {
      double acc = 0.0;
      for (const auto& [idx, coeff] : p_.rows[r].entries) acc += coeff * v[idx];
      out[r] = acc;
    }
    return out;
  }

  Eigen::VectorXd apply_At(const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(p_.num_vars);
    for (int r = 0; r < nrows_; ++r)
      for (const auto& [idx, coeff] : p_.rows[r].entries) out[idx] += coeff * y[r];
    return out;
  }

  // Blockwise application of a dense operator onto a full-length vector.
  template <typename Fn>
  Eigen::VectorXd blockwise(const Eigen::VectorXd& v, Fn fn) const {
    Eigen::VectorXd out(p_.num_vars);
    for (std::size_t b = 0; b < layout_.size(); ++b) {
      const auto& lay = layout_[b];
      fn(lay, scalings_[b], v.segment(lay.begin, lay.slots), out.segment(lay.begin, lay.slots));
    }
    return out;
  }

  bool refresh_scalings(const Eigen::VectorXd& x, const Eigen::VectorXd& z) {
    scalings_.resize(layout_.size());
    for (std::size_t b = 0; b < layout_.size(); ++b) {
      const auto& lay = layout_[b];
      if (!compute_scaling(lay, x.segment(lay.begin, lay.slots), z.segment(lay.begin, lay.slots),
                           scalings_[b]))
        return false;
    }
    return true;
  }

  // Assembles M = A H A' using the current scalings.
  void assemble_normal_matrix(Eigen::MatrixXd& M) {
    const int s_rows = nrows_;
    // Per-row, per-SOC-block wbar dot, and per-row PSD scratch (V, W1).
    soc_rho_.assign(s_rows, {});
    psd_V_.assign(s_rows, {});
    psd_W1_.assign(s_rows, {});
    for (int r = 0; r < s_rows; ++r) {
      for (const auto& sub : splits_[r].subs) {
        const auto& lay = layout_[sub.block_index];
        const auto& sc = scalings_[sub.block_index];
        if (lay.block.kind == ConeBlock::Kind::SecondOrder) {
          double rho = 0.0;
          for (const auto& [slot, coeff] : sub.slots) rho += coeff * sc.wbar[slot];
          soc_rho_[r][sub.block_index] = rho;
        } else if (lay.block.kind == ConeBlock::Kind::Psd) {
          const int nk = static_cast<int>(sub.K.size());
          Eigen::MatrixXd V(lay.block.size, nk);
          for (int k = 0; k < nk; ++k) V.col(k) = sc.T.col(sub.K[k]);
          psd_W1_[r][sub.block_index] = V * sub.Ek;
          psd_V_[r][sub.block_index] = std::move(V);
        }
      }
    }

    M.setZero(s_rows, s_rows);
    for (int m = 0; m < s_rows; ++m) {
      for (int l = 0; l <= m; ++l) {
        double acc = 0.0;
        // Walk the two sub-row lists in lockstep (both sorted by block).
        std::size_t il = 0, im = 0;
        const auto& ls = splits_[l].subs;
        const auto& ms = splits_[m].subs;
        while (il < ls.size() && im < ms.size()) {
          if (ls[il].block_index < ms[im].block_index) {
            ++il;
            continue;
          }
          if (ls[il].block_index > ms[im].block_index) {
            ++im;
            continue;
          }
          const auto& lay = layout_[ls[il].block_index];
          const auto& sc = scalings_[ls[il].block_index];
          switch (lay.block.kind) {
            case ConeBlock::Kind::NonNeg:
              acc += merged_dot(ls[il].slots, ms[im].slots,
                                [&sc](int slot) { return sc.h[slot]; });
              break;
            case ConeBlock::Kind::SecondOrder: {
              const double jdot = merged_dot(ls[il].slots, ms[im].slots, [](int slot) {
                return slot == 0 ? 1.0 : -1.0;
              });
              acc += sc.eta * (2.0 * soc_rho_[l].at(ls[il].block_index) *
                                   soc_rho_[m].at(ms[im].block_index) -
                               jdot);
              break;
            }
            case ConeBlock::Kind::Psd: {
              // tr(E_l T E_m T) via G = V_m Ek_m V_m' sandwiched by T columns.
              const auto& W1 = psd_W1_[m].at(ms[im].block_index);
              const auto& V = psd_V_[m].at(ms[im].block_index);
              for (const auto& e : ls[il].psd_entries)
                acc += e.weight * W1.row(e.i).dot(V.row(e.j));
              break;
            }
          }
          ++il;
          ++im;
        }
        M(l, m) = acc;
        M(m, l) = acc;
      }
    }
  }

  // Exact duplicate or dependent rows make A A' singular; checked once so the
  // failure is reported as rank deficiency rather than a late factorization
  // breakdown. Rows are sorted locally since the program does not promise an
  // entry order.
  bool equality_rows_independent() const {
    std::vector<std::vector<std::pair<int, double>>> sorted(nrows_);
    for (int r = 0; r < nrows_; ++r) {
      sorted[r] = p_.rows[r].entries;
      std::sort(sorted[r].begin(), sorted[r].end());
    }
    Eigen::MatrixXd G(nrows_, nrows_);
    for (int l = 0; l < nrows_; ++l) {
      for (int m = 0; m <= l; ++m) {
        const double d = merged_dot(sorted[l], sorted[m], [](int) { return 1.0; });
        G(l, m) = d;
        G(m, l) = d;
      }
    }
    return Eigen::LLT<Eigen::MatrixXd>(G).info() == Eigen::Success;
  }

  // Factors the normal matrix, retrying with a small diagonal ridge when the
  // iterate is nearly degenerate (common close to a non-strict optimum). The
  // ridge only perturbs the search direction; convergence is still measured
  // on the true residuals.
  bool factor_normal_matrix(Eigen::MatrixXd& M) {
    llt_.compute(M);
    if (llt_.info() == Eigen::Success) return true;
    const double scale = std::max(1.0, M.diagonal().maxCoeff());
    for (double ridge : {1e-14, 1e-11, 1e-8}) {
      Eigen::MatrixXd Mr = M;
      Mr.diagonal().array() += ridge * scale;
      llt_.compute(Mr);
      if (llt_.info() == Eigen::Success) return true;
    }
    return false;
  }

  // One KKT solve for a given ds (slot space); returns false on breakdown.
  bool kkt_solve(const Eigen::VectorXd& ds, const Eigen::VectorXd& rp,
                 const Eigen::VectorXd& rd, Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                 Eigen::VectorXd& dz) {
    Eigen::VectorXd wts = blockwise(ds, apply_Wt);
    Eigen::VectorXd hrd = blockwise(rd, apply_H);
    Eigen::VectorXd rhs = rp - apply_A(wts) + apply_A(hrd);
    dy = llt_.solve(rhs);
    if (!dy.allFinite()) return false;
    dz = rd - apply_At(dy);
    dx = wts - blockwise(dz, apply_H);
    return dx.allFinite() && dz.allFinite();
  }

  double max_step_all(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) const {
    double alpha = kInf;
    for (const auto& lay : layout_)
      alpha = std::min(alpha, max_step(lay, v.segment(lay.begin, lay.slots),
                                       dv.segment(lay.begin, lay.slots)));
    return alpha;
  }

  double min_margin_all(const Eigen::VectorXd& v) const {
    double margin = kInf;
    for (const auto& lay : layout_)
      margin = std::min(margin, min_margin(lay, v.segment(lay.begin, lay.slots)));
    return margin;
  }

  const ConeProgram& p_;
  SolverSettings st_;
  int nrows_;
  std::vector<BlockLayout> layout_;
  std::vector<RowSplit> splits_;
  std::vector<Scaling> scalings_;
  std::vector<std::map<int, double>> soc_rho_;
  std::vector<std::map<int, Eigen::MatrixXd>> psd_V_, psd_W1_;
  Eigen::VectorXd b_;
  double b_norm_ = 0.0, c_norm_ = 0.0;
  double nu_ = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

SolveResult Ipm::run() {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  auto finish = [&](SolveStatus status, const std::string& msg) {
    res.status = status;
    res.message = msg;
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };

  if (!equality_rows_independent()) {
    return finish(SolveStatus::NumericalFailure,
                  "equality rows are linearly dependent (rank-deficient constraint matrix)");
  }

  // Unit interior start scaled by a data-norm heuristic.
  Eigen::VectorXd e(p_.num_vars);
  for (const auto& lay : layout_) unit_point(lay, e.segment(lay.begin, lay.slots));
  const double xi_p = std::sqrt(std::max(1.0, b_.size() ? b_.lpNorm<Eigen::Infinity>() : 1.0));
  const double xi_d = std::sqrt(std::max(1.0, p_.objective.size()
                                                  ? p_.objective.lpNorm<Eigen::Infinity>()
                                                  : 1.0));
  Eigen::VectorXd x = xi_p * e, z = xi_d * e;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(nrows_);

  res.x = x;
  res.y = y;
  res.z = z;

  double best_score = kInf;
  std::vector<double> score_history;
  Eigen::MatrixXd M;

  for (int iter = 0; iter <= st_.max_iters; ++iter) {
    const Eigen::VectorXd rp = b_ - apply_A(x);
    const Eigen::VectorXd rd = p_.objective - apply_At(y) - z;
    const double pobj = p_.objective.dot(x);
    const double dobj = b_.dot(y);
    const double compl_xz = x.dot(z);
    const double mu = compl_xz / nu_;
    const double pres = rp.norm() / (1.0 + b_norm_);
    const double dres = rd.norm() / (1.0 + c_norm_);
    const double relgap = compl_xz / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double score = std::max({pres, dres, relgap});

    if (st_.record_trace) {
      IterateStats stats;
      stats.mu = mu;
      stats.pres = pres;
      stats.dres = dres;
      stats.relgap = relgap;
      stats.pobj = pobj;
      stats.dobj = dobj;
      stats.min_margin_x = min_margin_all(x);
      stats.min_margin_z = min_margin_all(z);
      stats.rp_norm = rp.norm();
      stats.rd_norm = rd.norm();
      stats.x_norm = x.norm();
      stats.y_norm = y.norm();
      res.trace.push_back(stats);
    }

    if (score <= best_score) {
      best_score = score;
      res.x = x;
      res.y = y;
      res.z = z;
      res.gap = relgap;
      res.res_primal = pres;
      res.res_dual = dres;
      res.iterations = iter;
    }
    score_history.push_back(score);

    if (pres <= st_.tol_feas && dres <= st_.tol_feas && relgap <= st_.tol_gap) {
      res.x = x;
      res.y = y;
      res.z = z;
      res.gap = relgap;
      res.res_primal = pres;
      res.res_dual = dres;
      res.iterations = iter;
      return finish(SolveStatus::Optimal, "converged");
    }
    if (iter == st_.max_iters) {
      return finish(SolveStatus::MaxIterations, "iteration limit reached");
    }
    // Stagnation heuristic: residuals neither converge nor improve.
    if (iter >= 15) {
      const double old = score_history[iter - 10];
      if (score > 0.5 * old && std::max(pres, dres) > 1e3 * st_.tol_feas) {
        return finish(SolveStatus::SuspectedInfeasible,
                      "residuals stagnated while the gap cannot close");
      }
    }

    if (!refresh_scalings(x, z)) {
      return finish(SolveStatus::NumericalFailure, "cone interiority lost in scaling");
    }
    assemble_normal_matrix(M);
    if (!factor_normal_matrix(M)) {
      return finish(SolveStatus::NumericalFailure, "normal-equation factorization failed");
    }

    // lambda o lambda, reused by both directions.
    Eigen::VectorXd lam_sq(p_.num_vars);
    for (std::size_t bl = 0; bl < layout_.size(); ++bl) {
      const auto& lay = layout_[bl];
      jordan_product(lay, scalings_[bl].lambda, scalings_[bl].lambda,
                     lam_sq.segment(lay.begin, lay.slots));
    }

    double sigma;
    Eigen::VectorXd corr = Eigen::VectorXd::Zero(p_.num_vars);
    Eigen::VectorXd dx_aff, dy_aff, dz_aff;
    if (st_.predictor_corrector) {
      // Predictor: pure Newton step toward the boundary.
      Eigen::VectorXd d_lambda = -lam_sq;
      Eigen::VectorXd ds(p_.num_vars);
      bool ok = true;
      for (std::size_t bl = 0; bl < layout_.size(); ++bl) {
        const auto& lay = layout_[bl];
        ok = ok && lambda_solve(lay, scalings_[bl], d_lambda.segment(lay.begin, lay.slots),
                                ds.segment(lay.begin, lay.slots));
      }
      if (!ok || !kkt_solve(ds, rp, rd, dx_aff, dy_aff, dz_aff)) {
        return finish(SolveStatus::NumericalFailure, "affine direction computation failed");
      }
      const double ap = std::min(1.0, max_step_all(x, dx_aff));
      const double ad = std::min(1.0, max_step_all(z, dz_aff));
      const double mu_aff = (x + ap * dx_aff).dot(z + ad * dz_aff) / nu_;
      sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);
      // Mehrotra correction in the scaled space.
      Eigen::VectorXd wx = blockwise(dx_aff, apply_Winv_t);
      Eigen::VectorXd wz = blockwise(dz_aff, apply_W);
      for (std::size_t bl = 0; bl < layout_.size(); ++bl) {
        const auto& lay = layout_[bl];
        jordan_product(lay, wx.segment(lay.begin, lay.slots), wz.segment(lay.begin, lay.slots),
                       corr.segment(lay.begin, lay.slots));
      }
    } else {
      sigma = 0.1;
    }

    Eigen::VectorXd d_lambda = sigma * mu * e - lam_sq - corr;
    Eigen::VectorXd ds(p_.num_vars);
    bool ok = true;
    for (std::size_t bl = 0; bl < layout_.size(); ++bl) {
      const auto& lay = layout_[bl];
      ok = ok && lambda_solve(lay, scalings_[bl], d_lambda.segment(lay.begin, lay.slots),
                              ds.segment(lay.begin, lay.slots));
    }
    Eigen::VectorXd dx, dy, dz;
    if (!ok || !kkt_solve(ds, rp, rd, dx, dy, dz)) {
      return finish(SolveStatus::NumericalFailure, "search direction computation failed");
    }

    double ap = std::min(1.0, st_.step_fraction * max_step_all(x, dx));
    double ad = std::min(1.0, st_.step_fraction * max_step_all(z, dz));
    if (!(ap > 1e-12) || !(ad > 1e-12)) {
      return finish(SolveStatus::NumericalFailure, "step length collapsed");
    }
    // Guard: complementarity may not grow by more than 10x per iteration.
    for (int guard = 0; guard < 60; ++guard) {
      const double mu_new = (x + ap * dx).dot(z + ad * dz) / nu_;
      if (mu_new <= 10.0 * mu) break;
      ap *= 0.5;
      ad *= 0.5;
    }

    x += ap * dx;
    y += ad * dy;
    z += ad * dz;
    if (st_.record_trace && !res.trace.empty()) {
      res.trace.back().step_primal = ap;
      res.trace.back().step_dual = ad;
    }
    if (!x.allFinite() || !y.allFinite() || !z.allFinite()) {
      return finish(SolveStatus::NumericalFailure, "iterate became non-finite");
    }
  }
  return finish(SolveStatus::MaxIterations, "iteration limit reached");
}

}  // namespace

SolveResult solve(const ConeProgram& p, const SolverSettings& settings) {
  auto diags = validate(p);
  if (!diags.empty()) {
    std::string msg = "solve: invalid cone program:";
    for (const auto& d : diags) msg += " [" + d.message + "]";
    throw std::invalid_argument(msg);
  }
  if (!(settings.step_fraction > 0.0 && settings.step_fraction < 1.0))
    throw std::invalid_argument("solve: step_fraction must be in (0, 1)");
  if (!(settings.tol_gap > 0.0) || !(settings.tol_feas > 0.0))
    throw std::invalid_argument("solve: tolerances must be > 0");
  Ipm ipm(p, settings);
  return ipm.run();
}

}  // namespace sdploc
