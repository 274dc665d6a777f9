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

#include "sdploc/svec.hpp"

#include <cmath>

#include "sdploc/errors.hpp"

namespace sdploc {

int svec_side(int len) {
  const int side = static_cast<int>(std::floor((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0 + 0.5));
  return svec_len(side) == len ? side : -1;
}

Eigen::VectorXd svec(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw DimensionError("svec: matrix must be square");
  const int s = static_cast<int>(M.rows());
  for (int j = 0; j < s; ++j)
    for (int i = 0; i < j; ++i)
      if (std::abs(M(i, j) - M(j, i)) > 1e-12)
        throw DimensionError("svec: matrix not symmetric within 1e-12");
  Eigen::VectorXd v(svec_len(s));
  int slot = 0;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i <= j; ++i) {
      v[slot++] = i == j ? M(i, j) : kSqrt2 * 0.5 * (M(i, j) + M(j, i));
    }
  }
  return v;
}

Eigen::MatrixXd smat(const Eigen::VectorXd& v) {
  const int s = svec_side(static_cast<int>(v.size()));
  if (s < 0) throw DimensionError("smat: vector length is not triangular");
  Eigen::MatrixXd M(s, s);
  int slot = 0;
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double val = i == j ? v[slot] : v[slot] / kSqrt2;
      M(i, j) = val;
      M(j, i) = val;
      ++slot;
    }
  }
  return M;
}

}  // namespace sdploc
