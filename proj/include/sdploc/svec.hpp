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

#ifndef SDPLOC_SVEC_HPP_
#define SDPLOC_SVEC_HPP_

#include <Eigen/Dense>

namespace sdploc {

// Scaled symmetric vectorization: a symmetric s x s matrix is packed into
// s(s+1)/2 slots, upper triangle in column-major order, with off-diagonal
// entries multiplied by sqrt(2) so the Euclidean dot product of two packed
// vectors equals the trace inner product of the matrices.

inline constexpr double kSqrt2 = 1.4142135623730951;

inline int svec_len(int side) { return side * (side + 1) / 2; }

// Slot of entry (i, j) with i <= j.
inline int svec_index(int i, int j) { return j * (j + 1) / 2 + i; }

// Requires M symmetric within 1e-12; throws DimensionError otherwise.
Eigen::VectorXd svec(const Eigen::MatrixXd& M);

// Inverse of svec; throws DimensionError if v is not of triangular length.
Eigen::MatrixXd smat(const Eigen::VectorXd& v);

// Side length s with s(s+1)/2 == len, or -1 if len is not triangular.
int svec_side(int len);

}  // namespace sdploc

#endif  // SDPLOC_SVEC_HPP_
