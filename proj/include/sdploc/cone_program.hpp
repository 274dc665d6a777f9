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

#ifndef SDPLOC_CONE_PROGRAM_HPP_
#define SDPLOC_CONE_PROGRAM_HPP_

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sdploc {

// One factor of the cone product constraining the variable vector.
//   NonNeg(k):      k nonnegative scalars.
//   SecondOrder(d): (t, u) in R^d with ||u|| <= t, d >= 2.
//   Psd(s):         an s x s PSD matrix stored as its scaled svec
//                   (s(s+1)/2 slots, off-diagonals times sqrt(2)).
struct ConeBlock {
  enum class Kind { NonNeg, SecondOrder, Psd };
  Kind kind = Kind::NonNeg;
  int size = 0;  // k, d, or matrix side s

  int slots() const {
    return kind == Kind::Psd ? size * (size + 1) / 2 : size;
  }
  static ConeBlock nonneg(int k) { return {Kind::NonNeg, k}; }
  static ConeBlock second_order(int d) { return {Kind::SecondOrder, d}; }
  static ConeBlock psd(int s) { return {Kind::Psd, s}; }
};

// One equality row: sum of coeff * x[index] == rhs. Entries are kept sorted
// by index with no duplicates.
struct SparseRow {
  std::vector<std::pair<int, double>> entries;
  double rhs = 0.0;

  void add(int index, double coeff) { entries.emplace_back(index, coeff); }
};

struct IndexRange {
  int begin = 0;
  int end = 0;  // half-open
  int size() const { return end - begin; }
};

// Standard-form cone program: minimize c'x subject to A x = b and x in the
// ordered product of cone blocks partitioning the variable vector.
struct ConeProgram {
  int num_vars = 0;
  Eigen::VectorXd objective;
  std::vector<SparseRow> rows;
  std::vector<ConeBlock> blocks;
  std::map<std::string, IndexRange> names;

  // Appends a block and returns the slot range it occupies.
  IndexRange append_block(const ConeBlock& block, const std::string& name = {});

  // Deterministic text form (objective, rows, blocks) for diffing.
  void dump(std::ostream& os) const;
};

struct Diagnostic {
  std::string message;
  int index = -1;  // offending row or block where applicable
};

// Structural validation; empty result means all invariants hold.
std::vector<Diagnostic> validate(const ConeProgram& p);

}  // namespace sdploc

#endif  // SDPLOC_CONE_PROGRAM_HPP_
