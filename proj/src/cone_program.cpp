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

#include "sdploc/cone_program.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

namespace sdploc {

IndexRange ConeProgram::append_block(const ConeBlock& block, const std::string& name) {
  IndexRange range{num_vars, num_vars + block.slots()};
  blocks.push_back(block);
  num_vars = range.end;
  if (!name.empty()) names[name] = range;
  return range;
}

void ConeProgram::dump(std::ostream& os) const {
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  os << "coneprogram num_vars=" << num_vars << " rows=" << rows.size() << "\n";
  os << "blocks:";
  for (const auto& b : blocks) {
    switch (b.kind) {
      case ConeBlock::Kind::NonNeg: os << " NonNeg(" << b.size << ")"; break;
      case ConeBlock::Kind::SecondOrder: os << " SecondOrder(" << b.size << ")"; break;
      case ConeBlock::Kind::Psd: os << " PSD(" << b.size << ")"; break;
    }
  }
  os << "\nobjective:";
  for (int i = 0; i < objective.size(); ++i)
    if (objective[i] != 0.0) os << " " << i << ":" << fmt(objective[i]);
  os << "\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    os << "row " << r << " rhs=" << fmt(rows[r].rhs) << " :";
    for (const auto& [idx, coeff] : rows[r].entries) os << " " << idx << ":" << fmt(coeff);
    os << "\n";
  }
}

std::vector<Diagnostic> validate(const ConeProgram& p) {
  std::vector<Diagnostic> diags;
  int total = 0;
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    const auto& blk = p.blocks[b];
    const int bi = static_cast<int>(b);
    switch (blk.kind) {
      case ConeBlock::Kind::NonNeg:
        if (blk.size < 1) diags.push_back({"NonNeg block size must be >= 1", bi});
        break;
      case ConeBlock::Kind::SecondOrder:
        if (blk.size < 2) diags.push_back({"SecondOrder block dim must be >= 2", bi});
        break;
      case ConeBlock::Kind::Psd:
        if (blk.size < 1) diags.push_back({"PSD block side must be >= 1", bi});
        break;
    }
    total += blk.slots();
  }
  if (total != p.num_vars)
    diags.push_back({"block slots sum to " + std::to_string(total) + " but num_vars is " +
                         std::to_string(p.num_vars),
                     -1});
  if (p.objective.size() != p.num_vars)
    diags.push_back({"objective length does not match num_vars", -1});
  for (std::size_t r = 0; r < p.rows.size(); ++r) {
    const int ri = static_cast<int>(r);
    std::vector<int> cols;
    for (const auto& [idx, coeff] : p.rows[r].entries) {
      (void)coeff;
      if (idx < 0 || idx >= p.num_vars) {
        diags.push_back({"row references variable index " + std::to_string(idx) +
                             " outside [0, " + std::to_string(p.num_vars) + ")",
                         ri});
      }
      cols.push_back(idx);
    }
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end())
      diags.push_back({"row has duplicate coefficient entries", ri});
  }
  return diags;
}

}  // namespace sdploc
