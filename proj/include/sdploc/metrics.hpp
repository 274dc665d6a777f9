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

#ifndef SDPLOC_METRICS_HPP_
#define SDPLOC_METRICS_HPP_

#include <iosfwd>
#include <vector>

#include "sdploc/models.hpp"
#include "sdploc/network.hpp"

namespace sdploc {

// Position error plus the first two moments of the signed squared-distance
// errors (absolute-value variants kept as diagnostics).
struct AccuracyReport {
  double pe = 0.0;
  std::vector<double> per_sensor_errors;
  double f1 = 0.0;      // mean of signed errors
  double f2 = 0.0;      // variance of signed errors
  double f1_abs = 0.0;  // same moments on |errors|
  double f2_abs = 0.0;
};

// Mean Euclidean distance between true and estimated sensor positions.
// Throws LengthMismatchError when counts differ. f1/f2 are left zero.
AccuracyReport position_error(const NetworkTruth& truth, const EstimatedPositions& est);

// Fills f1/f2 (and their absolute variants) of a report from edge errors.
void fill_error_moments(AccuracyReport& report, const std::vector<double>& errors);

// Zero-centered histogram: one bin straddles zero as [-w/2, w/2) and
// neighbors extend symmetrically until every observed error is covered.
struct ErrorHistogram {
  double bin_width = 0.0;
  std::vector<double> lo, hi;       // contiguous half-open bins [lo, hi)
  std::vector<long> counts;
  std::vector<double> probabilities;
  int zero_bin = 0;                 // index of the bin containing 0
};

ErrorHistogram histogram(const std::vector<double>& errors, double bin_width);

// Bin masses of a zero-mean Gaussian with the given sigma, renormalized over
// the provided bins.
std::vector<double> discretized_gaussian(const ErrorHistogram& bins, double sigma);

// KL divergence in bits: sum over p_i > 0 of p_i log2(p_i / max(q_i, 1e-12)),
// clamped at zero (the floor can otherwise push the value a hair negative).
double relative_entropy(const std::vector<double>& p, const std::vector<double>& q);

// Fraction of errors with |error| > threshold.
double tail_fraction(const std::vector<double>& errors, double threshold);

// CSV rows (bin_lo, bin_hi, count, p, q) for external plotting.
void write_histogram_csv(const ErrorHistogram& hist, const std::vector<double>& q,
                         std::ostream& os);

}  // namespace sdploc

#endif  // SDPLOC_METRICS_HPP_
