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

#include "sdploc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdploc/errors.hpp"
#include "sdploc/svec.hpp"

namespace sdploc {

namespace {

constexpr double kQFloor = 1e-12;

double normal_cdf(double t) { return 0.5 * std::erfc(-t / kSqrt2); }

}  // namespace

AccuracyReport position_error(const NetworkTruth& truth, const EstimatedPositions& est) {
  if (truth.sensors.size() != est.x_hat.size())
    throw LengthMismatchError("position_error: sensor counts differ");
  AccuracyReport report;
  report.per_sensor_errors.reserve(truth.sensors.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.sensors.size(); ++i) {
    const double d = distance(truth.sensors[i], est.x_hat[i]);
    report.per_sensor_errors.push_back(d);
    sum += d;
  }
  report.pe = sum / static_cast<double>(truth.sensors.size());
  return report;
}

void fill_error_moments(AccuracyReport& report, const std::vector<double>& errors) {
  if (errors.empty()) throw EmptyInputError("fill_error_moments: no errors");
  const double v = static_cast<double>(errors.size());
  double mean = 0.0, mean_abs = 0.0;
  for (double e : errors) {
    mean += e;
    mean_abs += std::abs(e);
  }
  mean /= v;
  mean_abs /= v;
  double var = 0.0, var_abs = 0.0;
  for (double e : errors) {
    var += (e - mean) * (e - mean);
    var_abs += (std::abs(e) - mean_abs) * (std::abs(e) - mean_abs);
  }
  report.f1 = mean;
  report.f2 = var / v;
  report.f1_abs = mean_abs;
  report.f2_abs = var_abs / v;
}

ErrorHistogram histogram(const std::vector<double>& errors, double bin_width) {
  if (errors.empty()) throw EmptyInputError("histogram: no errors");
  if (!(bin_width > 0.0)) throw std::invalid_argument("histogram: bin_width must be > 0");

  // Bin k covers [k w - w/2, k w + w/2); k = 0 straddles zero.
  auto bin_of = [bin_width](double e) {
    return static_cast<long>(std::floor(e / bin_width + 0.5));
  };
  long k_min = 0, k_max = 0;
  for (double e : errors) {
    k_min = std::min(k_min, bin_of(e));
    k_max = std::max(k_max, bin_of(e));
  }

  ErrorHistogram h;
  h.bin_width = bin_width;
  const long nbins = k_max - k_min + 1;
  h.lo.resize(nbins);
  h.hi.resize(nbins);
  h.counts.assign(nbins, 0);
  for (long k = k_min; k <= k_max; ++k) {
    h.lo[k - k_min] = (static_cast<double>(k) - 0.5) * bin_width;
    h.hi[k - k_min] = (static_cast<double>(k) + 0.5) * bin_width;
  }
  h.zero_bin = static_cast<int>(-k_min);
  for (double e : errors) ++h.counts[bin_of(e) - k_min];

  const double v = static_cast<double>(errors.size());
  h.probabilities.resize(nbins);
  for (long i = 0; i < nbins; ++i)
    h.probabilities[i] = static_cast<double>(h.counts[i]) / v;
  return h;
}

std::vector<double> discretized_gaussian(const ErrorHistogram& bins, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("discretized_gaussian: sigma must be > 0");
  std::vector<double> q(bins.lo.size());
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = normal_cdf(bins.hi[i] / sigma) - normal_cdf(bins.lo[i] / sigma);
    total += q[i];
  }
  if (total > 0.0)
    for (double& qi : q) qi /= total;
  return q;
}

double relative_entropy(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw LengthMismatchError("relative_entropy: length mismatch");
  double sp = 0.0, sq = 0.0;
  for (double x : p) sp += x;
  for (double x : q) sq += x;
  if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
    throw NotNormalizedError("relative_entropy: inputs must sum to 1 within 1e-9");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log2(p[i] / std::max(q[i], kQFloor));
  }
  return std::max(0.0, d);
}

double tail_fraction(const std::vector<double>& errors, double threshold) {
  if (errors.empty()) throw EmptyInputError("tail_fraction: no errors");
  if (!(threshold > 0.0)) throw std::invalid_argument("tail_fraction: threshold must be > 0");
  long count = 0;
  for (double e : errors)
    if (std::abs(e) > threshold) ++count;
  return static_cast<double>(count) / static_cast<double>(errors.size());
}

void write_histogram_csv(const ErrorHistogram& hist, const std::vector<double>& q,
                         std::ostream& os) {
  os << "bin_lo,bin_hi,count,p,q\n";
  char buf[256];
  for (std::size_t i = 0; i < hist.lo.size(); ++i) {
    const double qi = i < q.size() ? q[i] : 0.0;
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%ld,%.10g,%.10g\n", hist.lo[i], hist.hi[i],
                  hist.counts[i], hist.probabilities[i], qi);
    os << buf;
  }
}

}  // namespace sdploc
