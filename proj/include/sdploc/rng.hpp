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

#ifndef SDPLOC_RNG_HPP_
#define SDPLOC_RNG_HPP_

#include <cmath>
#include <cstdint>

namespace sdploc {

// xoshiro256++ with splitmix64 seeding. Self-contained so streams are
// reproducible bit-for-bit independent of the standard library in use.
// Substreams are derived from (seed, purpose) so that consumers of one
// purpose (e.g. noise draws) never perturb another (e.g. placement).
class Rng {
 public:
  enum class Purpose : std::uint64_t { Placement = 1, Noise = 2, Generic = 3 };

  Rng(std::uint64_t seed, Purpose purpose) {
    std::uint64_t s = seed ^ (0xA0761D6478BD642FULL * static_cast<std::uint64_t>(purpose));
    for (auto& word : state_) word = splitmix64(s);
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call
  // so the draw sequence is position-independent.
  double normal() {
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t state_[4];
};

// Seed for the i-th network of an experiment, derived so that instances are
// a pure function of (master_seed, index).
inline std::uint64_t derive_network_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (index * 0xD1B54A32D192ED03ULL + 0x8BB84B93962EACC9ULL);
  return Rng::splitmix64(s);
}

}  // namespace sdploc

#endif  // SDPLOC_RNG_HPP_
