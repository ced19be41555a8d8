// Copyright 2026 The Authors.
//
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

#ifndef GSP_RANDOM_HPP_
#define GSP_RANDOM_HPP_

#include <cstdint>
#include <limits>

namespace gsp {

// SplitMix64 run in counter mode: output i of stream s under seed x is
// mix(x ^ mix(s * PHI) + i * GAMMA). Streams are statistically independent
// for distinct (seed, stream) pairs and bit-reproducible across platforms.
//
// Solver runs split sub-streams deterministically (clock, swap, init, ...),
// so a swap procedure drawing more or fewer numbers can never perturb the
// event times of the Poisson clock.
class Rng {
 public:
  Rng(uint64_t seed, uint64_t stream)
      : state_(mix(seed ^ mix(stream * 0x9e3779b97f4a7c15ULL))) {}

  uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform on [0,1) with 53-bit resolution; exact zeros are remapped to the
  // smallest positive double so callers may take logs or negative powers.
  double uniform01() {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (u == 0.0) return std::numeric_limits<double>::denorm_min();
    return u;
  }

  // Uniform integer in [0, n), unbiased via rejection.
  int uniform_int(int n) {
    uint64_t bound = static_cast<uint64_t>(n);
    uint64_t limit = std::numeric_limits<uint64_t>::max() -
                     std::numeric_limits<uint64_t>::max() % bound;
    uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return static_cast<int>(x % bound);
  }

  bool bernoulli(double p) { return uniform01() < p; }

 private:
  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
  }

  uint64_t state_;
};

// Fixed stream ids used by the solvers.
enum RngStream : uint64_t {
  kClockStream = 0,
  kSwapStream = 1,
  kInitStream = 2,
  kAuxStream = 3,
};

}  // namespace gsp

#endif  // GSP_RANDOM_HPP_
