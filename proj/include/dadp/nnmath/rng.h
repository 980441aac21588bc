// Copyright 2026 The DADP Authors
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

#ifndef DADP_NNMATH_RNG_H_
#define DADP_NNMATH_RNG_H_

#include <cstdint>

namespace dadp {

// SplitMix64 generator (Steele, Lea & Flood 2014): a single 64-bit word of
// state advanced by a Weyl increment and finalized by a 64-bit mixer.
// Distributions are implemented here rather than taken from <random> so the
// streams are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t NextU64();

  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi);

  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);

  // Standard normal via Box-Muller; consumes exactly two uniforms.
  double Normal();

  uint64_t state() const { return state_; }

 private:
  uint64_t state_;
};

// Deterministic child seed for stream `a` (and sub-stream `b`) of `master`.
// Used to give domains, episodes and seeds independent generators so results
// do not depend on iteration order.
uint64_t DeriveSeed(uint64_t master, uint64_t a, uint64_t b = 0);

}  // namespace dadp

#endif  // DADP_NNMATH_RNG_H_
