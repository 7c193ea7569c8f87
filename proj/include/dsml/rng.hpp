/*
 * Copyright 2026 The dsml Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Portable pseudo-random numbers.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded by running
// splitmix64 on the 64-bit seed. Uniform doubles use the top 53 bits.
// Normals use the Box-Muller transform; both outputs of a pair are used,
// the cosine branch first. Every stream is therefore fully determined by
// its seed, independent of the standard library implementation.

#pragma once

#include <array>
#include <cstdint>

namespace dsml {

/// One splitmix64 step: advances `state` and returns the mixed output.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent seed for sub-stream `stream` of `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double normal();

 private:
  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace dsml
