// Copyright 2026 The imcmc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace imcmc {

// xoshiro256** seeded through splitmix64. Hand-rolled rather than
// std::mt19937 + std::*_distribution because the standard distributions are
// not specified bit-for-bit across library implementations, and chains must
// replay identically everywhere.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform on (0, 1).
  double uniform_open();
  double standard_normal();
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  // A child stream, statistically independent of this one. Advances *this.
  RandomSource split();

 private:
  RandomSource() = default;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace imcmc
