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

#include <memory>

#include "imcmc/kernel.hpp"

namespace imcmc::zoo {

// Small fully discrete models whose transition matrices can be built
// exactly by enumeration.

// x ~ bernoulli(0.3); F flips x, Q is empty.
KernelSpec flip_kernel();

// k ~ uniform_discrete(1, 4); (c, j) ~ bernoulli(0.3) for j <= k;
// o ~ bernoulli(0.2 + 0.6 * (number of set c) / k), observed true.
// Birth inserts a fresh c at a uniform position, death removes one; birth
// is forced at k = 1 and impossible at k = 4.
KernelSpec birth_death_kernel();

// z1, z2 ~ categorical(0.2, 0.5, 0.3); o ~ bernoulli(z1 == z2 ? 0.9 : 0.2),
// observed true. Q picks which ~ uniform_discrete(1, 2) and dir ~
// bernoulli(0.5); F shifts z_which by +1 (dir) or -1 modulo 3 and flips dir.
// With `buggy`, the shift from 3 writes 2 and flips dir, which is not an
// involution for (z = 3, dir = true) but is for every other input.
KernelSpec categorical_shift_kernel(bool buggy = false);

// The model shared by the categorical-shift kernels (needed to cycle them).
std::shared_ptr<const GenerativeProgram> categorical_pair_model();

}  // namespace imcmc::zoo
