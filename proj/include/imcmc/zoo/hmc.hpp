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

#include <functional>
#include <memory>
#include <vector>

#include "imcmc/kernel.hpp"

namespace imcmc::zoo {

// A model with a fixed set of scalar continuous latents and the gradient of
// its log joint density, written over DiffScalar so the leapfrog map can be
// differentiated by the transform runtime.
struct HmcTarget {
  std::shared_ptr<const GenerativeProgram> model;
  std::vector<Address> addresses;
  std::function<std::vector<DiffScalar>(const std::vector<DiffScalar>&)> grad_log_density;
  Trace observations;
};

// Independent standard normals at (z, 1) .. (z, dim).
HmcTarget standard_normal_target(std::size_t dim);

// Q draws momentum/<addr> ~ normal(0, 1) for each latent; F runs `steps`
// leapfrog steps of size `eps` and negates the momenta. With
// `negate_momentum = false` the negation is skipped (seeded bug).
KernelSpec hmc_kernel(const HmcTarget& target, double eps, std::size_t steps, bool negate_momentum = true);

}  // namespace imcmc::zoo
