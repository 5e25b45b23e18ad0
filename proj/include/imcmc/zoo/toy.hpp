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
#include <span>
#include <vector>

#include "imcmc/kernel.hpp"

namespace imcmc::zoo {

// k ~ uniform_discrete(1, 2); (mu, j) ~ normal(0, 10); (x, i) drawn from an
// equal-weight unit-variance mixture of the k means.
std::shared_ptr<const GenerativeProgram> toy_model(std::size_t n);

Trace toy_observations(std::span<const double> data);

// Fixed ten-point dataset used by the posterior-recovery test and the CLI.
std::vector<double> toy_dataset();

// The two-mean split/merge move: split (mu, u) -> (mu - u, mu + u) with
// u ~ beta(2, 2) sampled only when k = 1; merge writes u back to aux.
KernelSpec toy_split_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);

// (delta, j) ~ normal(0, step) for each mean; mu' = mu + delta, delta' = -delta.
KernelSpec toy_random_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations,
                                  double step = 0.5);

// Swaps (mu, 1) and (mu, 2) when k = 2; identity when k = 1.
KernelSpec toy_cluster_swap_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);

// Seeded bugs.
// Merge computes mu = sqrt(mu1 * mu2).
KernelSpec toy_sqrt_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);
// Split writes the second mean to a misspelled address.
KernelSpec toy_misspelled_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);

}  // namespace imcmc::zoo
