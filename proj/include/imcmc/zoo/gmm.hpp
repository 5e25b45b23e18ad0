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

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "imcmc/kernel.hpp"

namespace imcmc::zoo {

// Mixture with an unknown number of components:
//   k ~ poisson_plus_one(1)
//   (mu, j) ~ normal(0, 10), (var, j) ~ inv_gamma(1, 10)   for j = 1..k
//   weights ~ dirichlet(2, ..., 2)
//   (x, i) ~ mixture_of_normals(weights, means, vars)
std::shared_ptr<const GenerativeProgram> gmm_model(std::size_t n);

Trace gmm_observations(std::span<const double> data);

// n draws from a fixed three-component mixture.
std::vector<double> gmm_dataset(std::size_t n, std::uint64_t seed);

// A latent GMM trace with the given parameters (weights must sum to 1).
Trace gmm_trace(std::span<const double> means, std::span<const double> vars, std::span<const double> weights);

// Moment-matching split/merge. Q chooses split or merge (split forced when
// no merge is possible), the cluster, and on split u1, u2 ~ beta(2, 2),
// u3 ~ beta(1, 1). Split sends cluster j to (j, k+1); merge folds the last
// cluster into j, where j ranges over clusters whose mean lies below the
// last one's (exactly the pairs a split can produce).
KernelSpec gmm_split_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);

// Swaps a uniformly chosen cluster with the last one.
KernelSpec gmm_cluster_swap_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations);

// Gaussian random walk on every mean.
KernelSpec gmm_random_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations,
                                  double step = 0.5);

// Birth/death of a component. With `end_only` the birth always appends at
// the end while the death can remove any component (a seeded bug).
KernelSpec gmm_birth_death_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations,
                                  bool end_only);

}  // namespace imcmc::zoo
