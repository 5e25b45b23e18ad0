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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imcmc/kernel.hpp"

namespace imcmc::oracle {

// Support of a discrete distribution, dropping zero-probability values.
// poisson_plus_one is cut where the remaining tail mass drops below 1e-12.
// Throws NotEnumerable for continuous distributions.
std::vector<Value> enumerate_support(const Distribution& d);

struct WeightedTrace {
  Trace trace;  // every visited address, constrained ones included
  double log_weight = 0;
};

// Every execution of `p` with positive density, found by depth-first
// re-execution. Addresses in `constraints` are scored rather than branched
// on. Throws NotEnumerable on an unconstrained continuous choice.
std::vector<WeightedTrace> enumerate_program(const GenerativeProgram& p, const Trace& args = {},
                                             const Trace& constraints = {});

// All positive-density latent traces of a fully discrete model given b.
class FiniteStateIndex {
 public:
  FiniteStateIndex(const GenerativeProgram& model, const Trace& observations);

  std::size_t size() const noexcept { return states_.size(); }
  const Trace& state(std::size_t i) const { return states_.at(i); }
  // log p(x_i ⊕ b).
  double log_joint(std::size_t i) const { return log_joint_.at(i); }
  std::optional<std::size_t> find(const Trace& x) const;
  // log Σ_i p(x_i ⊕ b).
  double log_evidence() const noexcept { return log_evidence_; }
  // p(x_i | b).
  Eigen::VectorXd posterior() const;

 private:
  std::vector<Trace> states_;
  std::vector<double> log_joint_;
  std::map<std::string, std::size_t> lookup_;
  double log_evidence_ = 0;
};

// K[i][j]: probability that one step from x_i lands on x_j, summed exactly
// over every auxiliary outcome. With `checked`, failing checks reject.
Eigen::MatrixXd brute_force_kernel(const KernelSpec& spec, const FiniteStateIndex& index, bool checked = false);

// Same for a cycle, by enumerating the whole sequence of sub-steps rather
// than multiplying per-kernel matrices.
Eigen::MatrixXd brute_force_kernel(const Cycle& cycle, const FiniteStateIndex& index, bool checked = false);

// max_{i,j} |π_i K_ij - π_j K_ji|
double detailed_balance_residual(const Eigen::MatrixXd& k, const Eigen::VectorXd& pi);
// max_j |(πᵀK)_j - π_j|
double stationarity_residual(const Eigen::MatrixXd& k, const Eigen::VectorXd& pi);
// max_i |Σ_j K_ij - 1|, or +inf if any entry is negative.
double row_sum_residual(const Eigen::MatrixXd& k);

struct QuadratureResult {
  double p_k2 = 0.5;
  // |coarse - fine| between the last two grid sizes.
  double refinement_change = 0;
};

// P(k = 2 | data) for the two-mean toy model by trapezoid quadrature over
// ±8 prior standard deviations, halving the step until two successive
// results agree within `tol` (or `max_halvings` is reached).
QuadratureResult toy_posterior_k2(std::span<const double> data, double tol = 1e-9, int max_halvings = 6);

// ½ Σ |p_i - q_i|. Throws InvalidArgument on negative entries, sums off
// 1 by more than 1e-9, or length mismatch.
double tv_distance(std::span<const double> p, std::span<const double> q);

}  // namespace imcmc::oracle
