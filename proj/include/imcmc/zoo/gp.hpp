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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imcmc/kernel.hpp"

namespace imcmc::zoo {

// Covariance-function expression tree.
struct CovExpr {
  enum class Kind { Constant, Linear, SquaredExponential, Periodic, Plus, Times };

  Kind kind = Kind::Constant;
  // Constant: {value}; Linear: {offset}; SquaredExponential: {length};
  // Periodic: {length, period}; Plus/Times: {}.
  std::vector<double> params;
  std::shared_ptr<const CovExpr> left;
  std::shared_ptr<const CovExpr> right;

  double operator()(double a, double b) const;
  std::size_t size() const;
  bool is_leaf() const noexcept { return kind != Kind::Plus && kind != Kind::Times; }
  std::string to_string() const;
};

// Production probabilities over CovExpr::Kind in enum order.
const std::vector<double>& cov_production_weights();

// Recursive grammar prior, run inside whatever namespace the caller set up:
// `kind` picks the production, hyperparameters live next to it, children
// under `left` and `right`.
std::shared_ptr<const CovExpr> cov_function_prior(Context& ctx);

// Rebuilds the expression stored under `prefix` in a trace.
std::shared_ptr<const CovExpr> cov_expr_from_trace(const Trace& t, const Address& prefix);

Eigen::MatrixXd cov_matrix(const CovExpr& e, std::span<const double> xs);

// K + noise * I, with jitter 1e-8, 1e-7, ..., 1e-4 added on the diagonal until
// a Cholesky factorization succeeds. Empty when every attempt fails.
std::optional<Eigen::MatrixXd> jittered_covariance(const CovExpr& e, std::span<const double> xs, double noise);

// log N(ys; 0, K + noise I); -inf if factorization fails at every jitter.
double gp_marginal_loglik(const CovExpr& e, std::span<const double> xs, std::span<const double> ys, double noise);

struct GpData {
  std::vector<double> xs;
  std::vector<double> ys;
};

// y = 0.5 x + sin(2 pi x / 1.5) + N(0, 0.1^2) on an even grid over [0, 6].
GpData gp_dataset(std::size_t n, std::uint64_t seed);

// cov_function ~ grammar; noise ~ inv_gamma(1, 1); ys ~ mvnormal(0, K + noise I)
// with ys one vector-valued address.
std::shared_ptr<const GenerativeProgram> gp_model(std::vector<double> xs);

Trace gp_observations(std::span<const double> ys);

// Subtree-replacement move: Q walks the tree to a node (path namespace) and
// draws new_subtree from the grammar; F swaps the two subtrees by copies.
// `uniform_walk` selects every node with equal probability instead of the
// depth-discounted walk.
KernelSpec gp_structure_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations,
                               bool uniform_walk = false);

// Multiplicative random walk on every continuous latent (all positive in
// this model): a' = a exp(d), d' = -d with d ~ normal(0, step).
KernelSpec gp_hyper_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations,
                                double step = 0.3);

}  // namespace imcmc::zoo
