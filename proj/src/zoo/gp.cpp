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

#include "imcmc/zoo/gp.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "imcmc/error.hpp"

namespace imcmc::zoo {

namespace {

const Address kCov = sym("cov_function");
const Address kPath = sym("path");
const Address kNewSubtree = sym("new_subtree");

std::size_t param_count(CovExpr::Kind k) {
  switch (k) {
    case CovExpr::Kind::Periodic: return 2;
    case CovExpr::Kind::Plus:
    case CovExpr::Kind::Times: return 0;
    default: return 1;
  }
}

const char* param_name(CovExpr::Kind k, std::size_t i) {
  switch (k) {
    case CovExpr::Kind::Constant: return "value";
    case CovExpr::Kind::Linear: return "offset";
    case CovExpr::Kind::SquaredExponential: return "length";
    case CovExpr::Kind::Periodic: return i == 0 ? "length" : "period";
    default: return "";
  }
}

void walk_tree(Context& ctx, const CovExpr& node, bool uniform) {
  if (node.is_leaf()) {
    ctx.flag(sym("done"), Distribution::bernoulli(1.0));
    return;
  }
  const double n1 = static_cast<double>(node.left->size());
  const double n2 = static_cast<double>(node.right->size());
  if (ctx.flag(sym("done"), Distribution::bernoulli(uniform ? 1.0 / (1.0 + n1 + n2) : 0.5))) return;
  if (ctx.flag(sym("recurse_left"), Distribution::bernoulli(uniform ? n1 / (n1 + n2) : 0.5))) {
    ctx.call(sym("left"), [&](Context& c) { walk_tree(c, *node.left, uniform); });
  } else {
    ctx.call(sym("right"), [&](Context& c) { walk_tree(c, *node.right, uniform); });
  }
}

KernelSpec make(std::string name, std::shared_ptr<const GenerativeProgram> model, Trace obs,
                std::shared_ptr<const GenerativeProgram> aux, std::shared_ptr<const TransformProgram> f) {
  return KernelSpec{std::move(name), std::move(model), std::move(aux), std::move(f), std::move(obs), {}};
}

}  // namespace

double CovExpr::operator()(double a, double b) const {
  switch (kind) {
    case Kind::Constant: return params[0];
    case Kind::Linear: return (a - params[0]) * (b - params[0]);
    case Kind::SquaredExponential: {
      const double r = (a - b) / params[0];
      return std::exp(-0.5 * r * r);
    }
    case Kind::Periodic: {
      const double s = std::sin(std::numbers::pi * std::abs(a - b) / params[1]) / params[0];
      return std::exp(-2.0 * s * s);
    }
    case Kind::Plus: return (*left)(a, b) + (*right)(a, b);
    case Kind::Times: return (*left)(a, b) * (*right)(a, b);
  }
  return 0;
}

std::size_t CovExpr::size() const { return is_leaf() ? 1 : 1 + left->size() + right->size(); }

std::string CovExpr::to_string() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os << "Const(" << params[0] << ")"; break;
    case Kind::Linear: os << "Lin(" << params[0] << ")"; break;
    case Kind::SquaredExponential: os << "SE(" << params[0] << ")"; break;
    case Kind::Periodic: os << "Per(" << params[0] << "," << params[1] << ")"; break;
    case Kind::Plus: os << "(" << left->to_string() << " + " << right->to_string() << ")"; break;
    case Kind::Times: os << "(" << left->to_string() << " * " << right->to_string() << ")"; break;
  }
  return os.str();
}

const std::vector<double>& cov_production_weights() {
  static const std::vector<double> w{0.175, 0.175, 0.175, 0.175, 0.15, 0.15};
  return w;
}

std::shared_ptr<const CovExpr> cov_function_prior(Context& ctx) {
  auto node = std::make_shared<CovExpr>();
  node->kind = static_cast<CovExpr::Kind>(ctx.integer(sym("kind"), Distribution::categorical(cov_production_weights())) - 1);
  for (std::size_t i = 0; i < param_count(node->kind); ++i) {
    node->params.push_back(ctx.real(sym(param_name(node->kind, i)), Distribution::gamma(1, 1)));
  }
  if (!node->is_leaf()) {
    node->left = ctx.call(sym("left"), cov_function_prior);
    node->right = ctx.call(sym("right"), cov_function_prior);
  }
  return node;
}

std::shared_ptr<const CovExpr> cov_expr_from_trace(const Trace& t, const Address& prefix) {
  auto node = std::make_shared<CovExpr>();
  const auto kind = t.at(prefix / sym("kind")).as_int();
  if (kind < 1 || kind > 6) throw Error(ErrorCode::InvalidArgument, "bad covariance kind at " + prefix.to_text());
  node->kind = static_cast<CovExpr::Kind>(kind - 1);
  for (std::size_t i = 0; i < param_count(node->kind); ++i) {
    node->params.push_back(t.at(prefix / sym(param_name(node->kind, i))).as_real());
  }
  if (!node->is_leaf()) {
    node->left = cov_expr_from_trace(t, prefix / sym("left"));
    node->right = cov_expr_from_trace(t, prefix / sym("right"));
  }
  return node;
}

Eigen::MatrixXd cov_matrix(const CovExpr& e, std::span<const double> xs) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = k(j, i) = e(xs[static_cast<std::size_t>(i)], xs[static_cast<std::size_t>(j)]);
    }
  }
  return k;
}

std::optional<Eigen::MatrixXd> jittered_covariance(const CovExpr& e, std::span<const double> xs, double noise) {
  Eigen::MatrixXd k = cov_matrix(e, xs);
  k.diagonal().array() += noise;
  if (!k.allFinite()) return std::nullopt;
  double jitter = 0;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    Eigen::MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(kj);
    if (llt.info() == Eigen::Success && (llt.matrixL().toDenseMatrix().diagonal().array() > 0).all()) return kj;
    jitter = jitter == 0 ? 1e-8 : jitter * 10;
  }
  return std::nullopt;
}

double gp_marginal_loglik(const CovExpr& e, std::span<const double> xs, std::span<const double> ys, double noise) {
  if (xs.size() != ys.size()) throw Error(ErrorCode::InvalidArgument, "gp data lengths differ");
  if (!(noise > 0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be positive");
  if (xs.empty()) return 0.0;
  const auto k = jittered_covariance(e, xs, noise);
  if (!k) return kNegInf;
  Eigen::LLT<Eigen::MatrixXd> llt(*k);
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  const Eigen::VectorXd z = l.triangularView<Eigen::Lower>().solve(y);
  const double n = static_cast<double>(ys.size());
  return -0.5 * z.squaredNorm() - l.diagonal().array().log().sum() - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

GpData gp_dataset(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  GpData d;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n == 1 ? 0.0 : 6.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    d.xs.push_back(x);
    d.ys.push_back(0.5 * x + std::sin(2.0 * std::numbers::pi * x / 1.5) + 0.1 * rng.standard_normal());
  }
  return d;
}

std::shared_ptr<const GenerativeProgram> gp_model(std::vector<double> xs) {
  return std::make_shared<GenerativeProgram>("gp", [xs = std::move(xs)](Context& ctx, const Trace&) {
    const auto cov = ctx.call(kCov, cov_function_prior);
    const double noise = ctx.real(sym("noise"), Distribution::inv_gamma(1, 1));
    if (xs.empty()) return;
    auto k = jittered_covariance(*cov, xs, noise);
    if (!k) throw Error(ErrorCode::InvalidArgument, "covariance " + cov->to_string() + " is not positive definite");
    ctx.sample(sym("ys"), Distribution::mvnormal(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(xs.size())), *k));
  });
}

Trace gp_observations(std::span<const double> ys) {
  Trace b;
  if (!ys.empty()) b.insert(sym("ys"), Value::vector(std::vector<double>(ys.begin(), ys.end())));
  return b;
}

KernelSpec gp_structure_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations, bool uniform_walk) {
  auto aux = std::make_shared<GenerativeProgram>(
      uniform_walk ? "gp_structure_aux_uniform" : "gp_structure_aux", [uniform_walk](Context& ctx, const Trace& x) {
        const auto root = cov_expr_from_trace(x, kCov);
        ctx.call(kPath, [&](Context& c) { walk_tree(c, *root, uniform_walk); });
        ctx.call(kNewSubtree, cov_function_prior);
      });
  auto f = std::make_shared<TransformProgram>("gp_structure", [](TransformContext& t) {
    Address walk = kPath;
    Address node = kCov;
    while (!t.read_bool(Handle::AuxIn, walk / sym("done"))) {
      const auto side = sym(t.read_bool(Handle::AuxIn, walk / sym("recurse_left")) ? "left" : "right");
      walk = walk / side;
      node = node / side;
    }
    t.copy_namespace(Handle::AuxIn, kPath, Handle::AuxOut, kPath);
    t.copy_namespace(Handle::ModelIn, node, Handle::AuxOut, kNewSubtree);
    t.copy_namespace(Handle::AuxIn, kNewSubtree, Handle::ModelOut, node);
    for (const auto& k : t.keys(Handle::ModelIn)) {
      if (!k.has_prefix(node)) t.copy(Handle::ModelIn, k, Handle::ModelOut, k);
    }
  });
  return make(uniform_walk ? "gp_structure_uniform" : "gp_structure", std::move(model), std::move(observations), aux,
              f);
}

KernelSpec gp_hyper_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations, double step) {
  auto aux = std::make_shared<GenerativeProgram>("gp_hyper_walk_aux", [step](Context& ctx, const Trace& x) {
    for (const auto& [a, v] : x) {
      if (v.is_continuous() && (a.has_prefix(kCov) || a == sym("noise"))) {
        ctx.sample(Address(sym("delta")) / a, Distribution::normal(0, step));
      }
    }
  });
  auto f = std::make_shared<TransformProgram>("gp_hyper_walk", [](TransformContext& t) {
    for (const auto& a : t.keys(Handle::ModelIn)) {
      const Address d = Address(sym("delta")) / a;
      if (!t.has(Handle::AuxIn, d)) {
        t.copy(Handle::ModelIn, a, Handle::ModelOut, a);
        continue;
      }
      const DiffScalar v = t.read_real(Handle::ModelIn, a);
      const DiffScalar delta = t.read_real(Handle::AuxIn, d);
      t.write_real(Handle::ModelOut, a, v * exp(delta));
      t.write_real(Handle::AuxOut, d, -delta);
    }
  });
  return make("gp_hyper_walk", std::move(model), std::move(observations), aux, f);
}

}  // namespace imcmc::zoo
