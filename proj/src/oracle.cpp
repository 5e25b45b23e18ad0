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

#include "imcmc/oracle.hpp"

#include <cmath>
#include <numbers>

#include "imcmc/error.hpp"
#include "imcmc/trace_json.hpp"

namespace imcmc::oracle {

namespace {

struct ZeroDensity {};

class EnumContext final : public Context {
 public:
  EnumContext(std::vector<std::size_t>& choice, const Trace& constraints)
      : choice_(choice), constraints_(constraints) {}

  Trace trace;
  double log_weight = 0;
  std::vector<std::size_t> counts;
  std::size_t constrained_visits = 0;

 protected:
  Value visit(const Address& full, const Distribution& d) override {
    if (const Value* v = constraints_.find(full)) {
      log_weight += d.logpdf(*v);
      trace.insert(full, *v);
      ++constrained_visits;
      if (log_weight == kNegInf) throw ZeroDensity{};
      return *v;
    }
    const auto support = enumerate_support(d);
    const std::size_t depth = counts.size();
    if (depth == choice_.size()) choice_.push_back(0);
    counts.push_back(support.size());
    const Value& v = support.at(choice_[depth]);
    log_weight += d.logpdf(v);
    trace.insert(full, v);
    return v;
  }

 private:
  std::vector<std::size_t>& choice_;
  const Trace& constraints_;
};

std::string key_of(const Trace& x) { return trace_to_json(x).dump(); }

void cycle_walk(const Cycle& cycle, std::size_t m, const Trace& x, double w, bool checked,
                const FiniteStateIndex& index, Eigen::RowVectorXd& row) {
  const auto& kernels = cycle.kernels();
  if (m == kernels.size()) {
    const auto j = index.find(x);
    if (!j) throw Error(ErrorCode::InvalidArgument, "cycle reached a state outside the index");
    row(static_cast<Eigen::Index>(*j)) += w;
    return;
  }
  const auto& spec = kernels[m];
  for (const auto& y : enumerate_program(*spec.auxiliary, merge(x, spec.observations))) {
    const double q = std::exp(y.log_weight);
    const Proposal prop = propose(spec, x, y.trace, checked);
    if (prop.alpha > 0) cycle_walk(cycle, m + 1, prop.model_out, w * q * prop.alpha, checked, index, row);
    if (prop.alpha < 1) cycle_walk(cycle, m + 1, x, w * q * (1 - prop.alpha), checked, index, row);
  }
}

}  // namespace

std::vector<Value> enumerate_support(const Distribution& d) {
  std::vector<Value> out;
  const auto& s = d.scalars();
  switch (d.kind()) {
    case Distribution::Kind::Bernoulli:
      if (s[0] < 1) out.push_back(Value::boolean(false));
      if (s[0] > 0) out.push_back(Value::boolean(true));
      break;
    case Distribution::Kind::UniformDiscrete:
      for (auto v = static_cast<std::int64_t>(s[0]); v <= static_cast<std::int64_t>(s[1]); ++v) {
        out.push_back(Value::integer(v));
      }
      break;
    case Distribution::Kind::Categorical: {
      const auto& w = d.vectors().at(0);
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0) out.push_back(Value::integer(static_cast<std::int64_t>(i + 1)));
      }
      break;
    }
    case Distribution::Kind::PoissonPlusOne: {
      double mass = 0;
      for (std::int64_t v = 1; 1.0 - mass >= 1e-12 && v < 100000; ++v) {
        const Value val = Value::integer(v);
        const double p = std::exp(d.logpdf(val));
        mass += p;
        if (p > 0) out.push_back(val);
      }
      break;
    }
    default:
      throw Error(ErrorCode::NotEnumerable, "cannot enumerate " + d.name());
  }
  return out;
}

std::vector<WeightedTrace> enumerate_program(const GenerativeProgram& p, const Trace& args, const Trace& constraints) {
  std::vector<WeightedTrace> out;
  std::vector<std::size_t> choice;
  for (;;) {
    EnumContext ctx(choice, constraints);
    try {
      p.run(ctx, args);
      if (ctx.constrained_visits == constraints.size() && ctx.log_weight > kNegInf) {
        out.push_back({std::move(ctx.trace), ctx.log_weight});
      }
    } catch (const ZeroDensity&) {
    }
    choice.resize(ctx.counts.size());
    while (!choice.empty() && choice.back() + 1 >= ctx.counts[choice.size() - 1]) choice.pop_back();
    if (choice.empty()) break;
    ++choice.back();
  }
  return out;
}

FiniteStateIndex::FiniteStateIndex(const GenerativeProgram& model, const Trace& observations) {
  double max_lw = kNegInf;
  for (auto& w : enumerate_program(model, {}, observations)) {
    Trace x = without(w.trace, observations.keys());
    lookup_.emplace(key_of(x), states_.size());
    states_.push_back(std::move(x));
    log_joint_.push_back(w.log_weight);
    max_lw = std::max(max_lw, w.log_weight);
  }
  if (states_.empty()) throw Error(ErrorCode::NotEnumerable, "model has no positive-density traces");
  double sum = 0;
  for (double lw : log_joint_) sum += std::exp(lw - max_lw);
  log_evidence_ = max_lw + std::log(sum);
}

std::optional<std::size_t> FiniteStateIndex::find(const Trace& x) const {
  auto it = lookup_.find(key_of(x));
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd FiniteStateIndex::posterior() const {
  Eigen::VectorXd pi(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) pi(static_cast<Eigen::Index>(i)) = std::exp(log_joint_[i] - log_evidence_);
  return pi;
}

Eigen::MatrixXd brute_force_kernel(const KernelSpec& spec, const FiniteStateIndex& index, bool checked) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Trace& x = index.state(static_cast<std::size_t>(i));
    for (const auto& y : enumerate_program(*spec.auxiliary, merge(x, spec.observations))) {
      const double q = std::exp(y.log_weight);
      const Proposal prop = propose(spec, x, y.trace, checked);
      if (prop.alpha > 0) {
        const auto j = index.find(prop.model_out);
        if (!j) throw Error(ErrorCode::InvalidArgument, "accepted proposal outside the enumerated states");
        k(i, static_cast<Eigen::Index>(*j)) += q * prop.alpha;
      }
      k(i, i) += q * (1 - prop.alpha);
    }
  }
  return k;
}

Eigen::MatrixXd brute_force_kernel(const Cycle& cycle, const FiniteStateIndex& index, bool checked) {
  const auto n = static_cast<Eigen::Index>(index.size());
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n);
    cycle_walk(cycle, 0, index.state(static_cast<std::size_t>(i)), 1.0, checked, index, row);
    k.row(i) = row;
  }
  return k;
}

double detailed_balance_residual(const Eigen::MatrixXd& k, const Eigen::VectorXd& pi) {
  if (k.rows() != k.cols() || k.rows() != pi.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  double r = 0;
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) r = std::max(r, std::abs(pi(i) * k(i, j) - pi(j) * k(j, i)));
  }
  return r;
}

double stationarity_residual(const Eigen::MatrixXd& k, const Eigen::VectorXd& pi) {
  if (k.rows() != k.cols() || k.rows() != pi.size()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  return (pi.transpose() * k - pi.transpose()).cwiseAbs().maxCoeff();
}

double row_sum_residual(const Eigen::MatrixXd& k) {
  if ((k.array() < 0).any()) return std::numeric_limits<double>::infinity();
  return (k.rowwise().sum().array() - 1.0).abs().maxCoeff();
}

QuadratureResult toy_posterior_k2(std::span<const double> data, double tol, int max_halvings) {
  constexpr double kPriorSd = 10;
  constexpr double kRange = 8 * kPriorSd;
  auto at_resolution = [&](std::size_t m) {
    const double h = 2 * kRange / static_cast<double>(m);
    std::vector<double> grid(m + 1), g(m + 1);
    const std::size_t n = data.size();
    // a[j * n + i] = exp(-(x_i - m_j)^2 / 2); the (2 pi)^(-n/2) factor is common
    // to both k and cancels.
    std::vector<double> a((m + 1) * n);
    for (std::size_t j = 0; j <= m; ++j) {
      grid[j] = -kRange + h * static_cast<double>(j);
      const double w = (j == 0 || j == m) ? 0.5 : 1.0;
      g[j] = w * h * std::exp(normal_logpdf(grid[j], 0, kPriorSd));
      for (std::size_t i = 0; i < n; ++i) {
        const double r = data[i] - grid[j];
        a[j * n + i] = std::exp(-0.5 * r * r);
      }
    }
    // Normalize the discretized prior so both k share the same truncated mass.
    double mass = 0;
    for (double v : g) mass += v;
    for (double& v : g) v /= mass;
    double z1 = 0, z2 = 0;
    for (std::size_t j1 = 0; j1 <= m; ++j1) {
      const double* a1 = &a[j1 * n];
      double l1 = 1;
      for (std::size_t i = 0; i < n; ++i) l1 *= a1[i];
      z1 += g[j1] * l1;
      double row = 0;
      for (std::size_t j2 = 0; j2 <= m; ++j2) {
        const double* a2 = &a[j2 * n];
        double l2 = 1;
        for (std::size_t i = 0; i < n; ++i) l2 *= 0.5 * (a1[i] + a2[i]);
        row += g[j2] * l2;
      }
      z2 += g[j1] * row;
    }
    if (!(z1 + z2 > 0) || !std::isfinite(z1 + z2)) {
      throw Error(ErrorCode::InvalidArgument, "marginal likelihood underflowed; dataset too large for this oracle");
    }
    return z2 / (z1 + z2);
  };
  std::size_t m = 1600;
  QuadratureResult out;
  double prev = at_resolution(m);
  for (int h = 0; h < max_halvings; ++h) {
    m *= 2;
    const double cur = at_resolution(m);
    out.p_k2 = cur;
    out.refinement_change = std::abs(cur - prev);
    if (out.refinement_change < tol) break;
    prev = cur;
  }
  return out;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw Error(ErrorCode::InvalidArgument, "distributions differ in length");
  double sp = 0, sq = 0, d = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || q[i] < 0) throw Error(ErrorCode::InvalidArgument, "negative probability");
    sp += p[i];
    sq += q[i];
    d += std::abs(p[i] - q[i]);
  }
  if (std::abs(sp - 1) > 1e-9 || std::abs(sq - 1) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "probabilities do not sum to 1");
  }
  return 0.5 * d;
}

}  // namespace imcmc::oracle
