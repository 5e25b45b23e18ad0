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

#include "imcmc/zoo/toy.hpp"

#include <cmath>

namespace imcmc::zoo {

namespace {

const Address kK = sym("k");
Address mu(std::int64_t j) { return idx("mu", j); }

std::shared_ptr<const GenerativeProgram> split_aux() {
  return std::make_shared<GenerativeProgram>("toy_split_aux", [](Context& ctx, const Trace& x) {
    if (x.at(kK).as_int() == 1) ctx.sample(sym("u"), Distribution::beta(2, 2));
  });
}

enum class MergeBug { None, Sqrt, Misspelled };

std::shared_ptr<const TransformProgram> split_merge_transform(MergeBug bug) {
  return std::make_shared<TransformProgram>("toy_split_merge", [bug](TransformContext& t) {
    const auto k = t.read_int(Handle::ModelIn, kK);
    if (k == 1) {
      t.write_discrete(Handle::ModelOut, kK, Value::integer(2));
      const DiffScalar m = t.read_real(Handle::ModelIn, mu(1));
      const DiffScalar u = t.read_real(Handle::AuxIn, sym("u"));
      t.write_real(Handle::ModelOut, mu(1), m - u);
      t.write_real(Handle::ModelOut, bug == MergeBug::Misspelled ? idx("nu", 2) : mu(2), m + u);
    } else {
      t.write_discrete(Handle::ModelOut, kK, Value::integer(1));
      const DiffScalar m1 = t.read_real(Handle::ModelIn, mu(1));
      const DiffScalar m2 = t.read_real(Handle::ModelIn, mu(2));
      const DiffScalar m = bug == MergeBug::Sqrt ? sqrt(m1 * m2) : (m1 + m2) / 2.0;
      t.write_real(Handle::ModelOut, mu(1), m);
      t.write_real(Handle::AuxOut, sym("u"), m2 - m);
    }
  });
}

KernelSpec make(std::string name, std::shared_ptr<const GenerativeProgram> model, Trace obs,
                std::shared_ptr<const GenerativeProgram> aux, std::shared_ptr<const TransformProgram> f) {
  return KernelSpec{std::move(name), std::move(model), std::move(aux), std::move(f), std::move(obs), {}};
}

}  // namespace

std::shared_ptr<const GenerativeProgram> toy_model(std::size_t n) {
  return std::make_shared<GenerativeProgram>("toy", [n](Context& ctx, const Trace&) {
    const auto k = ctx.integer(kK, Distribution::uniform_discrete(1, 2));
    std::vector<double> means;
    for (std::int64_t j = 1; j <= k; ++j) means.push_back(ctx.real(mu(j), Distribution::normal(0, 10)));
    const std::vector<double> weights(static_cast<std::size_t>(k), 1.0 / static_cast<double>(k));
    const std::vector<double> vars(static_cast<std::size_t>(k), 1.0);
    const auto lik = Distribution::mixture_of_normals(weights, means, vars);
    for (std::size_t i = 1; i <= n; ++i) ctx.sample(idx("x", static_cast<std::int64_t>(i)), lik);
  });
}

Trace toy_observations(std::span<const double> data) {
  Trace b;
  for (std::size_t i = 0; i < data.size(); ++i) b.insert(idx("x", static_cast<std::int64_t>(i + 1)), Value::real(data[i]));
  return b;
}

std::vector<double> toy_dataset() {
  return {-1.92, -1.52, -1.2, -0.88, -0.48, 0.32, 0.72, 1.04, 1.44, 2.0};
}

KernelSpec toy_split_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  return make("toy_split_merge", std::move(model), std::move(observations), split_aux(),
              split_merge_transform(MergeBug::None));
}

KernelSpec toy_sqrt_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  return make("toy_sqrt_merge", std::move(model), std::move(observations), split_aux(),
              split_merge_transform(MergeBug::Sqrt));
}

KernelSpec toy_misspelled_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  return make("toy_misspelled", std::move(model), std::move(observations), split_aux(),
              split_merge_transform(MergeBug::Misspelled));
}

KernelSpec toy_random_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations, double step) {
  auto aux = std::make_shared<GenerativeProgram>("toy_random_walk_aux", [step](Context& ctx, const Trace& x) {
    const auto k = x.at(kK).as_int();
    for (std::int64_t j = 1; j <= k; ++j) ctx.sample(idx("delta", j), Distribution::normal(0, step));
  });
  auto f = std::make_shared<TransformProgram>("toy_random_walk", [](TransformContext& t) {
    const auto k = t.read_int(Handle::ModelIn, kK);
    t.copy(Handle::ModelIn, kK, Handle::ModelOut, kK);
    for (std::int64_t j = 1; j <= k; ++j) {
      const DiffScalar m = t.read_real(Handle::ModelIn, mu(j));
      const DiffScalar d = t.read_real(Handle::AuxIn, idx("delta", j));
      t.write_real(Handle::ModelOut, mu(j), m + d);
      t.write_real(Handle::AuxOut, idx("delta", j), -d);
    }
  });
  return make("toy_random_walk", std::move(model), std::move(observations), aux, f);
}

KernelSpec toy_cluster_swap_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  auto aux = std::make_shared<GenerativeProgram>("toy_empty_aux", [](Context&, const Trace&) {});
  auto f = std::make_shared<TransformProgram>("toy_cluster_swap", [](TransformContext& t) {
    const auto k = t.read_int(Handle::ModelIn, kK);
    t.copy(Handle::ModelIn, kK, Handle::ModelOut, kK);
    if (k == 2) {
      t.copy(Handle::ModelIn, mu(1), Handle::ModelOut, mu(2));
      t.copy(Handle::ModelIn, mu(2), Handle::ModelOut, mu(1));
    } else {
      t.copy(Handle::ModelIn, mu(1), Handle::ModelOut, mu(1));
    }
  });
  return make("toy_cluster_swap", std::move(model), std::move(observations), aux, f);
}

}  // namespace imcmc::zoo
