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

#include "imcmc/zoo/discrete.hpp"

namespace imcmc::zoo {

namespace {

Trace observed_true() {
  Trace b;
  b.insert(sym("o"), Value::boolean(true));
  return b;
}

Address c(std::int64_t j) { return idx("c", j); }

}  // namespace

KernelSpec flip_kernel() {
  auto model = std::make_shared<GenerativeProgram>(
      "flip_model", [](Context& ctx, const Trace&) { ctx.sample(sym("x"), Distribution::bernoulli(0.3)); });
  auto aux = std::make_shared<GenerativeProgram>("empty", [](Context&, const Trace&) {});
  auto f = std::make_shared<TransformProgram>("flip", [](TransformContext& t) {
    t.write_discrete(Handle::ModelOut, sym("x"), Value::boolean(!t.read_bool(Handle::ModelIn, sym("x"))));
  });
  return KernelSpec{"flip", model, aux, f, {}, {}};
}

KernelSpec birth_death_kernel() {
  auto model = std::make_shared<GenerativeProgram>("birth_death_model", [](Context& ctx, const Trace&) {
    const auto k = ctx.integer(sym("k"), Distribution::uniform_discrete(1, 4));
    int on = 0;
    for (std::int64_t j = 1; j <= k; ++j) on += ctx.flag(c(j), Distribution::bernoulli(0.3)) ? 1 : 0;
    ctx.sample(sym("o"), Distribution::bernoulli(0.2 + 0.6 * on / static_cast<double>(k)));
  });
  auto aux = std::make_shared<GenerativeProgram>("birth_death_aux", [](Context& ctx, const Trace& x) {
    const auto k = x.at(sym("k")).as_int();
    const double p_birth = k == 1 ? 1.0 : (k == 4 ? 0.0 : 0.5);
    if (ctx.flag(sym("birth"), Distribution::bernoulli(p_birth))) {
      ctx.sample(sym("pos"), Distribution::uniform_discrete(1, k + 1));
      ctx.sample(sym("new_c"), Distribution::bernoulli(0.3));
    } else {
      ctx.sample(sym("pos"), Distribution::uniform_discrete(1, k));
    }
  });
  auto f = std::make_shared<TransformProgram>("birth_death", [](TransformContext& t) {
    const auto k = t.read_int(Handle::ModelIn, sym("k"));
    const bool birth = t.read_bool(Handle::AuxIn, sym("birth"));
    const auto pos = t.read_int(Handle::AuxIn, sym("pos"));
    t.write_discrete(Handle::AuxOut, sym("birth"), Value::boolean(!birth));
    t.write_discrete(Handle::AuxOut, sym("pos"), Value::integer(pos));
    if (birth) {
      t.write_discrete(Handle::ModelOut, sym("k"), Value::integer(k + 1));
      for (std::int64_t j = 1; j < pos; ++j) t.copy(Handle::ModelIn, c(j), Handle::ModelOut, c(j));
      t.write_discrete(Handle::ModelOut, c(pos), t.read_discrete(Handle::AuxIn, sym("new_c")));
      for (std::int64_t j = pos; j <= k; ++j) t.copy(Handle::ModelIn, c(j), Handle::ModelOut, c(j + 1));
    } else {
      t.write_discrete(Handle::ModelOut, sym("k"), Value::integer(k - 1));
      for (std::int64_t j = 1; j < pos; ++j) t.copy(Handle::ModelIn, c(j), Handle::ModelOut, c(j));
      t.write_discrete(Handle::AuxOut, sym("new_c"), t.read_discrete(Handle::ModelIn, c(pos)));
      for (std::int64_t j = pos + 1; j <= k; ++j) t.copy(Handle::ModelIn, c(j), Handle::ModelOut, c(j - 1));
    }
  });
  return KernelSpec{"birth_death", model, aux, f, observed_true(), {}};
}

std::shared_ptr<const GenerativeProgram> categorical_pair_model() {
  static const auto model = std::make_shared<const GenerativeProgram>("categorical_pair", [](Context& ctx, const Trace&) {
    const auto prior = Distribution::categorical({0.2, 0.5, 0.3});
    const auto z1 = ctx.integer(sym("z1"), prior);
    const auto z2 = ctx.integer(sym("z2"), prior);
    ctx.sample(sym("o"), Distribution::bernoulli(z1 == z2 ? 0.9 : 0.2));
  });
  return model;
}

KernelSpec categorical_shift_kernel(bool buggy) {
  auto aux = std::make_shared<GenerativeProgram>("shift_aux", [](Context& ctx, const Trace&) {
    ctx.sample(sym("which"), Distribution::uniform_discrete(1, 2));
    ctx.sample(sym("dir"), Distribution::bernoulli(0.5));
  });
  auto f = std::make_shared<TransformProgram>(buggy ? "shift_buggy" : "shift", [buggy](TransformContext& t) {
    const auto which = t.read_int(Handle::AuxIn, sym("which"));
    const bool dir = t.read_bool(Handle::AuxIn, sym("dir"));
    const Address target = sym(which == 1 ? "z1" : "z2");
    const Address other = sym(which == 1 ? "z2" : "z1");
    const auto z = t.read_int(Handle::ModelIn, target);
    std::int64_t moved = (z - 1 + (dir ? 1 : 2)) % 3 + 1;
    if (buggy && z == 3) moved = 2;
    t.write_discrete(Handle::ModelOut, target, Value::integer(moved));
    t.copy(Handle::ModelIn, other, Handle::ModelOut, other);
    t.write_discrete(Handle::AuxOut, sym("which"), Value::integer(which));
    t.write_discrete(Handle::AuxOut, sym("dir"), Value::boolean(!dir));
  });
  return KernelSpec{buggy ? "categorical_shift_buggy" : "categorical_shift", categorical_pair_model(), aux, f,
                    observed_true(), {}};
}

}  // namespace imcmc::zoo
