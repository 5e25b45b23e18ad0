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

#include "imcmc/zoo/hmc.hpp"

#include "imcmc/error.hpp"

namespace imcmc::zoo {

namespace {

Address momentum(const Address& a) { return Address(sym("momentum")) / a; }

}  // namespace

HmcTarget standard_normal_target(std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::InvalidArgument, "target dimension must be positive");
  HmcTarget t;
  for (std::size_t i = 1; i <= dim; ++i) t.addresses.push_back(idx("z", static_cast<std::int64_t>(i)));
  t.model = std::make_shared<GenerativeProgram>("standard_normal", [addrs = t.addresses](Context& ctx, const Trace&) {
    for (const auto& a : addrs) ctx.sample(a, Distribution::normal(0, 1));
  });
  t.grad_log_density = [](const std::vector<DiffScalar>& q) {
    std::vector<DiffScalar> g;
    g.reserve(q.size());
    for (const auto& v : q) g.push_back(-v);
    return g;
  };
  return t;
}

KernelSpec hmc_kernel(const HmcTarget& target, double eps, std::size_t steps, bool negate_momentum) {
  if (!(eps > 0) || steps == 0) throw Error(ErrorCode::InvalidArgument, "hmc needs eps > 0 and at least one step");
  auto aux = std::make_shared<GenerativeProgram>("hmc_momentum", [addrs = target.addresses](Context& ctx, const Trace&) {
    for (const auto& a : addrs) ctx.sample(momentum(a), Distribution::normal(0, 1));
  });
  auto f = std::make_shared<TransformProgram>(
      negate_momentum ? "hmc_leapfrog" : "hmc_leapfrog_no_negation",
      [addrs = target.addresses, grad = target.grad_log_density, eps, steps, negate_momentum](TransformContext& t) {
        const std::size_t n = addrs.size();
        std::vector<DiffScalar> q, p;
        for (const auto& a : addrs) {
          q.push_back(t.read_real(Handle::ModelIn, a));
          p.push_back(t.read_real(Handle::AuxIn, momentum(a)));
        }
        auto g = grad(q);
        for (std::size_t s = 0; s < steps; ++s) {
          for (std::size_t i = 0; i < n; ++i) p[i] = p[i] + 0.5 * eps * g[i];
          for (std::size_t i = 0; i < n; ++i) q[i] = q[i] + eps * p[i];
          g = grad(q);
          for (std::size_t i = 0; i < n; ++i) p[i] = p[i] + 0.5 * eps * g[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
          t.write_real(Handle::ModelOut, addrs[i], q[i]);
          t.write_real(Handle::AuxOut, momentum(addrs[i]), negate_momentum ? -p[i] : p[i]);
        }
      });
  return KernelSpec{f->name(), target.model, aux, f, target.observations, {}};
}

}  // namespace imcmc::zoo
