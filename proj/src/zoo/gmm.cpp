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

#include "imcmc/zoo/gmm.hpp"

#include <cmath>

#include "imcmc/error.hpp"

namespace imcmc::zoo {

namespace {

const Address kK = sym("k");
const Address kWeights = sym("weights");
Address mu(std::int64_t j) { return idx("mu", j); }
Address var(std::int64_t j) { return idx("var", j); }

KernelSpec make(std::string name, std::shared_ptr<const GenerativeProgram> model, Trace obs,
                std::shared_ptr<const GenerativeProgram> aux, std::shared_ptr<const TransformProgram> f) {
  return KernelSpec{std::move(name), std::move(model), std::move(aux), std::move(f), std::move(obs), {}};
}

void copy_cluster(TransformContext& t, std::int64_t from, std::int64_t to) {
  t.copy(Handle::ModelIn, mu(from), Handle::ModelOut, mu(to));
  t.copy(Handle::ModelIn, var(from), Handle::ModelOut, var(to));
}

std::vector<std::int64_t> merge_candidates(const Trace& x, std::int64_t k) {
  std::vector<std::int64_t> out;
  if (k < 2) return out;
  const double last = x.at(mu(k)).as_real();
  for (std::int64_t j = 1; j < k; ++j) {
    if (x.at(mu(j)).as_real() < last) out.push_back(j);
  }
  return out;
}

// Which weight coordinate is treated as determined when moving between k
// and k + 1 clusters with cluster j involved. It must avoid j (and the
// last cluster on the larger side), and both directions must agree.
std::pair<std::size_t, std::size_t> determined_pair(std::int64_t k_small, std::int64_t j) {
  if (k_small == 1) return {0, 1};
  const std::size_t d = j == 1 ? 1 : 0;
  return {d, d};
}

}  // namespace

std::shared_ptr<const GenerativeProgram> gmm_model(std::size_t n) {
  return std::make_shared<GenerativeProgram>("gmm", [n](Context& ctx, const Trace&) {
    const auto k = ctx.integer(kK, Distribution::poisson_plus_one(1.0));
    std::vector<double> means;
    std::vector<double> vars;
    for (std::int64_t j = 1; j <= k; ++j) {
      means.push_back(ctx.real(mu(j), Distribution::normal(0, 10)));
      vars.push_back(ctx.real(var(j), Distribution::inv_gamma(1, 10)));
    }
    const Value w = ctx.sample(kWeights, Distribution::dirichlet(std::vector<double>(static_cast<std::size_t>(k), 2.0)));
    const auto ws = w.as_vector();
    const auto lik = Distribution::mixture_of_normals(std::vector<double>(ws.begin(), ws.end()), means, vars);
    for (std::size_t i = 1; i <= n; ++i) ctx.sample(idx("x", static_cast<std::int64_t>(i)), lik);
  });
}

Trace gmm_observations(std::span<const double> data) {
  Trace b;
  for (std::size_t i = 0; i < data.size(); ++i) b.insert(idx("x", static_cast<std::int64_t>(i + 1)), Value::real(data[i]));
  return b;
}

std::vector<double> gmm_dataset(std::size_t n, std::uint64_t seed) {
  RandomSource rng(seed);
  const auto d = Distribution::mixture_of_normals({0.3, 0.4, 0.3}, {-4.0, 0.0, 5.0}, {1.0, 0.5, 1.7});
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(d.sample(rng).as_real());
  return out;
}

Trace gmm_trace(std::span<const double> means, std::span<const double> vars, std::span<const double> weights) {
  if (means.size() != vars.size() || means.size() != weights.size() || means.empty()) {
    throw Error(ErrorCode::InvalidArgument, "gmm_trace: parameter lengths differ");
  }
  double total = 0;
  for (double w : weights) total += w;
  if (std::abs(total - 1.0) > kSimplexTolerance) throw Error(ErrorCode::InvalidArgument, "gmm_trace: weights must sum to 1");
  Trace x;
  x.insert(kK, Value::integer(static_cast<std::int64_t>(means.size())));
  for (std::size_t j = 0; j < means.size(); ++j) {
    x.insert(mu(static_cast<std::int64_t>(j + 1)), Value::real(means[j]));
    x.insert(var(static_cast<std::int64_t>(j + 1)), Value::real(vars[j]));
  }
  x.insert(kWeights, Value::vector(std::vector<double>(weights.begin(), weights.end())));
  return x;
}

KernelSpec gmm_split_merge_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  auto aux = std::make_shared<GenerativeProgram>("gmm_split_merge_aux", [](Context& ctx, const Trace& x) {
    const auto k = x.at(kK).as_int();
    const auto candidates = merge_candidates(x, k);
    const bool split = ctx.flag(sym("split"), Distribution::bernoulli(candidates.empty() ? 1.0 : 0.5));
    if (split) {
      ctx.sample(sym("cluster"), Distribution::uniform_discrete(1, k));
      ctx.sample(sym("u1"), Distribution::beta(2, 2));
      ctx.sample(sym("u2"), Distribution::beta(2, 2));
      ctx.sample(sym("u3"), Distribution::beta(1, 1));
    } else {
      std::vector<double> w(static_cast<std::size_t>(k - 1), 0.0);
      for (auto j : candidates) w[static_cast<std::size_t>(j - 1)] = 1.0 / static_cast<double>(candidates.size());
      ctx.sample(sym("cluster"), Distribution::categorical(std::move(w)));
    }
  });

  auto f = std::make_shared<TransformProgram>("gmm_split_merge", [](TransformContext& t) {
    const bool split = t.read_bool(Handle::AuxIn, sym("split"));
    const auto j = t.read_int(Handle::AuxIn, sym("cluster"));
    const auto k = t.read_int(Handle::ModelIn, kK);
    t.write_discrete(Handle::AuxOut, sym("split"), Value::boolean(!split));
    t.copy(Handle::AuxIn, sym("cluster"), Handle::AuxOut, sym("cluster"));

    if (split) {
      t.write_discrete(Handle::ModelOut, kK, Value::integer(k + 1));
      const auto [d_in, d_out] = determined_pair(k, j);
      const auto w_in = t.read_simplex(Handle::ModelIn, kWeights, d_in);
      const DiffScalar w = w_in[static_cast<std::size_t>(j - 1)];
      const DiffScalar m = t.read_real(Handle::ModelIn, mu(j));
      const DiffScalar v = t.read_real(Handle::ModelIn, var(j));
      const DiffScalar u1 = t.read_real(Handle::AuxIn, sym("u1"));
      const DiffScalar u2 = t.read_real(Handle::AuxIn, sym("u2"));
      const DiffScalar u3 = t.read_real(Handle::AuxIn, sym("u3"));

      const DiffScalar w1 = w * u1;
      const DiffScalar w2 = w * (1.0 - u1);
      const DiffScalar s = sqrt(v);
      const DiffScalar shrink = 1.0 - u2 * u2;
      t.write_real(Handle::ModelOut, mu(j), m - u2 * s * sqrt(w2 / w1));
      t.write_real(Handle::ModelOut, mu(k + 1), m + u2 * s * sqrt(w1 / w2));
      t.write_real(Handle::ModelOut, var(j), u3 * shrink * v * w / w1);
      t.write_real(Handle::ModelOut, var(k + 1), (1.0 - u3) * shrink * v * w / w2);

      VectorOut out(static_cast<std::size_t>(k + 1));
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (i == static_cast<std::size_t>(j - 1)) {
          out.set(i, w1);
        } else if (i == static_cast<std::size_t>(k)) {
          out.set(i, w2);
        } else if (i == d_out) {
          out.set(i, w_in[i]);
        } else {
          out.copy(i, Handle::ModelIn, kWeights, i);
        }
      }
      t.write_simplex(Handle::ModelOut, kWeights, out, d_out);
      for (std::int64_t i = 1; i <= k; ++i) {
        if (i != j) copy_cluster(t, i, i);
      }
    } else {
      const std::int64_t big = k;
      t.write_discrete(Handle::ModelOut, kK, Value::integer(big - 1));
      const auto [d_out, d_in] = determined_pair(big - 1, j);
      const auto w_in = t.read_simplex(Handle::ModelIn, kWeights, d_in);
      const DiffScalar w1 = w_in[static_cast<std::size_t>(j - 1)];
      const DiffScalar w2 = w_in[static_cast<std::size_t>(big - 1)];
      const DiffScalar m1 = t.read_real(Handle::ModelIn, mu(j));
      const DiffScalar m2 = t.read_real(Handle::ModelIn, mu(big));
      const DiffScalar v1 = t.read_real(Handle::ModelIn, var(j));
      const DiffScalar v2 = t.read_real(Handle::ModelIn, var(big));

      const DiffScalar w = w1 + w2;
      const DiffScalar delta = m2 - m1;
      const DiffScalar spread = w1 * v1 + w2 * v2;
      const DiffScalar v = spread / w + w1 * w2 * delta * delta / (w * w);
      t.write_real(Handle::ModelOut, mu(j), (w1 * m1 + w2 * m2) / w);
      t.write_real(Handle::ModelOut, var(j), v);
      t.write_real(Handle::AuxOut, sym("u1"), w1 / w);
      t.write_real(Handle::AuxOut, sym("u2"), delta * sqrt(w1 * w2) / (w * sqrt(v)));
      t.write_real(Handle::AuxOut, sym("u3"), w1 * v1 / spread);

      VectorOut out(static_cast<std::size_t>(big - 1));
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (i == static_cast<std::size_t>(j - 1)) {
          out.set(i, w);
        } else if (i == d_out) {
          out.set(i, w_in[i]);
        } else {
          out.copy(i, Handle::ModelIn, kWeights, i);
        }
      }
      t.write_simplex(Handle::ModelOut, kWeights, out, d_out);
      for (std::int64_t i = 1; i < big; ++i) {
        if (i != j) copy_cluster(t, i, i);
      }
    }
  });
  return make("gmm_split_merge", std::move(model), std::move(observations), aux, f);
}

KernelSpec gmm_cluster_swap_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations) {
  auto aux = std::make_shared<GenerativeProgram>("gmm_cluster_swap_aux", [](Context& ctx, const Trace& x) {
    ctx.sample(sym("cluster"), Distribution::uniform_discrete(1, x.at(kK).as_int()));
  });
  auto f = std::make_shared<TransformProgram>("gmm_cluster_swap", [](TransformContext& t) {
    const auto j = t.read_int(Handle::AuxIn, sym("cluster"));
    const auto k = t.read_int(Handle::ModelIn, kK);
    t.copy(Handle::AuxIn, sym("cluster"), Handle::AuxOut, sym("cluster"));
    t.copy(Handle::ModelIn, kK, Handle::ModelOut, kK);
    if (j == k) {
      for (std::int64_t i = 1; i <= k; ++i) copy_cluster(t, i, i);
      t.copy(Handle::ModelIn, kWeights, Handle::ModelOut, kWeights);
      return;
    }
    for (std::int64_t i = 1; i <= k; ++i) copy_cluster(t, i, i == j ? k : (i == k ? j : i));
    std::vector<std::size_t> perm(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::swap(perm[static_cast<std::size_t>(j - 1)], perm[static_cast<std::size_t>(k - 1)]);
    const std::size_t d = k == 2 ? 1 : (j == 1 ? 1 : 0);
    permute_simplex(t, Handle::ModelIn, kWeights, Handle::ModelOut, kWeights, perm, d);
  });
  return make("gmm_cluster_swap", std::move(model), std::move(observations), aux, f);
}

KernelSpec gmm_random_walk_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations, double step) {
  auto aux = std::make_shared<GenerativeProgram>("gmm_random_walk_aux", [step](Context& ctx, const Trace& x) {
    const auto k = x.at(kK).as_int();
    for (std::int64_t j = 1; j <= k; ++j) ctx.sample(idx("delta", j), Distribution::normal(0, step));
  });
  auto f = std::make_shared<TransformProgram>("gmm_random_walk", [](TransformContext& t) {
    const auto k = t.read_int(Handle::ModelIn, kK);
    t.copy(Handle::ModelIn, kK, Handle::ModelOut, kK);
    t.copy(Handle::ModelIn, kWeights, Handle::ModelOut, kWeights);
    for (std::int64_t j = 1; j <= k; ++j) {
      const DiffScalar m = t.read_real(Handle::ModelIn, mu(j));
      const DiffScalar d = t.read_real(Handle::AuxIn, idx("delta", j));
      t.write_real(Handle::ModelOut, mu(j), m + d);
      t.write_real(Handle::AuxOut, idx("delta", j), -d);
      t.copy(Handle::ModelIn, var(j), Handle::ModelOut, var(j));
    }
  });
  return make("gmm_random_walk", std::move(model), std::move(observations), aux, f);
}

KernelSpec gmm_birth_death_kernel(std::shared_ptr<const GenerativeProgram> model, Trace observations, bool end_only) {
  auto aux = std::make_shared<GenerativeProgram>("gmm_birth_death_aux", [end_only](Context& ctx, const Trace& x) {
    const auto k = x.at(kK).as_int();
    const bool birth = ctx.flag(sym("is_birth"), Distribution::bernoulli(k == 1 ? 1.0 : 0.5));
    if (birth) {
      ctx.sample(sym("new_mu"), Distribution::normal(0, 10));
      ctx.sample(sym("new_var"), Distribution::inv_gamma(1, 10));
      ctx.sample(sym("new_weight"), Distribution::beta(1, static_cast<double>(k)));
      if (!end_only) ctx.sample(sym("insert_idx"), Distribution::uniform_discrete(1, k + 1));
    } else {
      ctx.sample(sym("deletion_idx"), Distribution::uniform_discrete(1, k));
    }
  });

  auto f = std::make_shared<TransformProgram>("gmm_birth_death", [end_only](TransformContext& t) {
    const bool birth = t.read_bool(Handle::AuxIn, sym("is_birth"));
    t.write_discrete(Handle::AuxOut, sym("is_birth"), Value::boolean(!birth));
    const auto k = t.read_int(Handle::ModelIn, kK);
    const auto w_in = t.read_simplex(Handle::ModelIn, kWeights, static_cast<std::size_t>(k - 1));
    if (birth) {
      const auto ins = end_only ? k + 1 : t.read_int(Handle::AuxIn, sym("insert_idx"));
      t.write_discrete(Handle::ModelOut, kK, Value::integer(k + 1));
      t.write_real(Handle::ModelOut, mu(ins), t.read_real(Handle::AuxIn, sym("new_mu")));
      t.write_real(Handle::ModelOut, var(ins), t.read_real(Handle::AuxIn, sym("new_var")));
      for (std::int64_t i = 1; i <= k; ++i) copy_cluster(t, i, i < ins ? i : i + 1);
      const DiffScalar v = t.read_real(Handle::AuxIn, sym("new_weight"));
      VectorOut out(static_cast<std::size_t>(k + 1));
      for (std::size_t i = 0; i < out.size(); ++i) {
        const auto pos = static_cast<std::int64_t>(i) + 1;
        if (pos == ins) {
          out.set(i, v);
        } else {
          out.set(i, w_in[static_cast<std::size_t>(pos < ins ? pos - 1 : pos - 2)] * (1.0 - v));
        }
      }
      t.write_simplex(Handle::ModelOut, kWeights, out, static_cast<std::size_t>(k));
      t.write_discrete(Handle::AuxOut, sym("deletion_idx"), Value::integer(ins));
    } else {
      const auto del = t.read_int(Handle::AuxIn, sym("deletion_idx"));
      t.write_discrete(Handle::ModelOut, kK, Value::integer(k - 1));
      t.copy(Handle::ModelIn, mu(del), Handle::AuxOut, sym("new_mu"));
      t.copy(Handle::ModelIn, var(del), Handle::AuxOut, sym("new_var"));
      for (std::int64_t i = 1; i <= k; ++i) {
        if (i != del) copy_cluster(t, i, i < del ? i : i - 1);
      }
      const DiffScalar wd = w_in[static_cast<std::size_t>(del - 1)];
      VectorOut out(static_cast<std::size_t>(k - 1));
      std::size_t o = 0;
      for (std::int64_t i = 1; i <= k; ++i) {
        if (i != del) out.set(o++, w_in[static_cast<std::size_t>(i - 1)] / (1.0 - wd));
      }
      t.write_simplex(Handle::ModelOut, kWeights, out, static_cast<std::size_t>(k - 2));
      t.write_real(Handle::AuxOut, sym("new_weight"), wd);
      if (!end_only) t.write_discrete(Handle::AuxOut, sym("insert_idx"), Value::integer(del));
    }
  });
  return make(end_only ? "gmm_birth_death_end_only" : "gmm_birth_death", std::move(model), std::move(observations),
              aux, f);
}

}  // namespace imcmc::zoo
