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

#include "registry.hpp"

#include "imcmc/error.hpp"
#include "imcmc/oracle.hpp"
#include "imcmc/trace_json.hpp"
#include "imcmc/zoo/discrete.hpp"
#include "imcmc/zoo/gmm.hpp"
#include "imcmc/zoo/gp.hpp"
#include "imcmc/zoo/hmc.hpp"
#include "imcmc/zoo/toy.hpp"

namespace imcmc::cli {

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
  return out;
}

template <class T>
T param(const nlohmann::json& p, const char* key, T fallback) {
  if (!p.is_object() || !p.contains(key)) return fallback;
  try {
    return p.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("parameter '") + key + "' has the wrong type");
  }
}

std::size_t positive(const nlohmann::json& p, const char* key, std::size_t fallback) {
  const auto v = param<long long>(p, key, static_cast<long long>(fallback));
  if (v <= 0) throw ConfigError(std::string("parameter '") + key + "' must be positive");
  return static_cast<std::size_t>(v);
}

}  // namespace

std::vector<std::string> known_models() {
  return {"birth_death", "categorical_pair", "flip", "gmm", "gp", "normal", "toy"};
}

ModelEntry build_model(const std::string& id, const nlohmann::json& params) {
  ModelEntry e;
  auto& k = e.kernels;
  if (id == "toy") {
    const auto data = zoo::toy_dataset();
    e.model = zoo::toy_model(data.size());
    e.observations = zoo::toy_observations(data);
    auto m = e.model;
    auto b = e.observations;
    k["split_merge"] = [m, b](const nlohmann::json&) { return zoo::toy_split_merge_kernel(m, b); };
    k["random_walk"] = [m, b](const nlohmann::json& p) {
      return zoo::toy_random_walk_kernel(m, b, param(p, "step", 0.5));
    };
    k["cluster_swap"] = [m, b](const nlohmann::json&) { return zoo::toy_cluster_swap_kernel(m, b); };
    k["sqrt_merge"] = [m, b](const nlohmann::json&) { return zoo::toy_sqrt_merge_kernel(m, b); };
    k["misspelled"] = [m, b](const nlohmann::json&) { return zoo::toy_misspelled_kernel(m, b); };
  } else if (id == "gmm") {
    const auto data = zoo::gmm_dataset(positive(params, "n", 50), param<std::uint64_t>(params, "data_seed", 1));
    e.model = zoo::gmm_model(data.size());
    e.observations = zoo::gmm_observations(data);
    auto m = e.model;
    auto b = e.observations;
    k["split_merge"] = [m, b](const nlohmann::json&) { return zoo::gmm_split_merge_kernel(m, b); };
    k["cluster_swap"] = [m, b](const nlohmann::json&) { return zoo::gmm_cluster_swap_kernel(m, b); };
    k["random_walk"] = [m, b](const nlohmann::json& p) {
      return zoo::gmm_random_walk_kernel(m, b, param(p, "step", 0.5));
    };
    k["birth_death"] = [m, b](const nlohmann::json&) { return zoo::gmm_birth_death_kernel(m, b, false); };
    k["birth_death_end"] = [m, b](const nlohmann::json&) { return zoo::gmm_birth_death_kernel(m, b, true); };
  } else if (id == "gp") {
    const auto data = zoo::gp_dataset(positive(params, "n", 40), param<std::uint64_t>(params, "data_seed", 3));
    e.model = zoo::gp_model(data.xs);
    e.observations = zoo::gp_observations(data.ys);
    auto m = e.model;
    auto b = e.observations;
    k["structure"] = [m, b](const nlohmann::json&) { return zoo::gp_structure_kernel(m, b, false); };
    k["structure_uniform"] = [m, b](const nlohmann::json&) { return zoo::gp_structure_kernel(m, b, true); };
    k["hyper_walk"] = [m, b](const nlohmann::json& p) {
      return zoo::gp_hyper_walk_kernel(m, b, param(p, "step", 0.3));
    };
  } else if (id == "normal") {
    const auto target = zoo::standard_normal_target(positive(params, "dim", 1));
    e.model = target.model;
    e.observations = target.observations;
    auto make = [target](bool negate) {
      return [target, negate](const nlohmann::json& p) {
        return zoo::hmc_kernel(target, param(p, "eps", 0.15), positive(p, "steps", 10), negate);
      };
    };
    k["hmc"] = make(true);
    k["hmc_no_negation"] = make(false);
  } else if (id == "flip") {
    const auto s = zoo::flip_kernel();
    e.model = s.model;
    k["flip"] = [s](const nlohmann::json&) { return s; };
  } else if (id == "birth_death") {
    const auto s = zoo::birth_death_kernel();
    e.model = s.model;
    e.observations = s.observations;
    k["birth_death"] = [s](const nlohmann::json&) { return s; };
  } else if (id == "categorical_pair") {
    const auto s = zoo::categorical_shift_kernel(false);
    const auto bug = zoo::categorical_shift_kernel(true);
    e.model = s.model;
    e.observations = s.observations;
    k["shift"] = [s](const nlohmann::json&) { return s; };
    k["shift_buggy"] = [bug](const nlohmann::json&) { return bug; };
  } else {
    throw ConfigError("unknown model '" + id + "'; known models: " + join(known_models()));
  }
  return e;
}

KernelSpec build_kernel(const ModelEntry& m, const std::string& model_id, const std::string& kernel_id,
                        const nlohmann::json& params) {
  auto it = m.kernels.find(kernel_id);
  if (it == m.kernels.end()) {
    std::vector<std::string> ids;
    for (const auto& [name, f] : m.kernels) ids.push_back(name);
    throw ConfigError("unknown kernel '" + kernel_id + "' for model " + model_id + "; known kernels: " + join(ids));
  }
  try {
    return it->second(params);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<std::string> known_oracles() { return {"birth_death", "categorical_pair", "flip", "toy"}; }

std::map<std::string, double> oracle_marginal(const std::string& oracle_id, const Address& address) {
  std::map<std::string, double> out;
  if (oracle_id == "toy") {
    if (!(address == sym("k"))) throw ConfigError("the toy oracle only covers address k");
    const auto data = zoo::toy_dataset();
    const double p2 = oracle::toy_posterior_k2(data).p_k2;
    out[value_to_json(Value::integer(1)).dump()] = 1 - p2;
    out[value_to_json(Value::integer(2)).dump()] = p2;
    return out;
  }
  if (oracle_id == "birth_death" || oracle_id == "categorical_pair" || oracle_id == "flip") {
    const auto m = build_model(oracle_id, nlohmann::json::object());
    const oracle::FiniteStateIndex index(*m.model, m.observations);
    const auto pi = index.posterior();
    for (std::size_t i = 0; i < index.size(); ++i) {
      const Value* v = index.state(i).find(address);
      out[v ? value_to_json(*v).dump() : "null"] += pi(static_cast<Eigen::Index>(i));
    }
    return out;
  }
  throw ConfigError("unknown oracle '" + oracle_id + "'; known oracles: " + join(known_oracles()));
}

}  // namespace imcmc::cli
