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

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "imcmc/kernel.hpp"

namespace imcmc::cli {

// Bad ids, bad parameter values, unreadable files: exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using KernelFactory = std::function<KernelSpec(const nlohmann::json& params)>;

struct ModelEntry {
  std::shared_ptr<const GenerativeProgram> model;
  Trace observations;
  std::map<std::string, KernelFactory> kernels;
};

std::vector<std::string> known_models();

// `params` may set "n" (data size) and "data_seed" where the model has
// synthetic data, and "dim" for the normal target.
ModelEntry build_model(const std::string& id, const nlohmann::json& params);

KernelSpec build_kernel(const ModelEntry& m, const std::string& model_id, const std::string& kernel_id,
                        const nlohmann::json& params);

std::vector<std::string> known_oracles();

// Marginal distribution of the value at `address`, keyed by the value's
// canonical JSON text ("null" when the address is absent).
std::map<std::string, double> oracle_marginal(const std::string& oracle_id, const Address& address);

}  // namespace imcmc::cli
