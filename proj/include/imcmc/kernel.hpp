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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "imcmc/random.hpp"
#include "imcmc/runtime.hpp"
#include "imcmc/transform.hpp"

namespace imcmc {

enum class CheckMode { Off, Assert, RejectAndLog };

std::string_view to_string(CheckMode m);
CheckMode parse_check_mode(std::string_view s);

struct KernelOptions {
  CheckMode check_mode = CheckMode::Off;
  double equality_tol = kDefaultEqualityTolerance;
  bool implicit_copy = false;
};

// (P, Q, F, b). Programs are shared so kernels over the same model can be
// cycled; identity of the model pointer is what "same model" means.
struct KernelSpec {
  std::string name;
  std::shared_ptr<const GenerativeProgram> model;
  std::shared_ptr<const GenerativeProgram> auxiliary;
  std::shared_ptr<const TransformProgram> transform;
  Trace observations;
  KernelOptions options;
};

struct LogTerms {
  double model_new = 0;  // log p(x' ⊕ b)
  double model_old = 0;  // log p(x ⊕ b)
  double aux_new = 0;    // log q_{x'}(y')
  double aux_old = 0;    // log q_x(y)
  double log_det = 0;    // log |det J|
};

// min{1, exp(model_new - model_old + aux_new - aux_old + log_det)}. A -inf
// in a numerator term gives 0. Throws InvalidAcceptance if a denominator
// term is -inf or the exponent is NaN.
double acceptance_probability(const LogTerms& t);

struct CheckReport {
  bool support_ok = true;
  bool dimension_ok = true;
  bool involution_ok = true;
  std::string message;
  std::vector<Address> addresses;
  std::vector<std::string> values;
  // log D(z) + log D(f(z)), when both runs succeeded.
  std::optional<double> log_det_roundtrip;

  bool ok() const noexcept { return support_ok && dimension_ok && involution_ok; }
  // "support", "dimension", "involution" or "" when everything passed.
  std::string failed_check() const;
};

struct StepDiagnostics {
  double alpha = 0;
  bool accepted = false;
  LogTerms terms;
  std::size_t jacobian_size = 0;
  std::optional<CheckReport> check;
};

// The deterministic part of one step: the transform applied to a fixed
// (x, y) and the resulting acceptance probability. With `checked`, the
// support, dimension and involution checks run on this transition and a
// failure sets alpha to 0 instead of throwing.
struct Proposal {
  Trace model_out;
  Trace aux_out;
  LogTerms terms;
  double alpha = 0;
  std::size_t jacobian_size = 0;
  std::optional<CheckReport> check;
};

Proposal propose(const KernelSpec& spec, const Trace& x, const Trace& y, bool checked);

// One failure record per call: {"step", "kernel", "check", "message",
// "addresses", "values"}.
using CheckLog = std::function<void(const nlohmann::json&)>;

// Honours spec.options.check_mode: Off runs the unchecked step, the other
// modes defer to checked_step.
std::pair<Trace, StepDiagnostics> step(const KernelSpec& spec, const Trace& x, RandomSource& rng,
                                       const CheckLog& log = {}, std::size_t step_index = 0);

// Always checks. On failure: Assert throws CheckFailed, anything else logs
// and rejects. Consumes randomness exactly like the unchecked step.
std::pair<Trace, StepDiagnostics> checked_step(const KernelSpec& spec, const Trace& x, RandomSource& rng,
                                               const CheckLog& log = {}, std::size_t step_index = 0);

// One randomized test case: (x ⊕ b) from the prior with simulated
// observations, y from Q, then the three checks.
CheckReport check(const KernelSpec& spec, RandomSource& rng);

struct CheckTally {
  std::size_t trials = 0;
  std::size_t support_failures = 0;
  std::size_t dimension_failures = 0;
  std::size_t involution_failures = 0;
  std::size_t failed_trials = 0;
  std::optional<CheckReport> first_failure;

  bool all_passed() const noexcept { return failed_trials == 0; }
};

CheckTally check_many(const KernelSpec& spec, std::size_t trials, RandomSource& rng);

// Kernels applied in order. Every member must share the model program and
// the observations; the empty cycle is the identity.
class Cycle {
 public:
  Cycle() = default;
  explicit Cycle(std::vector<KernelSpec> kernels);

  const std::vector<KernelSpec>& kernels() const noexcept { return kernels_; }

  std::pair<Trace, std::vector<StepDiagnostics>> step(const Trace& x, RandomSource& rng, const CheckLog& log = {},
                                                      std::size_t step_index = 0) const;

 private:
  std::vector<KernelSpec> kernels_;
};

struct ChainSummary {
  std::size_t steps = 0;
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  // Unset when there were no proposals.
  std::optional<double> acceptance_rate;
  std::map<std::string, std::size_t> check_failures;
  double wall_seconds = 0;
  Trace final_state;
};

using SampleSink = std::function<void(std::size_t index, const Trace& x, const std::vector<StepDiagnostics>& diag)>;

ChainSummary chain(const Cycle& cycle, const Trace& x0, std::size_t n, RandomSource& rng, const SampleSink& sink = {},
                   const CheckLog& log = {});

}  // namespace imcmc
