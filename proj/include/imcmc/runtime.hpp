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
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "imcmc/distributions.hpp"
#include "imcmc/random.hpp"
#include "imcmc/trace.hpp"

namespace imcmc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// What a program sees at each `address ~ distribution` site. The handler
// behind it decides where the value comes from (fresh sample, a given trace,
// a delta, an enumeration prefix). Namespaces are a prefix stack managed here
// so handlers only ever see full addresses.
class Context {
 public:
  virtual ~Context() = default;

  Value sample(const Address& address, const Distribution& d) { return visit(qualify(address), d); }

  double real(const Address& address, const Distribution& d) { return sample(address, d).as_real(); }
  std::int64_t integer(const Address& address, const Distribution& d) { return sample(address, d).as_int(); }
  bool flag(const Address& address, const Distribution& d) { return sample(address, d).as_bool(); }

  // Runs `body` with every address it produces prefixed by `ns`.
  template <class F>
  decltype(auto) call(const Address& ns, F&& body) {
    prefix_.push_back(ns);
    struct Pop {
      std::vector<Address>& stack;
      ~Pop() { stack.pop_back(); }
    } pop{prefix_};
    return std::forward<F>(body)(*this);
  }

 protected:
  virtual Value visit(const Address& full, const Distribution& d) = 0;

 private:
  Address qualify(const Address& a) const {
    if (prefix_.empty()) return a;
    std::vector<Component> parts;
    for (const auto& p : prefix_) parts.insert(parts.end(), p.components().begin(), p.components().end());
    parts.insert(parts.end(), a.components().begin(), a.components().end());
    return Address(std::move(parts));
  }

  std::vector<Address> prefix_;
};

// A deterministic procedure over random choices. `args` carries the input
// trace (the model trace for an auxiliary program; empty for models).
class GenerativeProgram {
 public:
  using Body = std::function<void(Context&, const Trace& args)>;

  GenerativeProgram(std::string name, Body body) : name_(std::move(name)), body_(std::move(body)) {}

  const std::string& name() const noexcept { return name_; }
  void run(Context& ctx, const Trace& args) const { body_(ctx, args); }

 private:
  std::string name_;
  Body body_;
};

struct ScoredTrace {
  Trace trace;
  double log_density = 0;
};

// Samples every choice fresh except those fixed by `constraints`, which are
// read from there and scored. The returned trace includes constrained keys.
ScoredTrace trace_and_score(const GenerativeProgram& p, RandomSource& rng, const Trace& args = {},
                            const Trace& constraints = {});

// Log density of `x`; -inf if a requested address is missing, a value is out
// of support, or `x` has keys the program never visited.
double score(const GenerativeProgram& p, const Trace& x, const Trace& args = {});

struct UpdateResult {
  Trace trace;  // x', observation keys excluded
  double log_ratio = 0;  // log p(x' ⊕ b) - log p(x ⊕ b)
  std::vector<std::string> warnings;
};

// Delta-driven re-execution. Only the naive strategy is provided; the
// interface exists so an incremental one can replace it.
class TraceUpdate {
 public:
  virtual ~TraceUpdate() = default;
  virtual UpdateResult update(const GenerativeProgram& p, const Trace& x, const Trace& b,
                              const Trace& delta) const = 0;
};

class NaiveTraceUpdate final : public TraceUpdate {
 public:
  UpdateResult update(const GenerativeProgram& p, const Trace& x, const Trace& b,
                      const Trace& delta) const override;
};

UpdateResult naive_trace_update(const GenerativeProgram& p, const Trace& x, const Trace& b, const Trace& delta);

// Model trace from the prior with observations fixed to `b`; observation keys
// are dropped from the result. Retries until the joint density is positive.
Trace initialize(const GenerativeProgram& p, const Trace& b, RandomSource& rng);

}  // namespace imcmc
