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

#include "imcmc/runtime.hpp"

#include <cmath>
#include <set>

#include "imcmc/error.hpp"

namespace imcmc {

namespace {

// Thrown through user code to stop an execution once its density is known to
// be zero; never escapes this file.
struct ZeroDensity {};

class SampleHandler final : public Context {
 public:
  SampleHandler(RandomSource& rng, const Trace& constraints) : rng_(rng), constraints_(constraints) {}

  Trace trace;
  double log_density = 0;

 protected:
  Value visit(const Address& a, const Distribution& d) override {
    if (trace.contains(a)) throw Error(ErrorCode::DuplicateAddress, a.to_text());
    const Value* fixed = constraints_.find(a);
    Value v = fixed ? *fixed : d.sample(rng_);
    log_density += d.logpdf(v);
    trace.insert(a, v);
    return v;
  }

 private:
  RandomSource& rng_;
  const Trace& constraints_;
};

class ScoreHandler final : public Context {
 public:
  explicit ScoreHandler(const Trace& x) : x_(x) {}

  std::set<Address> visited;
  double log_density = 0;

 protected:
  Value visit(const Address& a, const Distribution& d) override {
    if (!visited.insert(a).second) throw Error(ErrorCode::DuplicateAddress, a.to_text());
    const Value* v = x_.find(a);
    if (v == nullptr) throw ZeroDensity{};
    const double lp = d.logpdf(*v);
    if (lp == kNegInf) throw ZeroDensity{};
    log_density += lp;
    return *v;
  }

 private:
  const Trace& x_;
};

class UpdateHandler final : public Context {
 public:
  UpdateHandler(const Trace& x, const Trace& b, const Trace& delta) : x_(x), b_(b), delta_(delta) {}

  Trace visited;
  double log_density = 0;

 protected:
  Value visit(const Address& a, const Distribution& d) override {
    if (visited.contains(a)) throw Error(ErrorCode::DuplicateAddress, a.to_text());
    const Value* v = delta_.find(a);
    if (v == nullptr) v = x_.find(a);
    if (v == nullptr) v = b_.find(a);
    if (v == nullptr) {
      throw Error(ErrorCode::InvalidDelta, "address " + a.to_text() + " is in none of delta, x, b");
    }
    const double lp = d.logpdf(*v);
    if (lp == kNegInf) {
      throw Error(ErrorCode::InvalidDelta, "value " + v->describe() + " at " + a.to_text() + " has zero density");
    }
    log_density += lp;
    visited.insert(a, *v);
    return *v;
  }

 private:
  const Trace& x_;
  const Trace& b_;
  const Trace& delta_;
};

}  // namespace

ScoredTrace trace_and_score(const GenerativeProgram& p, RandomSource& rng, const Trace& args,
                            const Trace& constraints) {
  SampleHandler h(rng, constraints);
  p.run(h, args);
  return {std::move(h.trace), h.log_density};
}

double score(const GenerativeProgram& p, const Trace& x, const Trace& args) {
  ScoreHandler h(x);
  try {
    p.run(h, args);
  } catch (const ZeroDensity&) {
    return kNegInf;
  }
  if (h.visited.size() != x.size()) return kNegInf;
  return h.log_density;
}

UpdateResult NaiveTraceUpdate::update(const GenerativeProgram& p, const Trace& x, const Trace& b,
                                      const Trace& delta) const {
  for (const auto& [k, v] : x) {
    if (b.contains(k)) throw Error(ErrorCode::OverlappingKeys, "x and b share " + k.to_text());
  }
  const double before = score(p, merge(x, b));
  if (before == kNegInf) throw Error(ErrorCode::InvalidDelta, "current trace has zero density");

  UpdateResult out;
  for (const auto& [k, v] : delta) {
    const Value* old = x.find(k);
    if (old != nullptr && *old == v) out.warnings.push_back("delta leaves " + k.to_text() + " unchanged");
  }

  UpdateHandler h(x, b, delta);
  p.run(h, {});
  for (const auto& [k, v] : delta) {
    if (!h.visited.contains(k)) {
      throw Error(ErrorCode::InvalidDelta, "delta address " + k.to_text() + " is not visited by the program");
    }
  }
  for (const auto& [k, v] : h.visited) {
    if (!b.contains(k)) out.trace.insert(k, v);
  }
  out.log_ratio = h.log_density - before;
  return out;
}

UpdateResult naive_trace_update(const GenerativeProgram& p, const Trace& x, const Trace& b, const Trace& delta) {
  return NaiveTraceUpdate{}.update(p, x, b, delta);
}

Trace initialize(const GenerativeProgram& p, const Trace& b, RandomSource& rng) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    ScoredTrace st = trace_and_score(p, rng, {}, b);
    if (st.log_density == kNegInf || std::isnan(st.log_density)) continue;
    for (const auto& [k, v] : b) {
      if (!st.trace.contains(k)) {
        throw Error(ErrorCode::InvalidArgument, "observation " + k.to_text() + " is never visited");
      }
    }
    return without(st.trace, b.keys());
  }
  throw Error(ErrorCode::InvalidArgument, "could not find a positive-density initial trace for " + p.name());
}

}  // namespace imcmc
