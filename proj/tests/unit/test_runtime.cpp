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

#include <cmath>

#include "doctest.h"
#include "imcmc/oracle.hpp"
#include "imcmc/runtime.hpp"
#include "imcmc/zoo/discrete.hpp"
#include "imcmc/zoo/gmm.hpp"
#include "imcmc/zoo/gp.hpp"
#include "imcmc/zoo/toy.hpp"
#include "support.hpp"

using namespace imcmc;
using test_support::golden;

namespace {

Trace toy_x1() { return Trace{{sym("k"), Value::integer(1)}, {idx("mu", 1), Value::real(0.0)}}; }
Trace toy_b1() { return Trace{{idx("x", 1), Value::real(0.0)}}; }

}  // namespace

TEST_CASE("toy traces have one of the two key sets") {
  const auto p = zoo::toy_model(1);
  RandomSource rng(1);
  const std::set<Address> one{sym("k"), idx("mu", 1), idx("x", 1)};
  const std::set<Address> two{sym("k"), idx("mu", 1), idx("mu", 2), idx("x", 1)};
  int seen_two = 0;
  for (int i = 0; i < 200; ++i) {
    const auto keys = trace_and_score(*p, rng).trace.keys();
    CHECK((keys == one || keys == two));
    seen_two += keys == two;
  }
  CHECK(seen_two > 0);
  CHECK(seen_two < 200);
}

TEST_CASE("degenerate single-site program") {
  const GenerativeProgram p("one", [](Context& ctx, const Trace&) { ctx.sample(sym("a"), Distribution::bernoulli(1.0)); });
  RandomSource rng(2);
  const auto s = trace_and_score(p, rng);
  CHECK(s.trace == Trace{{sym("a"), Value::boolean(true)}});
  CHECK(s.log_density == 0.0);
}

TEST_CASE("score reproduces trace_and_score") {
  const auto toy = zoo::toy_model(3);
  const auto gmm = zoo::gmm_model(4);
  const auto gp = zoo::gp_model({0.0, 0.5, 1.0});
  RandomSource rng(3);
  for (int i = 0; i < 1000; ++i) {
    for (const auto* p : {toy.get(), gmm.get(), gp.get()}) {
      const auto s = trace_and_score(*p, rng);
      CHECK(score(*p, s.trace) == doctest::Approx(s.log_density).epsilon(1e-14));
    }
  }
}

TEST_CASE("score of a hand-built toy trace") {
  const auto p = zoo::toy_model(1);
  const Trace x = merge(toy_x1(), toy_b1());
  CHECK(std::abs(score(*p, x) - golden("toy_score_k1")) < 1e-12);
  CHECK(std::abs(score(*p, x) - (-4.8336093)) < 1e-7);
  Trace extra = x;
  extra.insert(sym("junk"), Value::integer(3));
  CHECK(score(*p, extra) == kNegInf);
  CHECK(score(*p, without(x, {idx("mu", 1)})) == kNegInf);
  Trace bad = x;
  bad.assign(sym("k"), Value::integer(3));
  CHECK(score(*p, bad) == kNegInf);
  bad.assign(sym("k"), Value::real(1));
  CHECK_THROWS_CODE(score(*p, bad), ErrorCode::TagMismatch);
}

TEST_CASE("duplicate addresses are program bugs") {
  const GenerativeProgram p("dup", [](Context& ctx, const Trace&) {
    ctx.sample(sym("a"), Distribution::normal(0, 1));
    ctx.sample(sym("a"), Distribution::normal(0, 1));
  });
  RandomSource rng(4);
  CHECK_THROWS_CODE(trace_and_score(p, rng), ErrorCode::DuplicateAddress);
}

TEST_CASE("namespaces prefix every address") {
  const GenerativeProgram p("ns", [](Context& ctx, const Trace&) {
    ctx.call(sym("outer"), [](Context& c) {
      c.sample(sym("a"), Distribution::normal(0, 1));
      c.call(idx("inner", 2), [](Context& c2) { c2.sample(sym("a"), Distribution::normal(0, 1)); });
    });
    ctx.sample(sym("a"), Distribution::normal(0, 1));
  });
  RandomSource rng(5);
  const auto keys = trace_and_score(p, rng).trace.keys();
  CHECK(keys == std::set<Address>{sym("a"), Address(sym("outer")) / sym("a"),
                                  Address(sym("outer")) / idx("inner", 2) / sym("a")});
}

TEST_CASE("naive_trace_update") {
  const auto p = zoo::toy_model(1);
  const Trace x = toy_x1(), b = toy_b1();
  {
    const auto r = naive_trace_update(*p, x, b, {});
    CHECK(r.trace == x);
    CHECK(r.log_ratio == 0.0);
  }
  {
    const auto r = naive_trace_update(*p, x, b, Trace{{idx("mu", 1), Value::real(1.0)}});
    CHECK(std::abs(r.log_ratio - golden("toy_update_ratio")) < 1e-12);
    CHECK(std::abs(r.log_ratio - (-0.505)) < 1e-12);
  }
  {
    const Trace delta{{sym("k"), Value::integer(2)}, {idx("mu", 2), Value::real(0.3)}};
    const auto r = naive_trace_update(*p, x, b, delta);
    CHECK(r.trace.keys() == std::set<Address>{sym("k"), idx("mu", 1), idx("mu", 2)});
    CHECK(std::abs(r.log_ratio - (score(*p, merge(r.trace, b)) - score(*p, merge(x, b)))) < 1e-12);
  }
  CHECK_THROWS_CODE(naive_trace_update(*p, x, Trace{{sym("k"), Value::integer(1)}}, {}), ErrorCode::OverlappingKeys);
  // k = 2 without a value for (mu, 2)
  CHECK_THROWS_CODE(naive_trace_update(*p, x, b, Trace{{sym("k"), Value::integer(2)}}), ErrorCode::InvalidDelta);
  CHECK_THROWS_CODE(naive_trace_update(*p, x, b, Trace{{sym("k"), Value::integer(5)}}), ErrorCode::InvalidDelta);
  const auto same = naive_trace_update(*p, x, b, Trace{{idx("mu", 1), Value::real(0.0)}});
  CHECK(!same.warnings.empty());
}

TEST_CASE("update ratio equals a score difference on random deltas") {
  const auto p = zoo::gmm_model(5);
  RandomSource rng(6);
  for (int rep = 0; rep < 300; ++rep) {
    const auto full = trace_and_score(*p, rng).trace;
    Trace b, x;
    for (const auto& [a, v] : full) {
      const auto* t = std::get_if<Indexed>(&a.front().value());
      (t && t->symbol.name() == "x" ? b : x).insert(a, v);
    }
    Trace delta;
    for (const auto& [a, v] : x) {
      // A one-component weight vector is a scalar simplex, pinned at 1.
      if (v.is_continuous() && v.dimension() == 1 && !(a == sym("weights")) && rng.uniform() < 0.5) {
        delta.insert(a, Value::real(std::abs(v.as_real() + rng.standard_normal())));
      }
    }
    const auto r = naive_trace_update(*p, x, b, delta);
    CHECK(std::abs(r.log_ratio - (score(*p, merge(r.trace, b)) - score(*p, merge(x, b)))) < 1e-12);
  }
}

TEST_CASE("exp(score) sums to one over an enumerable program") {
  for (const auto& spec : {zoo::flip_kernel(), zoo::birth_death_kernel(), zoo::categorical_shift_kernel()}) {
    double total = 0;
    for (const auto& w : oracle::enumerate_program(*spec.model)) {
      CHECK(score(*spec.model, w.trace) == doctest::Approx(w.log_weight).epsilon(1e-14));
      total += std::exp(w.log_weight);
    }
    CHECK(std::abs(total - 1) < 1e-10);
  }
}

TEST_CASE("traces with different key sets disagree on a shared address") {
  // Density condition for programs: distinct positive-density skeletons
  // share some address at which they take different values.
  const GenerativeProgram skeleton("gmm_skeleton", [](Context& ctx, const Trace&) {
    const auto k = ctx.integer(sym("k"), Distribution::uniform_discrete(1, 4));
    for (std::int64_t j = 1; j <= k; ++j) ctx.flag(idx("c", j), Distribution::bernoulli(0.5));
  });
  const auto bd = zoo::birth_death_kernel();
  for (const auto* p : {&skeleton, bd.model.get()}) {
    const auto all = oracle::enumerate_program(*p);
    for (std::size_t i = 0; i < all.size(); ++i) {
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        if (all[i].trace.keys() == all[j].trace.keys()) continue;
        bool differs = false;
        for (const auto& [a, v] : all[i].trace) {
          const Value* o = all[j].trace.find(a);
          differs = differs || (o && !(*o == v));
        }
        CHECK(differs);
      }
    }
  }
}

TEST_CASE("initialize respects observations") {
  const auto p = zoo::toy_model(2);
  const Trace b{{idx("x", 1), Value::real(0.3)}, {idx("x", 2), Value::real(-0.1)}};
  RandomSource rng(7);
  const Trace x = initialize(*p, b, rng);
  CHECK(!x.contains(idx("x", 1)));
  CHECK(score(*p, merge(x, b)) > kNegInf);
}
