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
#include <numbers>
#include <random>

#include "copy_patterns.hpp"
#include "doctest.h"
#include "imcmc/error.hpp"
#include "imcmc/kernel.hpp"
#include "imcmc/zoo/gmm.hpp"
#include "imcmc/zoo/toy.hpp"
#include "support.hpp"

using namespace imcmc;

namespace {

Trace make(std::initializer_list<std::pair<Address, Value>> kv) {
  Trace t;
  for (const auto& [a, v] : kv) t.insert(a, v);
  return t;
}

TransformResult run_body(const TransformProgram::Body& body, const Trace& x, const Trace& y, const Trace& b = {},
                         TransformOptions opt = {}) {
  return run_transform(TransformProgram("test", body), x, y, b, opt);
}

}  // namespace

TEST_CASE("toy split and merge log-determinants") {
  auto spec = zoo::toy_split_merge_kernel(zoo::toy_model(0), {});
  const Trace x = make({{sym("k"), Value::integer(1)}, {idx("mu", 1), Value::real(0)}});
  const Trace y = make({{sym("u"), Value::real(0.5)}});
  const auto split = run_transform(*spec.transform, x, y, {});
  CHECK(split.model_out.at(sym("k")).as_int() == 2);
  CHECK(split.model_out.at(idx("mu", 1)).as_real() == -0.5);
  CHECK(split.model_out.at(idx("mu", 2)).as_real() == 0.5);
  CHECK(split.aux_out.size() == 0);
  CHECK(split.log_abs_det == doctest::Approx(std::numbers::ln2).epsilon(1e-12));
  CHECK(split.jacobian_size == 2);

  const auto merge = run_transform(*spec.transform, split.model_out, split.aux_out, {});
  CHECK(trace_equal(merge.model_out, x, 1e-12));
  CHECK(trace_equal(merge.aux_out, y, 1e-12));
  CHECK(merge.log_abs_det == doctest::Approx(-std::numbers::ln2).epsilon(1e-12));
}

TEST_CASE("a transform that only copies has no Jacobian") {
  const Trace x = make({{sym("a"), Value::real(1.5)}, {sym("k"), Value::integer(3)}});
  const Trace y = make({{sym("u"), Value::real(-2)}});
  TransformOptions opt;
  opt.materialize = true;
  const auto r = run_body(
      [](TransformContext& t) {
        t.copy(Handle::ModelIn, sym("a"), Handle::ModelOut, sym("a"));
        t.copy(Handle::ModelIn, sym("k"), Handle::ModelOut, sym("k"));
        t.copy(Handle::AuxIn, sym("u"), Handle::AuxOut, sym("u"));
      },
      x, y, {}, opt);
  CHECK(r.log_abs_det == 0.0);
  CHECK(r.jacobian_size == 0);
  CHECK(r.record.copies.size() == 2);
  CHECK(r.record.reads.empty());
  CHECK(r.matrix->rows() == 0);
  CHECK(trace_equal(r.model_out, x, 0));
}

TEST_CASE("two reads and one write is a dimension mismatch") {
  const Trace x = make({{sym("a"), Value::real(1)}, {sym("b"), Value::real(2)}});
  CHECK_THROWS_CODE(run_body(
                        [](TransformContext& t) {
                          t.write_real(Handle::ModelOut, sym("s"),
                                       t.read_real(Handle::ModelIn, sym("a")) + t.read_real(Handle::ModelIn, sym("b")));
                        },
                        x, {}),
                    ErrorCode::DimensionMismatch);
}

TEST_CASE("copy and arithmetic mixed: the reduced matrix is 1x1") {
  // (u, v, x, y) -> (u, 2u - v, y, x): u is read and copied, x and y swap.
  const Trace in = make({{sym("u"), Value::real(0.3)},
                         {sym("v"), Value::real(1.1)},
                         {sym("x"), Value::real(-0.4)},
                         {sym("y"), Value::real(2.0)}});
  TransformOptions opt;
  opt.materialize = true;
  const auto body = [](TransformContext& t) {
    const auto u = t.read_real(Handle::ModelIn, sym("u"));
    const auto v = t.read_real(Handle::ModelIn, sym("v"));
    t.copy(Handle::ModelIn, sym("u"), Handle::ModelOut, sym("u"));
    t.write_real(Handle::ModelOut, sym("v"), 2.0 * u - v);
    t.copy(Handle::ModelIn, sym("x"), Handle::ModelOut, sym("y"));
    t.copy(Handle::ModelIn, sym("y"), Handle::ModelOut, sym("x"));
  };
  const auto r = run_body(body, in, {}, {}, opt);
  REQUIRE(r.matrix);
  CHECK(r.matrix->rows() == 1);
  CHECK(r.matrix->cols() == 1);
  CHECK(r.matrix->entries(0, 0) == -1.0);
  CHECK(r.log_abs_det == 0.0);
  CHECK(r.row_slots.front().address == sym("v"));
  CHECK(r.model_out.at(sym("v")).as_real() == doctest::Approx(2 * 0.3 - 1.1));
  CHECK(r.model_out.at(sym("x")).as_real() == 2.0);

  opt.eliminate_copies = false;
  const auto full = run_body(body, in, {}, {}, opt);
  CHECK(full.jacobian_size == 4);
  CHECK(full.log_abs_det == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("copy_namespace") {
  Trace x = make({{Address(std::vector<Component>{Symbol("path"), Symbol("a")}), Value::integer(1)},
                  {Address(std::vector<Component>{Symbol("path"), Symbol("b")}), Value::integer(2)},
                  {Address(std::vector<Component>{Symbol("path"), Symbol("c")}), Value::boolean(true)},
                  {sym("other"), Value::real(0.5)}});
  std::size_t copied = 0;
  const auto r = run_body(
      [&](TransformContext& t) {
        copied = t.copy_namespace(Handle::ModelIn, sym("path"), Handle::ModelOut, sym("path"));
        CHECK(t.copy_namespace(Handle::ModelIn, sym("nothing"), Handle::ModelOut, sym("nothing")) == 0);
        t.copy(Handle::ModelIn, sym("other"), Handle::ModelOut, sym("other"));
      },
      x, {});
  CHECK(copied == 3);
  CHECK(trace_equal(r.model_out, x, 0));

  SUBCASE("continuous entries become copies") {
    Trace z = make({{Address(std::vector<Component>{Symbol("ns"), Symbol("p")}), Value::real(1)},
                    {Address(std::vector<Component>{Symbol("ns"), Symbol("q")}), Value::real(2)}});
    const auto rz = run_body(
        [](TransformContext& t) { t.copy_namespace(Handle::ModelIn, sym("ns"), Handle::AuxOut, sym("moved")); }, z,
        {});
    CHECK(rz.record.copies.size() == 2);
    CHECK(rz.jacobian_size == 0);
    CHECK(rz.aux_out.size() == 2);
    CHECK(rz.model_out.size() == 0);
  }
}

TEST_CASE("effect discipline") {
  const Trace x = make({{sym("a"), Value::real(1)}, {sym("k"), Value::integer(2)}});
  const Trace y = make({{sym("u"), Value::real(0.1)}});
  auto run = [&](TransformProgram::Body body) { return run_body(std::move(body), x, y); };

  SUBCASE("reading an output handle") {
    CHECK_THROWS_CODE(run([](TransformContext& t) { (void)t.read_real(Handle::ModelOut, sym("a")); }),
                      ErrorCode::EffectViolation);
  }
  SUBCASE("writing an input handle") {
    CHECK_THROWS_CODE(run([](TransformContext& t) { t.write_real(Handle::ModelIn, sym("a"), 1.0); }),
                      ErrorCode::EffectViolation);
  }
  SUBCASE("writing the same address twice") {
    CHECK_THROWS_CODE(run([](TransformContext& t) {
                        t.write_real(Handle::ModelOut, sym("a"), t.read_real(Handle::ModelIn, sym("a")));
                        t.write_real(Handle::ModelOut, sym("a"), 2.0);
                      }),
                      ErrorCode::DuplicateWrite);
  }
  SUBCASE("copy onto a written address") {
    CHECK_THROWS_CODE(run([](TransformContext& t) {
                        t.write_real(Handle::ModelOut, sym("a"), t.read_real(Handle::ModelIn, sym("a")));
                        t.copy(Handle::AuxIn, sym("u"), Handle::ModelOut, sym("a"));
                      }),
                      ErrorCode::DuplicateWrite);
  }
  SUBCASE("reading a missing address") {
    CHECK_THROWS_CODE(run([](TransformContext& t) { (void)t.read_real(Handle::ModelIn, sym("zz")); }),
                      ErrorCode::ReadMissing);
  }
  SUBCASE("tag mismatch on read") {
    CHECK_THROWS_CODE(run([](TransformContext& t) { (void)t.read_real(Handle::ModelIn, sym("k")); }),
                      ErrorCode::TagMismatch);
    CHECK_THROWS_CODE(run([](TransformContext& t) { (void)t.read_discrete(Handle::ModelIn, sym("a")); }),
                      ErrorCode::TagMismatch);
  }
  SUBCASE("one input copied twice") {
    CHECK_THROWS_CODE(run([](TransformContext& t) {
                        t.copy(Handle::ModelIn, sym("a"), Handle::ModelOut, sym("a"));
                        t.copy(Handle::ModelIn, sym("a"), Handle::ModelOut, sym("b"));
                        t.copy(Handle::AuxIn, sym("u"), Handle::AuxOut, sym("u"));
                      }),
                      ErrorCode::EffectViolation);
  }
  SUBCASE("non-finite output") {
    CHECK_THROWS_CODE(run([](TransformContext& t) {
                        t.write_real(Handle::ModelOut, sym("a"), log(t.read_real(Handle::ModelIn, sym("a")) - 1.0));
                        t.copy(Handle::AuxIn, sym("u"), Handle::AuxOut, sym("u"));
                      }),
                      ErrorCode::NonFiniteValue);
  }
  SUBCASE("a constant output column is singular") {
    CHECK_THROWS_CODE(run([](TransformContext& t) {
                        (void)t.read_real(Handle::ModelIn, sym("a"));
                        t.write_real(Handle::ModelOut, sym("a"), 4.0);
                        t.copy(Handle::AuxIn, sym("u"), Handle::AuxOut, sym("u"));
                      }),
                      ErrorCode::SingularJacobian);
  }
}

TEST_CASE("observations are constants") {
  const Trace x = make({{sym("a"), Value::real(2)}});
  const Trace b = make({{sym("obs"), Value::real(3)}});
  const auto r = run_body(
      [](TransformContext& t) {
        const auto o = t.read_real(Handle::ModelIn, sym("obs"));
        CHECK(o.is_constant());
        t.write_real(Handle::ModelOut, sym("a"), o * t.read_real(Handle::ModelIn, sym("a")));
        CHECK(t.keys(Handle::ModelIn).size() == 1);
      },
      x, {}, b);
  CHECK(r.log_abs_det == doctest::Approx(std::log(3.0)));
  CHECK(r.jacobian_size == 1);
  CHECK(r.model_out.find(sym("obs")) == nullptr);
}

TEST_CASE("implicit copies match explicit copies") {
  const auto model = zoo::toy_model(3);
  const std::vector<double> data{-1.0, 0.5, 2.0};
  const Trace b = zoo::toy_observations(data);
  const Trace x = make({{sym("k"), Value::integer(2)}, {idx("mu", 1), Value::real(-1)}, {idx("mu", 2), Value::real(1.5)}});
  const Trace y = make({{sym("d"), Value::real(0.25)}});
  auto shift = [](TransformContext& t) {
    const auto m = t.read_real(Handle::ModelIn, idx("mu", 1));
    const auto d = t.read_real(Handle::AuxIn, sym("d"));
    t.write_real(Handle::ModelOut, idx("mu", 1), m + 2.0 * d);
    t.write_real(Handle::AuxOut, sym("d"), -d);
  };
  const auto explicit_r = run_body(
      [&](TransformContext& t) {
        shift(t);
        t.copy(Handle::ModelIn, sym("k"), Handle::ModelOut, sym("k"));
        t.copy(Handle::ModelIn, idx("mu", 2), Handle::ModelOut, idx("mu", 2));
      },
      x, y, b);
  TransformOptions opt;
  opt.implicit_copy = true;
  opt.model = model.get();
  const auto implicit_r = run_body(shift, x, y, b, opt);
  CHECK(trace_equal(explicit_r.model_out, implicit_r.model_out, 0));
  CHECK(trace_equal(explicit_r.aux_out, implicit_r.aux_out, 0));
  CHECK(explicit_r.log_abs_det == doctest::Approx(implicit_r.log_abs_det).epsilon(1e-14));
  REQUIRE(implicit_r.model_log_ratio);
  CHECK(*implicit_r.model_log_ratio ==
        doctest::Approx(score(*model, merge(explicit_r.model_out, b)) - score(*model, merge(x, b))).epsilon(1e-12));
}

TEST_CASE("property: eliminating copies leaves log|det| unchanged") {
  std::mt19937_64 gen(20240611);
  int with_overlap = 0;
  for (int trial = 0; trial < 100; ++trial) {
    CAPTURE(trial);
    const auto cp = test_support::random_copy_pattern(gen);
    TransformOptions full;
    full.eliminate_copies = false;
    double reduced_det = 0, full_det = 0;
    bool reduced_singular = false, full_singular = false;
    TransformResult r;
    try {
      r = run_transform(cp.program, cp.x, cp.y, {});
      reduced_det = r.log_abs_det;
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::SingularJacobian);
      reduced_singular = true;
    }
    try {
      full_det = run_transform(cp.program, cp.x, cp.y, {}, full).log_abs_det;
    } catch (const Error& e) {
      REQUIRE(e.code() == ErrorCode::SingularJacobian);
      full_singular = true;
    }
    CHECK(reduced_singular == full_singular);
    if (reduced_singular) continue;
    CHECK(std::abs(reduced_det - full_det) < 1e-10);
    CHECK(r.jacobian_size == r.record.writes.size());
    for (const auto& s : r.record.reads) with_overlap += r.record.copies.count(s) ? 1 : 0;
  }
  // The generator must actually exercise read-and-copied slots.
  CHECK(with_overlap > 10);
}

TEST_CASE("GMM split Jacobian is 6x6 at every k") {
  const auto model = zoo::gmm_model(0);
  auto spec = zoo::gmm_split_merge_kernel(model, {});
  RandomSource rng(7);
  for (std::size_t k = 3; k <= 50; ++k) {
    CAPTURE(k);
    std::vector<double> means, vars, weights(k, 1.0 / static_cast<double>(k));
    for (std::size_t j = 0; j < k; ++j) {
      means.push_back(static_cast<double>(j));
      vars.push_back(1.0 + 0.1 * static_cast<double>(j));
    }
    const Trace x = zoo::gmm_trace(means, vars, weights);
    // Draw Q until it proposes a split.
    for (int attempt = 0; attempt < 1000; ++attempt) {
      const auto y = trace_and_score(*spec.auxiliary, rng, x).trace;
      const auto r = run_transform(*spec.transform, x, y, {});
      if (r.model_out.at(sym("k")).as_int() == static_cast<std::int64_t>(k) + 1) {
        CHECK(r.jacobian_size == 6);
        break;
      }
      CHECK(r.jacobian_size == 6);
    }
  }
}

TEST_CASE("simplex coordinates") {
  const Trace x = make({{sym("w"), Value::vector({0.2, 0.3, 0.5})}});
  SUBCASE("the determined slot is neither read nor written") {
    const auto r = run_body(
        [](TransformContext& t) {
          const auto w = t.read_simplex(Handle::ModelIn, sym("w"), 2);
          CHECK(w[2].value() == 0.5);
          CHECK(w[2].d(0) == -1.0);
          CHECK(w[2].d(1) == -1.0);
          VectorOut o(3);
          o.set(0, w[0] / 2.0);
          o.set(1, w[1]);
          o.set(2, 1.0 - w[0] / 2.0 - w[1]);
          t.write_simplex(Handle::ModelOut, sym("w"), o, 2);
        },
        x, {});
    CHECK(r.record.reads.size() == 2);
    CHECK(r.record.writes.size() == 2);
    CHECK(r.log_abs_det == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    const auto w = r.model_out.at(sym("w")).as_vector();
    CHECK(w[0] + w[1] + w[2] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("a permutation of free coordinates is all copies") {
    const auto r = run_body(
        [](TransformContext& t) { permute_simplex(t, Handle::ModelIn, sym("w"), Handle::ModelOut, sym("w"), {1, 0, 2}, 2); },
        x, {});
    CHECK(r.jacobian_size == 0);
    CHECK(r.log_abs_det == 0.0);
    CHECK(r.model_out.at(sym("w")).as_vector()[0] == 0.3);
  }
  SUBCASE("a permutation that moves the determined coordinate") {
    const auto r = run_body(
        [](TransformContext& t) { permute_simplex(t, Handle::ModelIn, sym("w"), Handle::ModelOut, sym("w"), {2, 1, 0}, 2); },
        x, {});
    CHECK(r.log_abs_det == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(r.model_out.at(sym("w")).as_vector()[0] == doctest::Approx(0.5));
  }
  SUBCASE("a whole copy keeps its structure") {
    const auto r = run_body(
        [](TransformContext& t) { t.copy(Handle::ModelIn, sym("w"), Handle::ModelOut, sym("w")); }, x, {});
    CHECK(r.jacobian_size == 0);
    CHECK(r.record.copies.size() == 3);
  }
  SUBCASE("conflicting simplex reads") {
    CHECK_THROWS_CODE(run_body(
                          [](TransformContext& t) {
                            (void)t.read_simplex(Handle::ModelIn, sym("w"), 2);
                            (void)t.read_vector(Handle::ModelIn, sym("w"));
                          },
                          x, {}),
                      ErrorCode::EffectViolation);
  }
}
