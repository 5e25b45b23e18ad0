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
#include "imcmc/error.hpp"
#include "imcmc/oracle.hpp"
#include "imcmc/zoo/discrete.hpp"
#include "imcmc/zoo/toy.hpp"
#include "support.hpp"

using namespace imcmc;
using test_support::golden;

TEST_CASE("enumerate_support") {
  CHECK(oracle::enumerate_support(Distribution::bernoulli(0.3)).size() == 2);
  CHECK(oracle::enumerate_support(Distribution::bernoulli(1.0)).size() == 1);
  CHECK(oracle::enumerate_support(Distribution::uniform_discrete(2, 5)).size() == 4);
  CHECK(oracle::enumerate_support(Distribution::categorical({0.5, 0.0, 0.5})).size() == 2);
  const auto pois = oracle::enumerate_support(Distribution::poisson_plus_one(1.0));
  double mass = 0;
  for (const auto& v : pois) mass += std::exp(Distribution::poisson_plus_one(1.0).logpdf(v));
  CHECK(1 - mass < 1e-12);
  CHECK(pois.front().as_int() == 1);
  CHECK_THROWS_CODE(oracle::enumerate_support(Distribution::normal(0, 1)), ErrorCode::NotEnumerable);
}

TEST_CASE("enumerated posterior of the categorical pair") {
  const auto spec = zoo::categorical_shift_kernel();
  const oracle::FiniteStateIndex index(*spec.model, spec.observations);
  CHECK(index.size() == 9);
  // Σ_z p(z1) p(z2) p(o | z): 0.9 * (0.04 + 0.25 + 0.09) + 0.2 * 0.62
  CHECK(std::exp(index.log_evidence()) == doctest::Approx(0.466).epsilon(1e-13));
  const Eigen::VectorXd pi = index.posterior();
  CHECK(pi.sum() == doctest::Approx(1.0).epsilon(1e-14));
  Trace same;
  same.insert(sym("z1"), Value::integer(2));
  same.insert(sym("z2"), Value::integer(2));
  const auto i = index.find(same);
  REQUIRE(i);
  CHECK(pi(static_cast<Eigen::Index>(*i)) == doctest::Approx(0.25 * 0.9 / 0.466).epsilon(1e-13));
  Trace outside = same;
  outside.insert(sym("extra"), Value::integer(0));
  CHECK(!index.find(outside));
}

TEST_CASE("flip kernel transition matrix") {
  const auto spec = zoo::flip_kernel();
  const oracle::FiniteStateIndex index(*spec.model, spec.observations);
  REQUIRE(index.size() == 2);
  Trace off;
  off.insert(sym("x"), Value::boolean(false));
  const auto f = static_cast<Eigen::Index>(*index.find(off));
  const auto t = 1 - f;
  const Eigen::MatrixXd k = oracle::brute_force_kernel(spec, index);
  CHECK(k(f, f) == doctest::Approx(4.0 / 7).epsilon(1e-15));
  CHECK(k(f, t) == doctest::Approx(3.0 / 7).epsilon(1e-15));
  CHECK(k(t, f) == 1.0);
  CHECK(k(t, t) == 0.0);
  CHECK(oracle::detailed_balance_residual(k, index.posterior()) < 1e-15);
}

TEST_CASE("identity kernel is the identity matrix") {
  auto spec = zoo::birth_death_kernel();
  spec.auxiliary = std::make_shared<GenerativeProgram>("empty", [](Context&, const Trace&) {});
  spec.transform = std::make_shared<TransformProgram>("identity", [](TransformContext& t) {
    for (const auto& a : t.keys(Handle::ModelIn)) t.copy(Handle::ModelIn, a, Handle::ModelOut, a);
  });
  const oracle::FiniteStateIndex index(*spec.model, spec.observations);
  const Eigen::MatrixXd k = oracle::brute_force_kernel(spec, index);
  CHECK((k - Eigen::MatrixXd::Identity(k.rows(), k.cols())).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("correct discrete kernels satisfy detailed balance") {
  for (const auto& spec : {zoo::birth_death_kernel(), zoo::categorical_shift_kernel()}) {
    CAPTURE(spec.name);
    const oracle::FiniteStateIndex index(*spec.model, spec.observations);
    const Eigen::VectorXd pi = index.posterior();
    for (bool checked : {false, true}) {
      const Eigen::MatrixXd k = oracle::brute_force_kernel(spec, index, checked);
      CHECK(oracle::row_sum_residual(k) < 1e-14);
      CHECK(oracle::detailed_balance_residual(k, pi) < 1e-14);
      CHECK(oracle::stationarity_residual(k, pi) < 1e-14);
    }
  }
}

TEST_CASE("a perturbed kernel breaks detailed balance unless checked") {
  const auto spec = zoo::categorical_shift_kernel(true);
  const oracle::FiniteStateIndex index(*spec.model, spec.observations);
  const Eigen::VectorXd pi = index.posterior();
  const Eigen::MatrixXd raw = oracle::brute_force_kernel(spec, index, false);
  CHECK(oracle::row_sum_residual(raw) < 1e-14);
  CHECK(oracle::detailed_balance_residual(raw, pi) > 1e-3);
  const Eigen::MatrixXd guarded = oracle::brute_force_kernel(spec, index, true);
  CHECK(oracle::detailed_balance_residual(guarded, pi) < 1e-14);
}

TEST_CASE("a cycle's matrix is the product of its members' matrices") {
  const auto a = zoo::categorical_shift_kernel();
  const auto b = zoo::categorical_shift_kernel(true);
  const oracle::FiniteStateIndex index(*a.model, a.observations);
  const Eigen::MatrixXd ka = oracle::brute_force_kernel(a, index);
  const Eigen::MatrixXd kb = oracle::brute_force_kernel(b, index);
  CHECK((oracle::brute_force_kernel(Cycle({a, b}), index) - ka * kb).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((oracle::brute_force_kernel(Cycle({b, a, a}), index) - kb * ka * ka).cwiseAbs().maxCoeff() < 1e-14);

  const auto bd = zoo::birth_death_kernel();
  const oracle::FiniteStateIndex bd_index(*bd.model, bd.observations);
  const Eigen::MatrixXd k = oracle::brute_force_kernel(bd, bd_index);
  CHECK((oracle::brute_force_kernel(Cycle({bd, bd}), bd_index) - k * k).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((oracle::brute_force_kernel(Cycle(), bd_index) - Eigen::MatrixXd::Identity(k.rows(), k.cols()))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("residual helpers") {
  Eigen::MatrixXd k(2, 2);
  k << 0.5, 0.5, 0.25, 0.75;
  Eigen::VectorXd pi(2);
  pi << 1.0 / 3, 2.0 / 3;
  CHECK(oracle::row_sum_residual(k) == 0.0);
  CHECK(oracle::detailed_balance_residual(k, pi) < 1e-16);
  CHECK(oracle::stationarity_residual(k, pi) < 1e-16);
  pi << 0.5, 0.5;
  CHECK(oracle::detailed_balance_residual(k, pi) == doctest::Approx(0.125));
}

TEST_CASE("toy posterior by quadrature") {
  CHECK(std::abs(oracle::toy_posterior_k2({}).p_k2 - 0.5) < 1e-15);
  const auto toy = oracle::toy_posterior_k2(zoo::toy_dataset());
  CHECK(std::abs(toy.p_k2 - golden("toy_p_k2")) < 1e-8);
  CHECK(toy.refinement_change < 1e-6);
  const std::vector<double> sym_data{-3, -3, 3, 3};
  CHECK(std::abs(oracle::toy_posterior_k2(sym_data).p_k2 - golden("sym_p_k2")) < 1e-8);

  // Pushing two clusters apart only makes two means more plausible.
  double prev = 0;
  for (double d = 0.5; d <= 3.0; d += 0.25) {
    const std::vector<double> data{-d, -d, d, d};
    const double p = oracle::toy_posterior_k2(data).p_k2;
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("total variation distance") {
  const std::vector<double> p{0.2, 0.3, 0.5}, q{0.5, 0.3, 0.2}, r{0, 0, 1}, s{1, 0, 0};
  CHECK(oracle::tv_distance(p, p) == 0.0);
  CHECK(oracle::tv_distance(p, q) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(oracle::tv_distance(r, s) == 1.0);
  CHECK(oracle::tv_distance(p, q) == oracle::tv_distance(q, p));
  const std::vector<double> bad{0.5, 0.6, 0.0}, shorter{1.0};
  CHECK_THROWS_CODE(oracle::tv_distance(p, bad), ErrorCode::InvalidArgument);
  CHECK_THROWS_CODE(oracle::tv_distance(p, shorter), ErrorCode::InvalidArgument);
}
