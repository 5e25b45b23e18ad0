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

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "imcmc/random.hpp"
#include "imcmc/value.hpp"

namespace imcmc {

// Primitive distributions. Parameters are validated at construction, so
// logpdf never sees a malformed distribution and never returns NaN.
//
// Conventions:
//   normal(mu, sigma)          sigma is a standard deviation
//   inv_gamma(shape, scale)    density ∝ x^(-shape-1) exp(-scale/x)
//   gamma(shape, scale)        density ∝ x^(shape-1) exp(-x/scale)
//   beta(a, b)                 open support (0, 1)
//   poisson_plus_one(rate)     1 + Poisson(rate), support {1, 2, ...}
//   uniform_discrete(lo, hi)   integers lo..hi inclusive
//   categorical(weights)       integers 1..n (one-based, like the model
//                              programs that index clusters from 1)
//   dirichlet(alpha)           one vector value; density w.r.t. Lebesgue
//                              measure on the first n-1 coordinates
//   mixture_of_normals(w, means, vars)   vars are variances
//   mvnormal(mean, cov)        cov symmetric positive definite
class Distribution {
 public:
  enum class Kind {
    Normal,
    InvGamma,
    Gamma,
    Beta,
    PoissonPlusOne,
    Bernoulli,
    UniformDiscrete,
    Categorical,
    Dirichlet,
    MixtureOfNormals,
    MvNormal,
  };

  static Distribution normal(double mu, double sigma);
  static Distribution inv_gamma(double shape, double scale);
  static Distribution gamma(double shape, double scale);
  static Distribution beta(double a, double b);
  static Distribution poisson_plus_one(double rate);
  static Distribution bernoulli(double p);
  static Distribution uniform_discrete(std::int64_t lo, std::int64_t hi);
  static Distribution categorical(std::vector<double> weights);
  static Distribution dirichlet(std::vector<double> alpha);
  static Distribution mixture_of_normals(std::vector<double> weights, std::vector<double> means,
                                         std::vector<double> vars);
  static Distribution mvnormal(Eigen::VectorXd mean, Eigen::MatrixXd cov);

  Kind kind() const noexcept { return kind_; }
  Tag tag() const noexcept;
  std::string name() const;

  Value sample(RandomSource& rng) const;

  // Log density w.r.t. counting (discrete) or Lebesgue (continuous) measure.
  // -inf outside the support. Throws TagMismatch when the value's tag
  // disagrees with the distribution's.
  double logpdf(const Value& v) const;

  // Scalar parameters in constructor order (vectors for the vector-valued
  // kinds live in `vectors()`).
  const std::vector<double>& scalars() const noexcept { return scalars_; }
  const std::vector<std::vector<double>>& vectors() const noexcept { return vectors_; }

 private:
  struct MvCache;

  explicit Distribution(Kind k) : kind_(k) {}

  double logpdf_real(double x) const;

  Kind kind_;
  std::vector<double> scalars_;
  std::vector<std::vector<double>> vectors_;
  std::shared_ptr<const MvCache> mv_;
};

// Tolerance on |sum - 1| for probability vectors and simplex values.
inline constexpr double kSimplexTolerance = 1e-12;

// Shared samplers, also used by zoo data generators.
double sample_gamma(RandomSource& rng, double shape, double scale);

// log N(x; mu, sigma^2) with sigma a standard deviation.
double normal_logpdf(double x, double mu, double sigma);

}  // namespace imcmc
