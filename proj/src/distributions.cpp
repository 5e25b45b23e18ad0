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

#include "imcmc/distributions.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "imcmc/error.hpp"

namespace imcmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::InvalidArgument, what);
}

bool finite_positive(double x) { return std::isfinite(x) && x > 0; }

void require_probability_vector(const std::vector<double>& w, const std::string& who) {
  require(!w.empty(), who + ": empty weight vector");
  double total = 0;
  for (double x : w) {
    require(std::isfinite(x) && x >= 0, who + ": weights must be finite and nonnegative");
    total += x;
  }
  require(std::abs(total - 1.0) <= kSimplexTolerance, who + ": weights must sum to 1");
}

double log_sum_exp(const std::vector<double>& xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace

struct Distribution::MvCache {
  Eigen::VectorXd mean;
  Eigen::LLT<Eigen::MatrixXd> llt;
  double log_det_half = 0;  // sum of log diag(L)
};

double normal_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -kHalfLog2Pi - std::log(sigma) - 0.5 * z * z;
}

double sample_gamma(RandomSource& rng, double shape, double scale) {
  // Marsaglia-Tsang; shape < 1 is boosted through shape + 1.
  if (shape < 1.0) {
    const double g = sample_gamma(rng, shape + 1.0, 1.0);
    return scale * g * std::pow(rng.uniform_open(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0;
    double v = 0;
    do {
      x = rng.standard_normal();
      v = 1.0 + c * x;
    } while (v <= 0);
    v = v * v * v;
    const double u = rng.uniform_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
  }
}

Distribution Distribution::normal(double mu, double sigma) {
  require(std::isfinite(mu) && finite_positive(sigma), "normal: need finite mu and sigma > 0");
  Distribution d(Kind::Normal);
  d.scalars_ = {mu, sigma};
  return d;
}

Distribution Distribution::inv_gamma(double shape, double scale) {
  require(finite_positive(shape) && finite_positive(scale), "inv_gamma: need shape, scale > 0");
  Distribution d(Kind::InvGamma);
  d.scalars_ = {shape, scale};
  return d;
}

Distribution Distribution::gamma(double shape, double scale) {
  require(finite_positive(shape) && finite_positive(scale), "gamma: need shape, scale > 0");
  Distribution d(Kind::Gamma);
  d.scalars_ = {shape, scale};
  return d;
}

Distribution Distribution::beta(double a, double b) {
  require(finite_positive(a) && finite_positive(b), "beta: need a, b > 0");
  Distribution d(Kind::Beta);
  d.scalars_ = {a, b};
  return d;
}

Distribution Distribution::poisson_plus_one(double rate) {
  require(finite_positive(rate), "poisson_plus_one: need rate > 0");
  Distribution d(Kind::PoissonPlusOne);
  d.scalars_ = {rate};
  return d;
}

Distribution Distribution::bernoulli(double p) {
  require(p >= 0 && p <= 1, "bernoulli: need 0 <= p <= 1");
  Distribution d(Kind::Bernoulli);
  d.scalars_ = {p};
  return d;
}

Distribution Distribution::uniform_discrete(std::int64_t lo, std::int64_t hi) {
  require(lo <= hi, "uniform_discrete: need lo <= hi");
  Distribution d(Kind::UniformDiscrete);
  d.scalars_ = {static_cast<double>(lo), static_cast<double>(hi)};
  return d;
}

Distribution Distribution::categorical(std::vector<double> weights) {
  require_probability_vector(weights, "categorical");
  Distribution d(Kind::Categorical);
  d.vectors_ = {std::move(weights)};
  return d;
}

Distribution Distribution::dirichlet(std::vector<double> alpha) {
  require(!alpha.empty(), "dirichlet: empty alpha");
  for (double a : alpha) require(finite_positive(a), "dirichlet: need alpha > 0");
  Distribution d(Kind::Dirichlet);
  d.vectors_ = {std::move(alpha)};
  return d;
}

Distribution Distribution::mixture_of_normals(std::vector<double> weights, std::vector<double> means,
                                              std::vector<double> vars) {
  require(weights.size() == means.size() && means.size() == vars.size(),
          "mixture_of_normals: parameter lengths differ");
  require_probability_vector(weights, "mixture_of_normals");
  for (double m : means) require(std::isfinite(m), "mixture_of_normals: non-finite mean");
  for (double v : vars) require(finite_positive(v), "mixture_of_normals: need variances > 0");
  Distribution d(Kind::MixtureOfNormals);
  d.vectors_ = {std::move(weights), std::move(means), std::move(vars)};
  return d;
}

Distribution Distribution::mvnormal(Eigen::VectorXd mean, Eigen::MatrixXd cov) {
  const auto n = mean.size();
  require(n >= 1, "mvnormal: empty mean");
  require(cov.rows() == n && cov.cols() == n, "mvnormal: covariance shape mismatch");
  require(mean.allFinite() && cov.allFinite(), "mvnormal: non-finite parameters");
  const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff()), "mvnormal: covariance not symmetric");
  auto cache = std::make_shared<MvCache>();
  cache->mean = mean;
  cache->llt.compute(cov);
  require(cache->llt.info() == Eigen::Success, "mvnormal: covariance not positive definite");
  const Eigen::MatrixXd l = cache->llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i) {
    require(l(i, i) > 0, "mvnormal: covariance not positive definite");
    cache->log_det_half += std::log(l(i, i));
  }
  Distribution d(Kind::MvNormal);
  d.vectors_ = {std::vector<double>(mean.data(), mean.data() + n)};
  d.mv_ = std::move(cache);
  return d;
}

Tag Distribution::tag() const noexcept {
  switch (kind_) {
    case Kind::PoissonPlusOne:
    case Kind::Bernoulli:
    case Kind::UniformDiscrete:
    case Kind::Categorical:
      return Tag::Discrete;
    default:
      return Tag::Continuous;
  }
}

std::string Distribution::name() const {
  switch (kind_) {
    case Kind::Normal: return "normal";
    case Kind::InvGamma: return "inv_gamma";
    case Kind::Gamma: return "gamma";
    case Kind::Beta: return "beta";
    case Kind::PoissonPlusOne: return "poisson_plus_one";
    case Kind::Bernoulli: return "bernoulli";
    case Kind::UniformDiscrete: return "uniform_discrete";
    case Kind::Categorical: return "categorical";
    case Kind::Dirichlet: return "dirichlet";
    case Kind::MixtureOfNormals: return "mixture_of_normals";
    case Kind::MvNormal: return "mvnormal";
  }
  return "unknown";
}

Value Distribution::sample(RandomSource& rng) const {
  const auto& s = scalars_;
  switch (kind_) {
    case Kind::Normal:
      return Value::real(s[0] + s[1] * rng.standard_normal());
    case Kind::InvGamma:
      return Value::real(s[1] / sample_gamma(rng, s[0], 1.0));
    case Kind::Gamma:
      return Value::real(sample_gamma(rng, s[0], s[1]));
    case Kind::Beta:
      for (;;) {
        const double x = sample_gamma(rng, s[0], 1.0);
        const double y = sample_gamma(rng, s[1], 1.0);
        const double b = x / (x + y);
        if (b > 0 && b < 1) return Value::real(b);
      }
    case Kind::PoissonPlusOne: {
      // Inversion; fine for the small rates used here.
      const double u = rng.uniform();
      double p = std::exp(-s[0]);
      double cdf = p;
      std::int64_t k = 0;
      while (u >= cdf && p > 0) {
        ++k;
        p *= s[0] / static_cast<double>(k);
        cdf += p;
      }
      return Value::integer(k + 1);
    }
    case Kind::Bernoulli:
      return Value::boolean(rng.uniform() < s[0]);
    case Kind::UniformDiscrete: {
      const auto lo = static_cast<std::int64_t>(s[0]);
      const auto span = static_cast<std::uint64_t>(static_cast<std::int64_t>(s[1]) - lo) + 1;
      return Value::integer(lo + static_cast<std::int64_t>(rng.below(span)));
    }
    case Kind::Categorical: {
      const auto& w = vectors_[0];
      const double u = rng.uniform();
      double cdf = 0;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] > 0) last_positive = i;
        cdf += w[i];
        if (u < cdf && w[i] > 0) return Value::integer(static_cast<std::int64_t>(i) + 1);
      }
      return Value::integer(static_cast<std::int64_t>(last_positive) + 1);
    }
    case Kind::Dirichlet: {
      const auto& a = vectors_[0];
      for (;;) {
        std::vector<double> g(a.size());
        double total = 0;
        for (std::size_t i = 0; i < a.size(); ++i) total += (g[i] = sample_gamma(rng, a[i], 1.0));
        bool ok = total > 0;
        double partial = 0;
        for (std::size_t i = 0; ok && i + 1 < g.size(); ++i) {
          g[i] /= total;
          partial += g[i];
          ok = g[i] > 0;
        }
        // Last coordinate is the complement so the sum is exact up to one
        // rounding, matching how transforms write simplex values.
        g.back() = 1.0 - partial;
        if (ok && g.back() > 0) return Value::vector(std::move(g));
      }
    }
    case Kind::MixtureOfNormals: {
      const auto& w = vectors_[0];
      const double u = rng.uniform();
      double cdf = 0;
      std::size_t j = w.size() - 1;
      for (std::size_t i = 0; i < w.size(); ++i) {
        cdf += w[i];
        if (u < cdf) {
          j = i;
          break;
        }
      }
      return Value::real(vectors_[1][j] + std::sqrt(vectors_[2][j]) * rng.standard_normal());
    }
    case Kind::MvNormal: {
      const auto n = mv_->mean.size();
      Eigen::VectorXd z(n);
      for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.standard_normal();
      const Eigen::VectorXd x = mv_->mean + mv_->llt.matrixL() * z;
      return Value::vector(std::vector<double>(x.data(), x.data() + n));
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown distribution kind");
}

double Distribution::logpdf_real(double x) const {
  const auto& s = scalars_;
  switch (kind_) {
    case Kind::Normal:
      return normal_logpdf(x, s[0], s[1]);
    case Kind::InvGamma:
      if (!(x > 0)) return kNegInf;
      return s[0] * std::log(s[1]) - std::lgamma(s[0]) - (s[0] + 1.0) * std::log(x) - s[1] / x;
    case Kind::Gamma:
      if (!(x > 0)) return kNegInf;
      return -std::lgamma(s[0]) - s[0] * std::log(s[1]) + (s[0] - 1.0) * std::log(x) - x / s[1];
    case Kind::Beta:
      if (!(x > 0 && x < 1)) return kNegInf;
      return std::lgamma(s[0] + s[1]) - std::lgamma(s[0]) - std::lgamma(s[1]) + (s[0] - 1.0) * std::log(x) +
             (s[1] - 1.0) * std::log1p(-x);
    case Kind::MixtureOfNormals: {
      const auto& w = vectors_[0];
      std::vector<double> terms;
      terms.reserve(w.size());
      for (std::size_t j = 0; j < w.size(); ++j) {
        terms.push_back(std::log(w[j]) + normal_logpdf(x, vectors_[1][j], std::sqrt(vectors_[2][j])));
      }
      return log_sum_exp(terms);
    }
    default:
      return kNegInf;
  }
}

double Distribution::logpdf(const Value& v) const {
  if (v.tag() != tag()) {
    throw Error(ErrorCode::TagMismatch,
                name() + " cannot score " + (v.is_discrete() ? "discrete" : "continuous") + " value " +
                    v.describe());
  }
  const auto& s = scalars_;
  switch (kind_) {
    case Kind::PoissonPlusOne: {
      const auto* k = std::get_if<std::int64_t>(&v.payload());
      if (k == nullptr || *k < 1) return kNegInf;
      const double m = static_cast<double>(*k - 1);
      return m * std::log(s[0]) - s[0] - std::lgamma(m + 1.0);
    }
    case Kind::Bernoulli: {
      const auto* b = std::get_if<bool>(&v.payload());
      if (b == nullptr) return kNegInf;
      return std::log(*b ? s[0] : 1.0 - s[0]);
    }
    case Kind::UniformDiscrete: {
      const auto* k = std::get_if<std::int64_t>(&v.payload());
      if (k == nullptr || static_cast<double>(*k) < s[0] || static_cast<double>(*k) > s[1]) return kNegInf;
      return -std::log(s[1] - s[0] + 1.0);
    }
    case Kind::Categorical: {
      const auto* k = std::get_if<std::int64_t>(&v.payload());
      const auto& w = vectors_[0];
      if (k == nullptr || *k < 1 || *k > static_cast<std::int64_t>(w.size())) return kNegInf;
      return std::log(w[static_cast<std::size_t>(*k - 1)]);
    }
    case Kind::Dirichlet: {
      const auto x = v.as_vector();
      const auto& a = vectors_[0];
      if (x.size() != a.size()) return kNegInf;
      double total = 0;
      for (double xi : x) {
        if (!(xi > 0)) return kNegInf;
        total += xi;
      }
      if (std::abs(total - 1.0) > kSimplexTolerance) return kNegInf;
      double out = std::lgamma(std::accumulate(a.begin(), a.end(), 0.0));
      for (std::size_t i = 0; i < a.size(); ++i) out += (a[i] - 1.0) * std::log(x[i]) - std::lgamma(a[i]);
      return out;
    }
    case Kind::MvNormal: {
      const auto x = v.as_vector();
      const auto n = mv_->mean.size();
      if (static_cast<Eigen::Index>(x.size()) != n) return kNegInf;
      const Eigen::VectorXd diff = Eigen::Map<const Eigen::VectorXd>(x.data(), n) - mv_->mean;
      const Eigen::VectorXd z = mv_->llt.matrixL().solve(diff);
      return -static_cast<double>(n) * kHalfLog2Pi - mv_->log_det_half - 0.5 * z.squaredNorm();
    }
    default: {
      const auto x = v.as_vector();
      if (x.size() != 1) return kNegInf;
      return logpdf_real(x[0]);
    }
  }
}

}  // namespace imcmc
