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

#include "imcmc/autodiff.hpp"

#include <cmath>
#include <limits>

#include "imcmc/error.hpp"

namespace imcmc {

namespace {

// a += s * b on tangents, extending a as needed.
void axpy(std::vector<double>& a, double s, const std::vector<double>& b) {
  if (b.size() > a.size()) a.resize(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += s * b[i];
}

void scale(std::vector<double>& a, double s) {
  for (double& x : a) x *= s;
}

}  // namespace

DiffScalar DiffScalar::variable(double v, std::size_t slot) {
  DiffScalar out(v);
  out.tangent_.assign(slot + 1, 0.0);
  out.tangent_[slot] = 1.0;
  return out;
}

DiffScalar DiffScalar::with_tangent(double v, std::vector<double> tangent) {
  DiffScalar out(v);
  out.tangent_ = std::move(tangent);
  return out;
}

bool DiffScalar::is_constant() const noexcept {
  for (double t : tangent_) {
    if (t != 0.0) return false;
  }
  return true;
}

DiffScalar DiffScalar::chain(double v, double s) const {
  DiffScalar out(v);
  out.tangent_ = tangent_;
  scale(out.tangent_, s);
  return out;
}

DiffScalar& DiffScalar::operator+=(const DiffScalar& o) {
  value_ += o.value_;
  axpy(tangent_, 1.0, o.tangent_);
  return *this;
}

DiffScalar& DiffScalar::operator-=(const DiffScalar& o) {
  value_ -= o.value_;
  axpy(tangent_, -1.0, o.tangent_);
  return *this;
}

DiffScalar& DiffScalar::operator*=(const DiffScalar& o) {
  // (uv)' = u'v + uv'
  scale(tangent_, o.value_);
  axpy(tangent_, value_, o.tangent_);
  value_ *= o.value_;
  return *this;
}

DiffScalar& DiffScalar::operator/=(const DiffScalar& o) {
  // (u/v)' = (u' - (u/v) v') / v
  const double q = value_ / o.value_;
  axpy(tangent_, -q, o.tangent_);
  scale(tangent_, 1.0 / o.value_);
  value_ = q;
  return *this;
}

DiffScalar operator-(DiffScalar a) {
  a.value_ = -a.value_;
  scale(a.tangent_, -1.0);
  return a;
}

DiffScalar exp(const DiffScalar& a) {
  const double e = std::exp(a.value_);
  return a.chain(e, e);
}

DiffScalar log(const DiffScalar& a) { return a.chain(std::log(a.value_), 1.0 / a.value_); }

DiffScalar log1p(const DiffScalar& a) { return a.chain(std::log1p(a.value_), 1.0 / (1.0 + a.value_)); }

DiffScalar expm1(const DiffScalar& a) { return a.chain(std::expm1(a.value_), std::exp(a.value_)); }

DiffScalar sqrt(const DiffScalar& a) {
  const double r = std::sqrt(a.value_);
  return a.chain(r, 0.5 / r);
}

DiffScalar pow(const DiffScalar& a, double p) {
  return a.chain(std::pow(a.value_, p), p * std::pow(a.value_, p - 1.0));
}

DiffScalar pow(const DiffScalar& a, const DiffScalar& p) {
  // a^p = exp(p log a); needs a > 0 when p carries a tangent.
  if (p.is_constant()) return pow(a, p.value_);
  return exp(p * log(a));
}

DiffScalar sin(const DiffScalar& a) { return a.chain(std::sin(a.value_), std::cos(a.value_)); }

DiffScalar cos(const DiffScalar& a) { return a.chain(std::cos(a.value_), -std::sin(a.value_)); }

DiffScalar tan(const DiffScalar& a) {
  const double t = std::tan(a.value_);
  return a.chain(t, 1.0 + t * t);
}

DiffScalar tanh(const DiffScalar& a) {
  const double t = std::tanh(a.value_);
  return a.chain(t, 1.0 - t * t);
}

DiffScalar atan(const DiffScalar& a) { return a.chain(std::atan(a.value_), 1.0 / (1.0 + a.value_ * a.value_)); }

DiffScalar abs(const DiffScalar& a) { return a.chain(std::abs(a.value_), a.value_ < 0 ? -1.0 : 1.0); }

JacobianMatrix jacobian(const DiffMap& f, std::span<const double> point) {
  const std::size_t n = point.size();
  std::vector<DiffScalar> in;
  in.reserve(n);
  for (std::size_t i = 0; i < n; ++i) in.push_back(DiffScalar::variable(point[i], i));
  const std::vector<DiffScalar> out = f(in);
  if (out.size() != n) {
    throw Error(ErrorCode::NonSquare,
                "map has " + std::to_string(n) + " inputs and " + std::to_string(out.size()) + " outputs");
  }
  JacobianMatrix j{Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n))};
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) j.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = out[c].d(r);
  }
  return j;
}

double log_abs_det(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::NonSquare,
                std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + " matrix has no determinant");
  }
  Eigen::MatrixXd a = m;
  const Eigen::Index n = a.rows();
  double out = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    const double pivot = a(p, k);
    if (pivot == 0.0 || !std::isfinite(pivot)) return -std::numeric_limits<double>::infinity();
    if (p != k) a.row(p).swap(a.row(k));
    out += std::log(std::abs(pivot));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double l = a(i, k) / pivot;
      if (l != 0.0) a.row(i).tail(n - k) -= l * a.row(k).tail(n - k);
    }
  }
  return out;
}

double log_abs_det(const JacobianMatrix& j) { return log_abs_det(j.entries); }

}  // namespace imcmc
