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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace imcmc {

// Forward-mode dual number carrying a gradient with respect to every active
// input slot at once. The tangent is stored densely but grows on demand:
// coordinates past the end are zero, so slots can be handed out lazily while
// a transform runs.
class DiffScalar {
 public:
  DiffScalar() = default;
  DiffScalar(double v) : value_(v) {}  // NOLINT: constants convert implicitly

  static DiffScalar variable(double v, std::size_t slot);
  static DiffScalar with_tangent(double v, std::vector<double> tangent);

  double value() const noexcept { return value_; }
  double d(std::size_t slot) const noexcept { return slot < tangent_.size() ? tangent_[slot] : 0.0; }
  const std::vector<double>& tangent() const noexcept { return tangent_; }
  bool is_constant() const noexcept;

  DiffScalar& operator+=(const DiffScalar& o);
  DiffScalar& operator-=(const DiffScalar& o);
  DiffScalar& operator*=(const DiffScalar& o);
  DiffScalar& operator/=(const DiffScalar& o);

  friend DiffScalar operator+(DiffScalar a, const DiffScalar& b) { return a += b; }
  friend DiffScalar operator-(DiffScalar a, const DiffScalar& b) { return a -= b; }
  friend DiffScalar operator*(DiffScalar a, const DiffScalar& b) { return a *= b; }
  friend DiffScalar operator/(DiffScalar a, const DiffScalar& b) { return a /= b; }
  friend DiffScalar operator-(DiffScalar a);

  // Comparisons look at primals only. A branch on them is not
  // differentiable at the switching point.
  friend bool operator<(const DiffScalar& a, const DiffScalar& b) { return a.value_ < b.value_; }
  friend bool operator>(const DiffScalar& a, const DiffScalar& b) { return a.value_ > b.value_; }
  friend bool operator<=(const DiffScalar& a, const DiffScalar& b) { return a.value_ <= b.value_; }
  friend bool operator>=(const DiffScalar& a, const DiffScalar& b) { return a.value_ >= b.value_; }

  friend DiffScalar exp(const DiffScalar& a);
  friend DiffScalar log(const DiffScalar& a);
  friend DiffScalar log1p(const DiffScalar& a);
  friend DiffScalar expm1(const DiffScalar& a);
  friend DiffScalar sqrt(const DiffScalar& a);
  friend DiffScalar pow(const DiffScalar& a, double p);
  friend DiffScalar pow(const DiffScalar& a, const DiffScalar& p);
  friend DiffScalar sin(const DiffScalar& a);
  friend DiffScalar cos(const DiffScalar& a);
  friend DiffScalar tan(const DiffScalar& a);
  friend DiffScalar tanh(const DiffScalar& a);
  friend DiffScalar atan(const DiffScalar& a);
  friend DiffScalar abs(const DiffScalar& a);

 private:
  // value' = f(value); tangent' = scale * tangent
  DiffScalar chain(double v, double scale) const;

  double value_ = 0;
  std::vector<double> tangent_;
};

// Row i = input slot, column j = output slot: entry (i, j) = d out_j / d in_i.
struct JacobianMatrix {
  Eigen::MatrixXd entries;

  Eigen::Index rows() const { return entries.rows(); }
  Eigen::Index cols() const { return entries.cols(); }
};

using DiffMap = std::function<std::vector<DiffScalar>(std::span<const DiffScalar>)>;

// Dense Jacobian of a square map at `point`, one vectorized forward pass.
// Throws NonSquare when the output arity differs from the input arity.
JacobianMatrix jacobian(const DiffMap& f, std::span<const double> point);

// log|det J| by LU with partial pivoting; -inf when singular. The empty
// matrix has determinant 1.
double log_abs_det(const JacobianMatrix& j);
double log_abs_det(const Eigen::MatrixXd& m);

}  // namespace imcmc
