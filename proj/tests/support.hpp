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

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>

#include "imcmc/autodiff.hpp"
#include "imcmc/error.hpp"

namespace test_support {

// Value of `name` from tests/fixtures/golden.txt.
inline double golden(const std::string& name) {
  static const std::map<std::string, double> table = [] {
    std::map<std::string, double> t;
    std::ifstream in(IMCMC_FIXTURES_DIR "/golden.txt");
    if (!in) throw std::runtime_error("missing golden.txt");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream is(line);
      std::string key;
      double v = 0;
      is >> key >> v;
      t[key] = v;
    }
    return t;
  }();
  auto it = table.find(name);
  if (it == table.end()) throw std::runtime_error("no golden value " + name);
  return it->second;
}

// Central differences; entry (i, j) = d out_j / d in_i like imcmc::jacobian.
inline Eigen::MatrixXd fd_jacobian(const imcmc::DiffMap& f, std::vector<double> point, double h = 1e-6) {
  auto eval = [&](const std::vector<double>& p) {
    std::vector<imcmc::DiffScalar> in(p.begin(), p.end());
    std::vector<double> out;
    for (const auto& v : f(in)) out.push_back(v.value());
    return out;
  };
  const auto n = static_cast<Eigen::Index>(point.size());
  Eigen::MatrixXd j(n, static_cast<Eigen::Index>(eval(point).size()));
  for (Eigen::Index i = 0; i < n; ++i) {
    auto up = point, down = point;
    up[static_cast<std::size_t>(i)] += h;
    down[static_cast<std::size_t>(i)] -= h;
    const auto a = eval(up), b = eval(down);
    for (Eigen::Index k = 0; k < j.cols(); ++k) j(i, k) = (a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) / (2 * h);
  }
  return j;
}

// max |a - b| / max(1, |b|) entrywise.
inline double max_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff();
}

}  // namespace test_support

#define CHECK_THROWS_CODE(expr, ec)                      \
  do {                                                   \
    bool caught_ = false;                                \
    try {                                                \
      (void)(expr);                                      \
    } catch (const imcmc::Error& e_) {                   \
      caught_ = true;                                    \
      CHECK_MESSAGE(e_.code() == (ec), e_.what());       \
    }                                                    \
    CHECK_MESSAGE(caught_, "expected an imcmc::Error");  \
  } while (0)
