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

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "imcmc/address.hpp"

namespace imcmc {

enum class Tag { Discrete, Continuous };

// The value of one random choice. Discrete payloads are integers, booleans,
// strings or symbols; continuous payloads are finite real vectors (a scalar is
// a vector of dimension one). The tag follows from the payload and cannot
// change after construction.
class Value {
 public:
  using Storage = std::variant<std::int64_t, bool, std::string, Symbol, std::vector<double>>;

  static Value integer(std::int64_t v) { return Value(Storage(v)); }
  static Value boolean(bool v) { return Value(Storage(v)); }
  static Value string(std::string v) { return Value(Storage(std::move(v))); }
  static Value symbol(Symbol v) { return Value(Storage(std::move(v))); }
  static Value real(double v);
  static Value vector(std::vector<double> v);

  Tag tag() const noexcept {
    return std::holds_alternative<std::vector<double>>(payload_) ? Tag::Continuous : Tag::Discrete;
  }
  bool is_discrete() const noexcept { return tag() == Tag::Discrete; }
  bool is_continuous() const noexcept { return tag() == Tag::Continuous; }

  // Number of scalar slots for a continuous value; 0 for discrete.
  std::size_t dimension() const noexcept;

  std::int64_t as_int() const;
  bool as_bool() const;
  const std::string& as_string() const;
  const Symbol& as_symbol() const;
  double as_real() const;
  std::span<const double> as_vector() const;

  const Storage& payload() const noexcept { return payload_; }

  // Short human-readable rendering for diagnostics.
  std::string describe() const;

  friend bool operator==(const Value&, const Value&) = default;

 private:
  explicit Value(Storage s) : payload_(std::move(s)) {}
  Storage payload_;
};

}  // namespace imcmc
