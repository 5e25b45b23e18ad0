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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace imcmc {

// An identifier-like name, rendered bare in address text (`mu`), as opposed to
// a free-form string component (rendered quoted).
class Symbol {
 public:
  Symbol() = default;
  explicit Symbol(std::string name);

  const std::string& name() const noexcept { return name_; }

  friend bool operator==(const Symbol&, const Symbol&) = default;
  friend auto operator<=>(const Symbol&, const Symbol&) = default;

 private:
  std::string name_;
};

// The (symbol, integer) tuple component, e.g. (mu, 4).
struct Indexed {
  Symbol symbol;
  std::int64_t index = 0;

  friend bool operator==(const Indexed&, const Indexed&) = default;
  friend auto operator<=>(const Indexed&, const Indexed&) = default;
};

class Component {
 public:
  using Storage = std::variant<Symbol, std::string, std::int64_t, Indexed>;

  Component(Symbol s) : value_(std::move(s)) {}
  Component(std::string s) : value_(std::move(s)) {}
  Component(std::int64_t i) : value_(i) {}
  Component(int i) : value_(static_cast<std::int64_t>(i)) {}
  Component(Indexed t) : value_(std::move(t)) {}

  const Storage& value() const noexcept { return value_; }

  std::string to_text() const;
  static Component parse(std::string_view text);

  friend bool operator==(const Component&, const Component&) = default;
  friend std::strong_ordering operator<=>(const Component& a, const Component& b);

 private:
  Storage value_;
};

// Hierarchical address of one random choice. Always nonempty; namespaces nest
// by prefixing components.
class Address {
 public:
  Address(Component c);
  Address(std::initializer_list<Component> components);
  explicit Address(std::vector<Component> components);

  const std::vector<Component>& components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }
  const Component& front() const { return components_.front(); }
  const Component& back() const { return components_.back(); }

  bool has_prefix(const Address& prefix) const;
  // Requires has_prefix(prefix) and a strictly longer address.
  Address strip_prefix(const Address& prefix) const;

  std::string to_text() const;
  static Address parse(std::string_view text);

  friend Address operator/(const Address& a, const Address& b);

  friend bool operator==(const Address&, const Address&) = default;
  friend std::strong_ordering operator<=>(const Address& a, const Address& b);

 private:
  std::vector<Component> components_;
};

Address operator/(const Address& a, const Address& b);

// One-component addresses: sym("k") is `k`, idx("mu", 2) is `(mu,2)`.
inline Address sym(std::string name) { return Address(Component(Symbol(std::move(name)))); }
inline Address idx(std::string name, std::int64_t i) { return Address(Component(Indexed{Symbol(std::move(name)), i})); }

}  // namespace imcmc

template <>
struct std::hash<imcmc::Address> {
  std::size_t operator()(const imcmc::Address& a) const noexcept;
};
