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
#include <initializer_list>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "imcmc/address.hpp"
#include "imcmc/value.hpp"

namespace imcmc {

// A choice dictionary: a finite map from addresses to values. Entries are kept
// in address order so iteration (and everything derived from it, such as
// Jacobian row order) is deterministic.
class Trace {
 public:
  using Map = std::map<Address, Value>;
  using const_iterator = Map::const_iterator;

  Trace() = default;
  Trace(std::initializer_list<std::pair<const Address, Value>> entries);

  // Throws DuplicateAddress if the address is already present.
  void insert(const Address& address, Value value);
  // Inserts or replaces.
  void assign(const Address& address, Value value);
  bool erase(const Address& address);

  bool contains(const Address& address) const { return entries_.count(address) != 0; }
  const Value& at(const Address& address) const;
  const Value* find(const Address& address) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const_iterator begin() const noexcept { return entries_.begin(); }
  const_iterator end() const noexcept { return entries_.end(); }

  std::set<Address> keys() const;

  // Entries whose address starts with `prefix` (addresses kept whole).
  std::vector<std::pair<Address, Value>> under(const Address& prefix) const;
  // Entries under `prefix`, with the prefix removed.
  Trace subtrace(const Address& prefix) const;

  // Total continuous dimension (sum of d_k over continuous keys).
  std::size_t continuous_dimension() const;

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  Map entries_;
};

// x ⊕ y on disjoint key sets; throws OverlappingKeys otherwise.
Trace merge(const Trace& a, const Trace& b);

// Restriction to the given keys; keys absent from `a` are ignored.
Trace restrict(const Trace& a, const std::set<Address>& keys);

// Complement of restrict: drops the given keys.
Trace without(const Trace& a, const std::set<Address>& keys);

// Key sets equal, discrete values identical, continuous values within `tol`
// componentwise (absolute).
bool trace_equal(const Trace& a, const Trace& b, double tol);

inline constexpr double kDefaultEqualityTolerance = 1e-9;

// Addresses at which two traces differ (including keys present in one only).
std::vector<Address> trace_differences(const Trace& a, const Trace& b, double tol);

}  // namespace imcmc
