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

#include "imcmc/trace.hpp"

#include <cmath>
#include <sstream>

#include "imcmc/error.hpp"

namespace imcmc {

Value Value::real(double v) { return vector({v}); }

Value Value::vector(std::vector<double> v) {
  if (v.empty()) throw Error(ErrorCode::InvalidArgument, "continuous value needs dimension >= 1");
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFiniteValue, "continuous values must be finite");
  }
  return Value(Storage(std::move(v)));
}

std::size_t Value::dimension() const noexcept {
  if (const auto* v = std::get_if<std::vector<double>>(&payload_)) return v->size();
  return 0;
}

std::int64_t Value::as_int() const {
  if (const auto* v = std::get_if<std::int64_t>(&payload_)) return *v;
  throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not an integer");
}

bool Value::as_bool() const {
  if (const auto* v = std::get_if<bool>(&payload_)) return *v;
  throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not a boolean");
}

const std::string& Value::as_string() const {
  if (const auto* v = std::get_if<std::string>(&payload_)) return *v;
  throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not a string");
}

const Symbol& Value::as_symbol() const {
  if (const auto* v = std::get_if<Symbol>(&payload_)) return *v;
  throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not a symbol");
}

double Value::as_real() const {
  const auto* v = std::get_if<std::vector<double>>(&payload_);
  if (v == nullptr || v->size() != 1) {
    throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not a continuous scalar");
  }
  return v->front();
}

std::span<const double> Value::as_vector() const {
  if (const auto* v = std::get_if<std::vector<double>>(&payload_)) return *v;
  throw Error(ErrorCode::TagMismatch, "value " + describe() + " is not continuous");
}

std::string Value::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::vector<double>>) {
          if (v.size() == 1) {
            os << v.front();
          } else {
            os << "[";
            for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
            os << "]";
          }
        } else if constexpr (std::is_same_v<T, bool>) {
          os << (v ? "true" : "false");
        } else if constexpr (std::is_same_v<T, Symbol>) {
          os << ":" << v.name();
        } else if constexpr (std::is_same_v<T, std::string>) {
          os << '"' << v << '"';
        } else {
          os << v;
        }
      },
      payload_);
  return os.str();
}

Trace::Trace(std::initializer_list<std::pair<const Address, Value>> entries) {
  for (const auto& [a, v] : entries) insert(a, v);
}

void Trace::insert(const Address& address, Value value) {
  auto [it, inserted] = entries_.try_emplace(address, std::move(value));
  if (!inserted) throw Error(ErrorCode::DuplicateAddress, address.to_text());
}

void Trace::assign(const Address& address, Value value) { entries_.insert_or_assign(address, std::move(value)); }

bool Trace::erase(const Address& address) { return entries_.erase(address) != 0; }

const Value& Trace::at(const Address& address) const {
  auto it = entries_.find(address);
  if (it == entries_.end()) throw Error(ErrorCode::ReadMissing, address.to_text());
  return it->second;
}

const Value* Trace::find(const Address& address) const {
  auto it = entries_.find(address);
  return it == entries_.end() ? nullptr : &it->second;
}

std::set<Address> Trace::keys() const {
  std::set<Address> out;
  for (const auto& [a, v] : entries_) out.insert(out.end(), a);
  return out;
}

std::vector<std::pair<Address, Value>> Trace::under(const Address& prefix) const {
  std::vector<std::pair<Address, Value>> out;
  for (auto it = entries_.lower_bound(prefix); it != entries_.end() && it->first.has_prefix(prefix); ++it) {
    out.emplace_back(it->first, it->second);
  }
  return out;
}

Trace Trace::subtrace(const Address& prefix) const {
  Trace out;
  for (const auto& [a, v] : under(prefix)) {
    if (a.size() > prefix.size()) out.insert(a.strip_prefix(prefix), v);
  }
  return out;
}

std::size_t Trace::continuous_dimension() const {
  std::size_t d = 0;
  for (const auto& [a, v] : entries_) d += v.dimension();
  return d;
}

Trace merge(const Trace& a, const Trace& b) {
  Trace out = a;
  for (const auto& [k, v] : b) {
    if (a.contains(k)) throw Error(ErrorCode::OverlappingKeys, k.to_text());
    out.insert(k, v);
  }
  return out;
}

Trace restrict(const Trace& a, const std::set<Address>& keys) {
  Trace out;
  for (const auto& [k, v] : a) {
    if (keys.count(k)) out.insert(k, v);
  }
  return out;
}

Trace without(const Trace& a, const std::set<Address>& keys) {
  Trace out;
  for (const auto& [k, v] : a) {
    if (!keys.count(k)) out.insert(k, v);
  }
  return out;
}

namespace {

bool values_close(const Value& a, const Value& b, double tol) {
  if (a.tag() != b.tag()) return false;
  if (a.is_discrete()) return a == b;
  const auto va = a.as_vector();
  const auto vb = b.as_vector();
  if (va.size() != vb.size()) return false;
  for (std::size_t i = 0; i < va.size(); ++i) {
    if (!(std::abs(va[i] - vb[i]) <= tol)) return false;
  }
  return true;
}

}  // namespace

bool trace_equal(const Trace& a, const Trace& b, double tol) {
  if (tol < 0) throw Error(ErrorCode::InvalidArgument, "tolerance must be nonnegative");
  if (a.size() != b.size()) return false;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib) {
    if (!(ia->first == ib->first)) return false;
    if (!values_close(ia->second, ib->second, tol)) return false;
  }
  return true;
}

std::vector<Address> trace_differences(const Trace& a, const Trace& b, double tol) {
  std::vector<Address> out;
  for (const auto& [k, v] : a) {
    const Value* other = b.find(k);
    if (other == nullptr || !values_close(v, *other, tol)) out.push_back(k);
  }
  for (const auto& [k, v] : b) {
    if (!a.contains(k)) out.push_back(k);
  }
  return out;
}

}  // namespace imcmc
