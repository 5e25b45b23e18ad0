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

#include "imcmc/address.hpp"

#include <cctype>
#include <charconv>

#include "imcmc/error.hpp"

namespace imcmc {

namespace {

bool is_identifier(std::string_view s) {
  if (s.empty()) return false;
  const auto first = static_cast<unsigned char>(s.front());
  if (!(std::isalpha(first) || s.front() == '_')) return false;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (!(std::isalnum(u) || c == '_')) return false;
  }
  return true;
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::ParseError, "bad integer component '" + std::string(s) + "'");
  }
  return out;
}

std::string escape_string(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\\' || c == '\'' || c == '/') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::OverlappingKeys: return "OverlappingKeys";
    case ErrorCode::TagMismatch: return "TagMismatch";
    case ErrorCode::DuplicateAddress: return "DuplicateAddress";
    case ErrorCode::InvalidDelta: return "InvalidDelta";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DuplicateWrite: return "DuplicateWrite";
    case ErrorCode::ReadMissing: return "ReadMissing";
    case ErrorCode::EffectViolation: return "EffectViolation";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::SingularJacobian: return "SingularJacobian";
    case ErrorCode::InvalidAcceptance: return "InvalidAcceptance";
    case ErrorCode::NotEnumerable: return "NotEnumerable";
    case ErrorCode::CheckFailed: return "CheckFailed";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Symbol::Symbol(std::string name) : name_(std::move(name)) {
  if (!is_identifier(name_)) {
    throw Error(ErrorCode::InvalidArgument, "symbol must be an identifier, got '" + name_ + "'");
  }
}

std::string Component::to_text() const {
  struct Visitor {
    std::string operator()(const Symbol& s) const { return s.name(); }
    std::string operator()(const std::string& s) const { return escape_string(s); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(const Indexed& t) const {
      return "(" + t.symbol.name() + "," + std::to_string(t.index) + ")";
    }
  };
  return std::visit(Visitor{}, value_);
}

Component Component::parse(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::ParseError, "empty address component");
  const char c = text.front();
  if (c == '\'') {
    if (text.size() < 2 || text.back() != '\'') {
      throw Error(ErrorCode::ParseError, "unterminated string component");
    }
    std::string out;
    for (std::size_t i = 1; i + 1 < text.size(); ++i) {
      if (text[i] == '\\' && i + 2 < text.size()) ++i;
      out.push_back(text[i]);
    }
    return Component(std::move(out));
  }
  if (c == '(') {
    if (text.back() != ')') throw Error(ErrorCode::ParseError, "unterminated tuple component");
    const auto comma = text.find(',');
    if (comma == std::string_view::npos) throw Error(ErrorCode::ParseError, "tuple without comma");
    return Component(Indexed{Symbol(std::string(text.substr(1, comma - 1))),
                             parse_int(text.substr(comma + 1, text.size() - comma - 2))});
  }
  if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return Component(parse_int(text));
  return Component(Symbol(std::string(text)));
}

std::strong_ordering operator<=>(const Component& a, const Component& b) {
  if (a.value_.index() != b.value_.index()) return a.value_.index() <=> b.value_.index();
  return std::visit(
      [&](const auto& lhs) -> std::strong_ordering {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.value_);
        if constexpr (std::is_same_v<T, std::string>) {
          const int r = lhs.compare(rhs);
          return r < 0 ? std::strong_ordering::less
                       : (r > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
        } else {
          return lhs <=> rhs;
        }
      },
      a.value_);
}

Address::Address(Component c) : components_{std::move(c)} {}

Address::Address(std::initializer_list<Component> components) : components_(components) {
  if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "address must be nonempty");
}

Address::Address(std::vector<Component> components) : components_(std::move(components)) {
  if (components_.empty()) throw Error(ErrorCode::InvalidArgument, "address must be nonempty");
}

bool Address::has_prefix(const Address& prefix) const {
  if (prefix.size() > size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (!(components_[i] == prefix.components_[i])) return false;
  }
  return true;
}

Address Address::strip_prefix(const Address& prefix) const {
  if (!has_prefix(prefix) || prefix.size() == size()) {
    throw Error(ErrorCode::InvalidArgument,
                "cannot strip " + prefix.to_text() + " from " + to_text());
  }
  return Address(std::vector<Component>(components_.begin() + static_cast<std::ptrdiff_t>(prefix.size()),
                                        components_.end()));
}

std::string Address::to_text() const {
  std::string out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i > 0) out.push_back('/');
    out += components_[i].to_text();
  }
  return out;
}

Address Address::parse(std::string_view text) {
  std::vector<Component> parts;
  std::string current;
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string && c == '\\' && i + 1 < text.size()) {
      current.push_back(c);
      current.push_back(text[++i]);
      continue;
    }
    if (c == '\'') in_string = !in_string;
    if (c == '/' && !in_string) {
      parts.push_back(Component::parse(current));
      current.clear();
      continue;
    }
    current.push_back(c);
  }
  parts.push_back(Component::parse(current));
  return Address(std::move(parts));
}

Address operator/(const Address& a, const Address& b) {
  std::vector<Component> out = a.components_;
  out.insert(out.end(), b.components_.begin(), b.components_.end());
  return Address(std::move(out));
}

std::strong_ordering operator<=>(const Address& a, const Address& b) {
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = a.components_[i] <=> b.components_[i]; c != 0) return c;
  }
  return a.size() <=> b.size();
}

}  // namespace imcmc

std::size_t std::hash<imcmc::Address>::operator()(const imcmc::Address& a) const noexcept {
  std::size_t seed = a.size();
  for (const auto& c : a.components()) {
    std::size_t h = std::visit(
        [](const auto& v) -> std::size_t {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, imcmc::Symbol>) {
            return std::hash<std::string>{}(v.name()) ^ 0x51ed27u;
          } else if constexpr (std::is_same_v<T, std::string>) {
            return std::hash<std::string>{}(v);
          } else if constexpr (std::is_same_v<T, std::int64_t>) {
            return std::hash<std::int64_t>{}(v);
          } else {
            return std::hash<std::string>{}(v.symbol.name()) * 31u + std::hash<std::int64_t>{}(v.index);
          }
        },
        c.value());
    seed ^= h + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
  }
  return seed;
}
