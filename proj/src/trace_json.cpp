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

#include "imcmc/trace_json.hpp"

#include "imcmc/error.hpp"

namespace imcmc {

using nlohmann::json;

json value_to_json(const Value& v) {
  json out;
  out["tag"] = v.is_discrete() ? "d" : "c";
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, std::vector<double>>) {
          if (p.size() == 1) {
            out["v"] = p.front();
          } else {
            out["v"] = p;
          }
        } else if constexpr (std::is_same_v<T, Symbol>) {
          out["v"] = p.name();
          out["kind"] = "symbol";
        } else {
          out["v"] = p;
        }
      },
      v.payload());
  return out;
}

Value value_from_json(const json& j) {
  if (!j.is_object() || !j.contains("tag") || !j.contains("v")) {
    throw Error(ErrorCode::ParseError, "value must be an object with tag and v");
  }
  const std::string tag = j.at("tag").get<std::string>();
  const json& v = j.at("v");
  if (tag == "c") {
    if (v.is_number()) return Value::real(v.get<double>());
    if (v.is_array()) return Value::vector(v.get<std::vector<double>>());
    throw Error(ErrorCode::ParseError, "continuous value must be a number or array");
  }
  if (tag != "d") throw Error(ErrorCode::ParseError, "unknown tag '" + tag + "'");
  if (v.is_boolean()) return Value::boolean(v.get<bool>());
  if (v.is_number_integer()) return Value::integer(v.get<std::int64_t>());
  if (v.is_string()) {
    if (j.value("kind", "") == "symbol") return Value::symbol(Symbol(v.get<std::string>()));
    return Value::string(v.get<std::string>());
  }
  throw Error(ErrorCode::ParseError, "unsupported discrete payload " + v.dump());
}

json trace_to_json(const Trace& t) {
  json out = json::object();
  for (const auto& [a, v] : t) out[a.to_text()] = value_to_json(v);
  return out;
}

Trace trace_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "trace must be a JSON object");
  Trace out;
  for (const auto& [k, v] : j.items()) out.insert(Address::parse(k), value_from_json(v));
  return out;
}

}  // namespace imcmc
