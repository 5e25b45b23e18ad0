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

#include "json.hpp"

#include "imcmc/trace.hpp"

namespace imcmc {

// Canonical JSON form of a trace: an object keyed by "/"-joined address text,
// each value {"tag":"d"|"c","v":...}. Symbols carry "kind":"symbol" so they
// stay distinct from strings. Continuous scalars are written as a bare
// number, vectors as arrays; doubles use the shortest round-trip decimal so
// the encoding is bit-exact.
nlohmann::json value_to_json(const Value& v);
Value value_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const Trace& t);
Trace trace_from_json(const nlohmann::json& j);

}  // namespace imcmc
