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
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "imcmc/autodiff.hpp"
#include "imcmc/runtime.hpp"
#include "imcmc/trace.hpp"

namespace imcmc {

enum class Handle { ModelIn, AuxIn, ModelOut, AuxOut };

std::string_view to_string(Handle h);

// One scalar coordinate of a continuous value.
struct SlotRef {
  Handle handle = Handle::ModelIn;
  Address address{Symbol("_")};
  std::size_t index = 0;

  friend bool operator==(const SlotRef&, const SlotRef&) = default;
  friend auto operator<=>(const SlotRef&, const SlotRef&) = default;

  std::string to_text() const;
};

// Read/write/copy bookkeeping of one transform run, at slot granularity.
// `reads` and `copies` are input slots, `writes` output slots. Coordinates
// that are determined by a simplex constraint appear in none of them.
struct RWRecord {
  std::set<SlotRef> reads;
  std::set<SlotRef> writes;
  std::set<SlotRef> copies;
  std::set<Address> discrete_reads;
  std::set<Address> discrete_writes;

  std::set<Address> read_addresses() const;
  std::set<Address> write_addresses() const;
  std::set<Address> copy_addresses() const;
};

// Builder for a vector-valued output whose coordinates are a mix of computed
// values and coordinate-wise copies of input vectors.
class VectorOut {
 public:
  explicit VectorOut(std::size_t n) : entries_(n) {}

  void set(std::size_t i, DiffScalar v);
  void copy(std::size_t i, Handle source, const Address& address, std::size_t source_index);

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  friend class TransformContext;
  struct Entry {
    std::optional<DiffScalar> value;
    std::optional<SlotRef> source;
  };
  std::vector<Entry> entries_;
};

struct TransformOptions {
  // false: treat every copy as a read plus a write and build the full
  // Jacobian. Only useful to test the sparsity reduction.
  bool eliminate_copies = true;
  // Carry unwritten model addresses over by re-executing the model on the
  // written addresses (requires `model`).
  bool implicit_copy = false;
  const GenerativeProgram* model = nullptr;
  // Keep the reduced matrix and its slot labels in the result.
  bool materialize = false;
};

class TransformContext;

class TransformProgram {
 public:
  using Body = std::function<void(TransformContext&)>;

  TransformProgram(std::string name, Body body) : name_(std::move(name)), body_(std::move(body)) {}

  const std::string& name() const noexcept { return name_; }
  void run(TransformContext& ctx) const { body_(ctx); }

 private:
  std::string name_;
  Body body_;
};

struct TransformResult {
  Trace model_out;  // x'
  Trace aux_out;    // y'
  double log_abs_det = 0;
  RWRecord record;
  std::size_t jacobian_size = 0;
  // Implicit-copy mode only: log p(x' ⊕ b) - log p(x ⊕ b) from the update.
  std::optional<double> model_log_ratio;
  std::vector<std::string> warnings;
  // With `materialize`.
  std::optional<JacobianMatrix> matrix;
  std::vector<SlotRef> row_slots;
  std::vector<SlotRef> column_slots;
};

// The effect interface a transform program runs against. Inputs are
// read-only, outputs write-only; continuous reads return DiffScalars seeded
// with one tangent coordinate per input slot.
class TransformContext {
 public:
  TransformContext(const Trace& x, const Trace& y, const Trace& b, const TransformOptions& options);
  ~TransformContext();
  TransformContext(const TransformContext&) = delete;
  TransformContext& operator=(const TransformContext&) = delete;

  bool has(Handle h, const Address& a) const;
  // Model addresses (observations excluded) or aux addresses under `prefix`.
  std::vector<Address> keys(Handle h, const Address& prefix) const;
  std::vector<Address> keys(Handle h) const;

  Value read_discrete(Handle h, const Address& a);
  std::int64_t read_int(Handle h, const Address& a) { return read_discrete(h, a).as_int(); }
  bool read_bool(Handle h, const Address& a) { return read_discrete(h, a).as_bool(); }
  DiffScalar read_real(Handle h, const Address& a);
  std::vector<DiffScalar> read_vector(Handle h, const Address& a);
  // A simplex value: coordinate `determined` is a function of the others,
  // so only the rest are independent slots. The returned determined
  // coordinate has the primal stored value and tangent -(sum of the others).
  std::vector<DiffScalar> read_simplex(Handle h, const Address& a, std::size_t determined);

  void write_discrete(Handle h, const Address& a, Value v);
  void write_real(Handle h, const Address& a, const DiffScalar& v);
  void write_vector(Handle h, const Address& a, const std::vector<DiffScalar>& v);
  void write_vector(Handle h, const Address& a, const VectorOut& v);
  void write_simplex(Handle h, const Address& a, const VectorOut& v, std::size_t determined);

  void copy(Handle src, const Address& from, Handle dst, const Address& to);
  // Copies every entry under `from` to the same relative address under `to`.
  // Returns the number of entries copied.
  std::size_t copy_namespace(Handle src, const Address& from, Handle dst, const Address& to);

  // Runs the bookkeeping after the program body has finished.
  TransformResult finish();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Executes `f` on (x, y) with observations `b`. See TransformOptions.
// Errors: DimensionMismatch, DuplicateWrite, ReadMissing, EffectViolation,
// SingularJacobian, TagMismatch, and InvalidDelta in implicit-copy mode.
TransformResult run_transform(const TransformProgram& f, const Trace& x, const Trace& y, const Trace& b,
                              const TransformOptions& options = {});

// Helper for kernels that reorder the coordinates of a simplex: writes
// out[i] = in[perm[i]], copying where both coordinates are free and setting
// otherwise. Returns nothing; the determined index is the same on both sides.
void permute_simplex(TransformContext& t, Handle src, const Address& from, Handle dst, const Address& to,
                     const std::vector<std::size_t>& perm, std::size_t determined);

}  // namespace imcmc
