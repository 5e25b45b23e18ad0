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

#include "imcmc/transform.hpp"

#include <cmath>

#include "imcmc/error.hpp"

namespace imcmc {

std::string_view to_string(Handle h) {
  switch (h) {
    case Handle::ModelIn: return "model_in";
    case Handle::AuxIn: return "aux_in";
    case Handle::ModelOut: return "model_out";
    case Handle::AuxOut: return "aux_out";
  }
  return "?";
}

std::string SlotRef::to_text() const {
  return std::string(imcmc::to_string(handle)) + "[" + address.to_text() + "]#" + std::to_string(index);
}

namespace {

std::set<Address> addresses_of(const std::set<SlotRef>& slots) {
  std::set<Address> out;
  for (const auto& s : slots) out.insert(s.address);
  return out;
}

bool is_input(Handle h) { return h == Handle::ModelIn || h == Handle::AuxIn; }

}  // namespace

std::set<Address> RWRecord::read_addresses() const { return addresses_of(reads); }
std::set<Address> RWRecord::write_addresses() const { return addresses_of(writes); }
std::set<Address> RWRecord::copy_addresses() const { return addresses_of(copies); }

void VectorOut::set(std::size_t i, DiffScalar v) {
  if (i >= entries_.size()) throw Error(ErrorCode::InvalidArgument, "vector coordinate out of range");
  entries_[i] = Entry{std::move(v), std::nullopt};
}

void VectorOut::copy(std::size_t i, Handle source, const Address& address, std::size_t source_index) {
  if (i >= entries_.size()) throw Error(ErrorCode::InvalidArgument, "vector coordinate out of range");
  entries_[i] = Entry{std::nullopt, SlotRef{source, address, source_index}};
}

struct TransformContext::Impl {
  enum class SlotKind { Written, Copied, Determined };

  struct InputRec {
    Handle handle;
    Address address;
    Value value;
    std::optional<std::size_t> determined;
    std::vector<std::optional<std::size_t>> tangent;
    std::vector<bool> read;
    std::vector<bool> copied;
  };

  struct OutputRec {
    Handle handle;
    Address address;
    std::optional<Value> discrete;
    std::vector<DiffScalar> values;
    std::vector<SlotKind> kind;
    std::vector<std::optional<SlotRef>> source;
    // Source of a whole-address copy, resolved against simplex structure at
    // the end of the run.
    std::optional<std::pair<Handle, Address>> whole_source;
  };

  using Key = std::pair<Handle, Address>;

  Impl(const Trace& x_, const Trace& y_, const Trace& b_, const TransformOptions& o)
      : x(x_), y(y_), b(b_), options(o) {}

  const Trace& x;
  const Trace& y;
  const Trace& b;
  TransformOptions options;
  std::map<Key, InputRec> inputs;
  std::map<Key, OutputRec> outputs;
  std::set<Address> discrete_reads;
  std::size_t next_tangent = 0;

  const Trace& input_trace(Handle h) const {
    if (h == Handle::ModelIn) return x;
    if (h == Handle::AuxIn) return y;
    throw Error(ErrorCode::EffectViolation, "cannot read output handle " + std::string(to_string(h)));
  }

  // nullptr means the address is an observation (constant).
  InputRec* input(Handle h, const Address& a) {
    const Trace& t = input_trace(h);
    auto it = inputs.find({h, a});
    if (it != inputs.end()) return &it->second;
    const Value* v = t.find(a);
    if (v == nullptr) {
      if (h == Handle::ModelIn && b.contains(a)) return nullptr;
      throw Error(ErrorCode::ReadMissing, std::string(to_string(h)) + "[" + a.to_text() + "]");
    }
    const std::size_t d = v->dimension();
    InputRec rec{h, a, *v, std::nullopt, std::vector<std::optional<std::size_t>>(d), std::vector<bool>(d, false),
                 std::vector<bool>(d, false)};
    return &inputs.emplace(Key{h, a}, std::move(rec)).first->second;
  }

  DiffScalar seed(InputRec& rec, std::size_t i) {
    if (!rec.tangent[i]) rec.tangent[i] = next_tangent++;
    return DiffScalar::variable(rec.value.as_vector()[i], *rec.tangent[i]);
  }

  OutputRec& new_output(Handle h, const Address& a) {
    if (is_input(h)) {
      throw Error(ErrorCode::EffectViolation, "cannot write input handle " + std::string(to_string(h)));
    }
    if (h == Handle::ModelOut && b.contains(a)) {
      throw Error(ErrorCode::EffectViolation, "cannot write observed address " + a.to_text());
    }
    auto [it, inserted] = outputs.try_emplace(Key{h, a}, OutputRec{h, a, {}, {}, {}, {}, {}});
    if (!inserted) throw Error(ErrorCode::DuplicateWrite, std::string(to_string(h)) + "[" + a.to_text() + "]");
    return it->second;
  }

  void mark_copied(InputRec& rec, std::size_t i) {
    if (rec.copied[i]) {
      throw Error(ErrorCode::EffectViolation,
                  "coordinate " + std::to_string(i) + " of " + rec.address.to_text() + " copied twice");
    }
    rec.copied[i] = true;
  }

  void write_entries(Handle h, const Address& a, const VectorOut& v, std::optional<std::size_t> determined,
                     const std::vector<VectorOut::Entry>& entries) {
    if (entries.empty()) throw Error(ErrorCode::InvalidArgument, "empty vector write to " + a.to_text());
    OutputRec& out = new_output(h, a);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& e = entries[i];
      if (e.source) {
        if (determined && *determined == i) {
          throw Error(ErrorCode::EffectViolation, "determined coordinate of " + a.to_text() + " must be set");
        }
        InputRec* src = input(e.source->handle, e.source->address);
        if (src == nullptr) throw Error(ErrorCode::EffectViolation, "cannot copy from an observation");
        if (src->value.is_discrete() || e.source->index >= src->value.dimension()) {
          throw Error(ErrorCode::TagMismatch, "bad coordinate copy from " + e.source->to_text());
        }
        mark_copied(*src, e.source->index);
        out.values.emplace_back(src->value.as_vector()[e.source->index]);
        out.kind.push_back(SlotKind::Copied);
        out.source.push_back(e.source);
      } else if (e.value) {
        out.values.push_back(*e.value);
        out.kind.push_back(determined && *determined == i ? SlotKind::Determined : SlotKind::Written);
        out.source.emplace_back();
      } else {
        throw Error(ErrorCode::InvalidArgument, "coordinate " + std::to_string(i) + " of " + a.to_text() + " unset");
      }
    }
    (void)v;
  }

  void whole_copy(Handle src, const Address& from, Handle dst, const Address& to) {
    InputRec* rec = input(src, from);
    if (rec == nullptr) throw Error(ErrorCode::EffectViolation, "cannot copy observation " + from.to_text());
    OutputRec& out = new_output(dst, to);
    if (rec->value.is_discrete()) {
      discrete_reads.insert(from);
      out.discrete = rec->value;
      return;
    }
    const auto vals = rec->value.as_vector();
    for (std::size_t i = 0; i < vals.size(); ++i) {
      mark_copied(*rec, i);
      out.values.emplace_back(vals[i]);
      out.kind.push_back(SlotKind::Copied);
      out.source.push_back(SlotRef{src, from, i});
    }
    out.whole_source = Key{src, from};
  }

  TransformResult finish();
};

TransformResult TransformContext::Impl::finish() {
  TransformResult result;

  auto materialize_outputs = [&](Handle h) {
    Trace t;
    for (const auto& [key, out] : outputs) {
      if (out.handle != h) continue;
      if (out.discrete) {
        t.insert(out.address, *out.discrete);
      } else {
        std::vector<double> primal;
        primal.reserve(out.values.size());
        for (const auto& v : out.values) primal.push_back(v.value());
        t.insert(out.address, Value::vector(std::move(primal)));
      }
    }
    return t;
  };

  if (options.implicit_copy) {
    if (options.model == nullptr) throw Error(ErrorCode::InvalidArgument, "implicit copy needs the model program");
    const Trace delta = materialize_outputs(Handle::ModelOut);
    UpdateResult up = naive_trace_update(*options.model, x, b, delta);
    for (const auto& [k, v] : up.trace) {
      if (!delta.contains(k)) whole_copy(Handle::ModelIn, k, Handle::ModelOut, k);
    }
    result.model_log_ratio = up.log_ratio;
    result.warnings = std::move(up.warnings);
  }

  // A whole-address copy of a simplex keeps the source's determined
  // coordinate determined on the output side.
  for (auto& [key, out] : outputs) {
    if (!out.whole_source) continue;
    InputRec& rec = inputs.at(*out.whole_source);
    if (rec.determined) {
      rec.copied[*rec.determined] = false;
      out.kind[*rec.determined] = SlotKind::Determined;
    }
  }

  // Non-finite outputs are reported before any Jacobian work.
  result.model_out = materialize_outputs(Handle::ModelOut);
  result.aux_out = materialize_outputs(Handle::AuxOut);

  std::set<SlotRef> reads;
  std::set<SlotRef> copies;
  for (auto& [key, rec] : inputs) {
    for (std::size_t i = 0; i < rec.read.size(); ++i) {
      const SlotRef s{rec.handle, rec.address, i};
      if (rec.determined && *rec.determined == i) {
        if (rec.copied[i]) {
          throw Error(ErrorCode::EffectViolation, "copy from determined coordinate " + s.to_text());
        }
        continue;
      }
      if (rec.read[i]) reads.insert(s);
      if (rec.copied[i]) copies.insert(s);
    }
  }
  std::set<SlotRef> writes;
  std::map<SlotRef, SlotRef> copy_columns;  // output slot -> input slot
  std::map<SlotRef, const DiffScalar*> written_values;
  for (const auto& [key, out] : outputs) {
    for (std::size_t i = 0; i < out.kind.size(); ++i) {
      const SlotRef s{out.handle, out.address, i};
      if (out.kind[i] == SlotKind::Written) {
        writes.insert(s);
        written_values[s] = &out.values[i];
      } else if (out.kind[i] == SlotKind::Copied) {
        copy_columns.emplace(s, *out.source[i]);
      }
    }
  }

  std::vector<SlotRef> rows;
  std::vector<SlotRef> cols(writes.begin(), writes.end());
  if (options.eliminate_copies) {
    for (const auto& s : reads) {
      if (!copies.count(s)) rows.push_back(s);
    }
  } else {
    std::set<SlotRef> all = reads;
    all.insert(copies.begin(), copies.end());
    rows.assign(all.begin(), all.end());
    std::set<SlotRef> all_cols = writes;
    for (const auto& [o, i] : copy_columns) all_cols.insert(o);
    cols.assign(all_cols.begin(), all_cols.end());
  }
  if (rows.size() != cols.size()) {
    throw Error(ErrorCode::DimensionMismatch, std::to_string(rows.size()) + " independent input slots but " +
                                                  std::to_string(cols.size()) + " written output slots");
  }

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const SlotRef& row = rows[static_cast<std::size_t>(r)];
    InputRec& rec = inputs.at(Key{row.handle, row.address});
    if (!rec.tangent[row.index]) rec.tangent[row.index] = next_tangent++;
    const std::size_t t = *rec.tangent[row.index];
    for (Eigen::Index c = 0; c < n; ++c) {
      const SlotRef& col = cols[static_cast<std::size_t>(c)];
      if (auto it = written_values.find(col); it != written_values.end()) {
        m(r, c) = it->second->d(t);
      } else {
        m(r, c) = copy_columns.at(col) == row ? 1.0 : 0.0;
      }
    }
  }
  result.log_abs_det = log_abs_det(m);
  if (result.log_abs_det == kNegInf) {
    throw Error(ErrorCode::SingularJacobian, std::to_string(n) + "x" + std::to_string(n) + " Jacobian is singular");
  }
  result.jacobian_size = rows.size();
  if (options.materialize) {
    result.matrix = JacobianMatrix{m};
    result.row_slots = rows;
    result.column_slots = cols;
  }

  result.record.reads = std::move(reads);
  result.record.writes = std::move(writes);
  result.record.copies = std::move(copies);
  result.record.discrete_reads = discrete_reads;
  for (const auto& [key, out] : outputs) {
    if (out.discrete) result.record.discrete_writes.insert(out.address);
  }
  return result;
}

TransformContext::TransformContext(const Trace& x, const Trace& y, const Trace& b, const TransformOptions& options)
    : impl_(std::make_unique<Impl>(x, y, b, options)) {
  for (const auto& [k, v] : y) {
    if (x.contains(k)) throw Error(ErrorCode::OverlappingKeys, "model and aux share " + k.to_text());
    if (b.contains(k)) throw Error(ErrorCode::OverlappingKeys, "aux and observations share " + k.to_text());
  }
  for (const auto& [k, v] : x) {
    if (b.contains(k)) throw Error(ErrorCode::OverlappingKeys, "model and observations share " + k.to_text());
  }
}

TransformContext::~TransformContext() = default;

bool TransformContext::has(Handle h, const Address& a) const {
  if (h == Handle::ModelIn && impl_->b.contains(a)) return true;
  return impl_->input_trace(h).contains(a);
}

std::vector<Address> TransformContext::keys(Handle h, const Address& prefix) const {
  std::vector<Address> out;
  for (const auto& [a, v] : impl_->input_trace(h).under(prefix)) out.push_back(a);
  return out;
}

std::vector<Address> TransformContext::keys(Handle h) const {
  std::vector<Address> out;
  for (const auto& [a, v] : impl_->input_trace(h)) out.push_back(a);
  return out;
}

Value TransformContext::read_discrete(Handle h, const Address& a) {
  if (h == Handle::ModelIn && impl_->b.contains(a)) {
    const Value& v = impl_->b.at(a);
    if (!v.is_discrete()) throw Error(ErrorCode::TagMismatch, a.to_text() + " is continuous");
    return v;
  }
  Impl::InputRec* rec = impl_->input(h, a);
  if (!rec->value.is_discrete()) throw Error(ErrorCode::TagMismatch, a.to_text() + " is continuous");
  impl_->discrete_reads.insert(a);
  return rec->value;
}

DiffScalar TransformContext::read_real(Handle h, const Address& a) {
  auto v = read_vector(h, a);
  if (v.size() != 1) throw Error(ErrorCode::TagMismatch, a.to_text() + " is not a scalar");
  return v.front();
}

std::vector<DiffScalar> TransformContext::read_vector(Handle h, const Address& a) {
  Impl::InputRec* rec = impl_->input(h, a);
  if (rec == nullptr) {
    const Value& v = impl_->b.at(a);
    if (!v.is_continuous()) throw Error(ErrorCode::TagMismatch, a.to_text() + " is discrete");
    const auto vals = v.as_vector();
    return std::vector<DiffScalar>(vals.begin(), vals.end());
  }
  if (!rec->value.is_continuous()) throw Error(ErrorCode::TagMismatch, a.to_text() + " is discrete");
  if (rec->determined) throw Error(ErrorCode::EffectViolation, a.to_text() + " was read as a simplex");
  std::vector<DiffScalar> out;
  for (std::size_t i = 0; i < rec->read.size(); ++i) {
    rec->read[i] = true;
    out.push_back(impl_->seed(*rec, i));
  }
  return out;
}

std::vector<DiffScalar> TransformContext::read_simplex(Handle h, const Address& a, std::size_t determined) {
  Impl::InputRec* rec = impl_->input(h, a);
  if (rec == nullptr) throw Error(ErrorCode::EffectViolation, "observation " + a.to_text() + " read as a simplex");
  if (!rec->value.is_continuous()) throw Error(ErrorCode::TagMismatch, a.to_text() + " is discrete");
  const std::size_t n = rec->value.dimension();
  if (determined >= n) throw Error(ErrorCode::InvalidArgument, "determined coordinate out of range");
  if ((rec->determined && *rec->determined != determined) || (!rec->determined && rec->read[determined])) {
    throw Error(ErrorCode::EffectViolation, a.to_text() + " read with conflicting simplex structure");
  }
  rec->determined = determined;
  std::vector<DiffScalar> out(n);
  DiffScalar free_sum;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == determined) continue;
    rec->read[i] = true;
    out[i] = impl_->seed(*rec, i);
    free_sum += out[i];
  }
  std::vector<double> t = free_sum.tangent();
  for (double& c : t) c = -c;
  out[determined] = DiffScalar::with_tangent(rec->value.as_vector()[determined], std::move(t));
  return out;
}

void TransformContext::write_discrete(Handle h, const Address& a, Value v) {
  if (!v.is_discrete()) throw Error(ErrorCode::TagMismatch, "write_discrete of continuous value at " + a.to_text());
  impl_->new_output(h, a).discrete = std::move(v);
}

void TransformContext::write_real(Handle h, const Address& a, const DiffScalar& v) {
  write_vector(h, a, std::vector<DiffScalar>{v});
}

void TransformContext::write_vector(Handle h, const Address& a, const std::vector<DiffScalar>& v) {
  VectorOut out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.set(i, v[i]);
  write_vector(h, a, out);
}

void TransformContext::write_vector(Handle h, const Address& a, const VectorOut& v) {
  impl_->write_entries(h, a, v, std::nullopt, v.entries_);
}

void TransformContext::write_simplex(Handle h, const Address& a, const VectorOut& v, std::size_t determined) {
  if (determined >= v.size()) throw Error(ErrorCode::InvalidArgument, "determined coordinate out of range");
  impl_->write_entries(h, a, v, determined, v.entries_);
}

void TransformContext::copy(Handle src, const Address& from, Handle dst, const Address& to) {
  impl_->whole_copy(src, from, dst, to);
}

std::size_t TransformContext::copy_namespace(Handle src, const Address& from, Handle dst, const Address& to) {
  const auto entries = impl_->input_trace(src).under(from);
  for (const auto& [a, v] : entries) {
    const Address target = a.size() == from.size() ? to : to / a.strip_prefix(from);
    impl_->whole_copy(src, a, dst, target);
  }
  return entries.size();
}

TransformResult TransformContext::finish() { return impl_->finish(); }

TransformResult run_transform(const TransformProgram& f, const Trace& x, const Trace& y, const Trace& b,
                              const TransformOptions& options) {
  TransformContext ctx(x, y, b, options);
  f.run(ctx);
  return ctx.finish();
}

void permute_simplex(TransformContext& t, Handle src, const Address& from, Handle dst, const Address& to,
                     const std::vector<std::size_t>& perm, std::size_t determined) {
  const auto in = t.read_simplex(src, from, determined);
  if (perm.size() != in.size()) throw Error(ErrorCode::InvalidArgument, "permutation length mismatch");
  VectorOut out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (i != determined && perm[i] != determined) {
      out.copy(i, src, from, perm[i]);
    } else {
      out.set(i, in[perm[i]]);
    }
  }
  t.write_simplex(dst, to, out, determined);
}

}  // namespace imcmc
