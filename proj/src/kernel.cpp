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

#include "imcmc/kernel.hpp"

#include <chrono>
#include <cmath>

#include "imcmc/error.hpp"

namespace imcmc {

std::string_view to_string(CheckMode m) {
  switch (m) {
    case CheckMode::Off: return "off";
    case CheckMode::Assert: return "assert";
    case CheckMode::RejectAndLog: return "reject";
  }
  return "?";
}

CheckMode parse_check_mode(std::string_view s) {
  if (s == "off") return CheckMode::Off;
  if (s == "assert") return CheckMode::Assert;
  if (s == "reject" || s == "reject_and_log") return CheckMode::RejectAndLog;
  throw Error(ErrorCode::InvalidArgument, "unknown check mode '" + std::string(s) + "' (known: off, assert, reject)");
}

double acceptance_probability(const LogTerms& t) {
  if (t.model_old == kNegInf || t.aux_old == kNegInf) {
    throw Error(ErrorCode::InvalidAcceptance, "current state or auxiliary trace has zero density");
  }
  if (t.model_new == kNegInf || t.aux_new == kNegInf) return 0.0;
  const double e = t.model_new - t.model_old + t.aux_new - t.aux_old + t.log_det;
  if (std::isnan(e)) throw Error(ErrorCode::InvalidAcceptance, "acceptance exponent is NaN");
  return e >= 0 ? 1.0 : std::exp(e);
}

std::string CheckReport::failed_check() const {
  if (!dimension_ok) return "dimension";
  if (!support_ok) return "support";
  if (!involution_ok) return "involution";
  return "";
}

namespace {

void note_differences(CheckReport& r, const char* stage, const Trace& expected, const Trace& actual, double tol) {
  for (const auto& a : trace_differences(expected, actual, tol)) {
    r.addresses.push_back(a);
    const Value* e = expected.find(a);
    const Value* g = actual.find(a);
    r.values.push_back(std::string(stage) + " " + (e ? e->describe() : "<absent>") + " -> " +
                       (g ? g->describe() : "<absent>"));
  }
}

Proposal propose_impl(const KernelSpec& spec, const Trace& x, const Trace& y, std::optional<double> aux_old,
                      bool checked) {
  const Trace& b = spec.observations;
  const GenerativeProgram& p = *spec.model;
  const GenerativeProgram& q = *spec.auxiliary;
  const Trace xb = merge(x, b);

  Proposal out;
  out.terms.model_old = score(p, xb);
  if (out.terms.model_old == kNegInf) {
    throw Error(ErrorCode::InvalidArgument, "current state has zero density under " + p.name());
  }
  out.terms.aux_old = aux_old ? *aux_old : score(q, y, xb);

  TransformOptions topt;
  topt.implicit_copy = spec.options.implicit_copy;
  topt.model = spec.model.get();

  if (!checked) {
    TransformResult t = run_transform(*spec.transform, x, y, b, topt);
    out.terms.log_det = t.log_abs_det;
    out.jacobian_size = t.jacobian_size;
    out.terms.model_new = t.model_log_ratio ? out.terms.model_old + *t.model_log_ratio : score(p, merge(t.model_out, b));
    out.terms.aux_new = out.terms.model_new == kNegInf ? kNegInf : score(q, t.aux_out, merge(t.model_out, b));
    out.model_out = std::move(t.model_out);
    out.aux_out = std::move(t.aux_out);
    out.alpha = acceptance_probability(out.terms);
    return out;
  }

  CheckReport report;
  std::optional<TransformResult> t;
  try {
    t = run_transform(*spec.transform, x, y, b, topt);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DimensionMismatch) {
      report.dimension_ok = false;
    } else {
      // The forward map did not land on a well-formed positive-density trace.
      report.support_ok = false;
    }
    report.message = e.what();
  } catch (const std::exception& e) {
    report.support_ok = false;
    report.message = e.what();
  }

  if (t) {
    out.terms.log_det = t->log_abs_det;
    out.jacobian_size = t->jacobian_size;
    try {
      out.terms.model_new =
          t->model_log_ratio ? out.terms.model_old + *t->model_log_ratio : score(p, merge(t->model_out, b));
      out.terms.aux_new = out.terms.model_new == kNegInf ? kNegInf : score(q, t->aux_out, merge(t->model_out, b));
    } catch (const std::exception& e) {
      out.terms.model_new = kNegInf;
      report.message = e.what();
    }
    if (out.terms.model_new == kNegInf || out.terms.aux_new == kNegInf) {
      report.support_ok = false;
      if (report.message.empty()) {
        report.message = out.terms.model_new == kNegInf ? "proposed model trace has zero density"
                                                        : "proposed auxiliary trace has zero density";
      }
      note_differences(report, "proposal", xb, merge(t->model_out, b), spec.options.equality_tol);
    }

    // Round trip runs even when the support check failed, so each check
    // reports independently.
    try {
      TransformResult back = run_transform(*spec.transform, t->model_out, t->aux_out, b, topt);
      report.log_det_roundtrip = t->log_abs_det + back.log_abs_det;
      const double tol = spec.options.equality_tol;
      if (!trace_equal(back.model_out, x, tol) || !trace_equal(back.aux_out, y, tol)) {
        report.involution_ok = false;
        if (report.message.empty()) report.message = "f(f(x, y)) differs from (x, y)";
        note_differences(report, "round trip", x, back.model_out, tol);
        note_differences(report, "round trip", y, back.aux_out, tol);
      }
    } catch (const std::exception& e) {
      report.involution_ok = false;
      if (report.message.empty()) report.message = std::string("second application failed: ") + e.what();
    }
    out.model_out = t->model_out;
    out.aux_out = t->aux_out;
  }

  out.alpha = report.ok() ? acceptance_probability(out.terms) : 0.0;
  out.check = std::move(report);
  return out;
}

std::pair<Trace, StepDiagnostics> step_impl(const KernelSpec& spec, const Trace& x, RandomSource& rng, bool checked,
                                            const CheckLog& log, std::size_t step_index) {
  ScoredTrace y = trace_and_score(*spec.auxiliary, rng, merge(x, spec.observations));
  Proposal p = propose_impl(spec, x, y.trace, y.log_density, checked);
  const double r = rng.uniform();

  StepDiagnostics d;
  d.alpha = p.alpha;
  d.terms = p.terms;
  d.jacobian_size = p.jacobian_size;
  d.check = p.check;
  if (p.check && !p.check->ok()) {
    if (log) {
      nlohmann::json rec;
      rec["step"] = step_index;
      rec["kernel"] = spec.name;
      rec["check"] = p.check->failed_check();
      rec["message"] = p.check->message;
      rec["addresses"] = nlohmann::json::array();
      for (const auto& a : p.check->addresses) rec["addresses"].push_back(a.to_text());
      rec["values"] = p.check->values;
      log(rec);
    }
    if (spec.options.check_mode == CheckMode::Assert) {
      throw Error(ErrorCode::CheckFailed, spec.name + ": " + p.check->failed_check() + " check: " + p.check->message);
    }
    return {x, d};
  }
  d.accepted = r <= p.alpha;
  return {d.accepted ? std::move(p.model_out) : x, d};
}

}  // namespace

Proposal propose(const KernelSpec& spec, const Trace& x, const Trace& y, bool checked) {
  return propose_impl(spec, x, y, std::nullopt, checked);
}

std::pair<Trace, StepDiagnostics> step(const KernelSpec& spec, const Trace& x, RandomSource& rng, const CheckLog& log,
                                       std::size_t step_index) {
  return step_impl(spec, x, rng, spec.options.check_mode != CheckMode::Off, log, step_index);
}

std::pair<Trace, StepDiagnostics> checked_step(const KernelSpec& spec, const Trace& x, RandomSource& rng,
                                               const CheckLog& log, std::size_t step_index) {
  return step_impl(spec, x, rng, true, log, step_index);
}

CheckReport check(const KernelSpec& spec, RandomSource& rng) {
  const auto obs_keys = spec.observations.keys();
  for (int attempt = 0; attempt < 1000; ++attempt) {
    ScoredTrace z = trace_and_score(*spec.model, rng);
    if (z.log_density == kNegInf || std::isnan(z.log_density)) continue;
    KernelSpec simulated = spec;
    simulated.observations = restrict(z.trace, obs_keys);
    const Trace x = without(z.trace, obs_keys);
    ScoredTrace y = trace_and_score(*spec.auxiliary, rng, merge(x, simulated.observations));
    return *propose_impl(simulated, x, y.trace, y.log_density, true).check;
  }
  throw Error(ErrorCode::InvalidArgument, "prior of " + spec.model->name() + " produced no positive-density trace");
}

CheckTally check_many(const KernelSpec& spec, std::size_t trials, RandomSource& rng) {
  CheckTally tally;
  for (std::size_t i = 0; i < trials; ++i) {
    CheckReport r = check(spec, rng);
    ++tally.trials;
    tally.support_failures += r.support_ok ? 0 : 1;
    tally.dimension_failures += r.dimension_ok ? 0 : 1;
    tally.involution_failures += r.involution_ok ? 0 : 1;
    if (!r.ok()) {
      ++tally.failed_trials;
      if (!tally.first_failure) tally.first_failure = std::move(r);
    }
  }
  return tally;
}

Cycle::Cycle(std::vector<KernelSpec> kernels) : kernels_(std::move(kernels)) {
  for (const auto& k : kernels_) {
    if (!k.model || !k.auxiliary || !k.transform) {
      throw Error(ErrorCode::InvalidArgument, "kernel " + k.name + " is missing a program");
    }
    if (k.model != kernels_.front().model) {
      throw Error(ErrorCode::InvalidArgument, "kernel " + k.name + " targets a different model");
    }
    if (!(k.observations == kernels_.front().observations)) {
      throw Error(ErrorCode::InvalidArgument, "kernel " + k.name + " has different observations");
    }
  }
}

std::pair<Trace, std::vector<StepDiagnostics>> Cycle::step(const Trace& x, RandomSource& rng, const CheckLog& log,
                                                           std::size_t step_index) const {
  Trace cur = x;
  std::vector<StepDiagnostics> diags;
  diags.reserve(kernels_.size());
  for (const auto& k : kernels_) {
    auto [next, d] = imcmc::step(k, cur, rng, log, step_index);
    cur = std::move(next);
    diags.push_back(std::move(d));
  }
  return {std::move(cur), std::move(diags)};
}

ChainSummary chain(const Cycle& cycle, const Trace& x0, std::size_t n, RandomSource& rng, const SampleSink& sink,
                   const CheckLog& log) {
  const auto start = std::chrono::steady_clock::now();
  if (!cycle.kernels().empty()) {
    const auto& k = cycle.kernels().front();
    if (score(*k.model, merge(x0, k.observations)) == kNegInf) {
      throw Error(ErrorCode::InvalidArgument, "initial state has zero density");
    }
  }
  ChainSummary s;
  Trace x = x0;
  for (std::size_t i = 0; i < n; ++i) {
    auto [next, diags] = cycle.step(x, rng, log, i);
    x = std::move(next);
    for (const auto& d : diags) {
      ++s.proposals;
      s.accepted += d.accepted ? 1 : 0;
      if (d.check && !d.check->ok()) ++s.check_failures[d.check->failed_check()];
    }
    ++s.steps;
    if (sink) sink(i, x, diags);
  }
  if (s.proposals > 0) s.acceptance_rate = static_cast<double>(s.accepted) / static_cast<double>(s.proposals);
  s.final_state = std::move(x);
  s.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

}  // namespace imcmc
