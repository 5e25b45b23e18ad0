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

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "imcmc/error.hpp"
#include "imcmc/oracle.hpp"
#include "imcmc/trace_json.hpp"
#include "registry.hpp"

using nlohmann::json;
using namespace imcmc;
using imcmc::cli::ConfigError;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;
constexpr int kInternal = 3;

// Every setting a subcommand may read. Defaults first, then the config
// file, then explicit flags.
struct Settings {
  std::string model = "toy";
  json model_params = json::object();
  std::vector<std::string> kernels;
  json kernel_params = json::object();
  long long iterations = 1000;
  long long burn_in = 0;
  long long thin = 1;
  std::uint64_t seed = 1;
  std::string check_mode = "off";
  std::string out;
  double tol = kDefaultEqualityTolerance;
  long long chains = 1;
  long long trials = 1000;
  double threshold = 0.02;
  std::string samples;
  std::string oracle = "toy";
  std::string address = "k";
};

template <class T>
void take(const json& cfg, const char* key, T& field) {
  if (!cfg.contains(key)) return;
  try {
    field = cfg.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

void load_config(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path + " is not valid JSON: " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  take(cfg, "model", s.model);
  take(cfg, "model_params", s.model_params);
  take(cfg, "kernels", s.kernels);
  if (cfg.contains("kernel")) {
    std::string k;
    take(cfg, "kernel", k);
    s.kernels = {k};
  }
  take(cfg, "kernel_params", s.kernel_params);
  take(cfg, "iterations", s.iterations);
  take(cfg, "burn_in", s.burn_in);
  take(cfg, "thin", s.thin);
  take(cfg, "seed", s.seed);
  take(cfg, "check_mode", s.check_mode);
  take(cfg, "out", s.out);
  take(cfg, "tol", s.tol);
  take(cfg, "chains", s.chains);
  take(cfg, "trials", s.trials);
  take(cfg, "threshold", s.threshold);
  take(cfg, "samples", s.samples);
  take(cfg, "oracle", s.oracle);
  take(cfg, "address", s.address);
}

void validate_common(const Settings& s) {
  if (s.iterations < 0) throw ConfigError("iterations must be >= 0");
  if (s.burn_in < 0) throw ConfigError("burn_in must be >= 0");
  if (s.thin < 1) throw ConfigError("thin must be >= 1");
  if (s.chains < 1) throw ConfigError("chains must be >= 1");
  if (s.trials < 0) throw ConfigError("trials must be >= 0");
  if (!(s.tol >= 0)) throw ConfigError("tol must be >= 0");
  if (!(s.threshold >= 0)) throw ConfigError("threshold must be >= 0");
}

CheckMode check_mode_of(const Settings& s) {
  try {
    return parse_check_mode(s.check_mode);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

std::vector<KernelSpec> kernels_of(const Settings& s, const cli::ModelEntry& m) {
  if (s.kernels.empty()) throw ConfigError("no kernels given");
  std::vector<KernelSpec> out;
  for (const auto& id : s.kernels) {
    auto k = cli::build_kernel(m, s.model, id, s.kernel_params);
    k.options.check_mode = check_mode_of(s);
    k.options.equality_tol = s.tol;
    out.push_back(std::move(k));
  }
  return out;
}

void emit(std::ostream& os, const json& record) { os << record.dump() << '\n' << std::flush; }

struct ChainOutcome {
  json summary;
  double wall_seconds = 0;
  std::string error;
  bool check_failed = false;
};

ChainOutcome run_one(const Settings& s, const cli::ModelEntry& m, const Cycle& cycle, RandomSource rng,
                     std::size_t chain_index, std::ostream& os) {
  ChainOutcome out;
  const auto burn = static_cast<std::size_t>(s.burn_in);
  const auto total = burn + static_cast<std::size_t>(s.iterations);
  const std::size_t nk = cycle.kernels().size();
  std::vector<std::size_t> accepted(nk, 0), proposed(nk, 0);
  std::size_t retained = 0;
  const Trace x0 = initialize(*m.model, m.observations, rng);
  auto sink = [&](std::size_t i, const Trace& x, const std::vector<StepDiagnostics>& diag) {
    for (std::size_t j = 0; j < diag.size(); ++j) {
      ++proposed[j];
      accepted[j] += diag[j].accepted ? 1 : 0;
    }
    if (i < burn || (i - burn) % static_cast<std::size_t>(s.thin) != 0) return;
    ++retained;
    json acc = json::array(), alpha = json::array(), jac = json::array();
    for (const auto& d : diag) {
      acc.push_back(d.accepted);
      alpha.push_back(d.alpha);
      jac.push_back(d.jacobian_size);
    }
    emit(os, {{"type", "sample"},
              {"chain", chain_index},
              {"iter", i - burn},
              {"trace", trace_to_json(x)},
              {"accepted", acc},
              {"alpha", alpha},
              {"jacobian_size", jac}});
  };
  auto log = [&](const json& rec) {
    json r = rec;
    r["type"] = "check_failure";
    r["chain"] = chain_index;
    emit(os, r);
  };
  const ChainSummary summary = chain(cycle, x0, total, rng, sink, log);
  json per_kernel = json::array();
  for (std::size_t j = 0; j < nk; ++j) {
    per_kernel.push_back({{"kernel", cycle.kernels()[j].name},
                          {"proposals", proposed[j]},
                          {"accepted", accepted[j]},
                          {"acceptance_rate", proposed[j] ? json(double(accepted[j]) / double(proposed[j])) : json()}});
  }
  std::size_t failures = 0;
  for (const auto& [name, count] : summary.check_failures) failures += count;
  out.summary = {{"type", "summary"},
                 {"chain", chain_index},
                 {"model", s.model},
                 {"kernels", s.kernels},
                 {"iterations", s.iterations},
                 {"burn_in", s.burn_in},
                 {"thin", s.thin},
                 {"seed", s.seed},
                 {"check_mode", s.check_mode},
                 {"retained", retained},
                 {"proposals", summary.proposals},
                 {"accepted", summary.accepted},
                 {"acceptance_rate", summary.acceptance_rate ? json(*summary.acceptance_rate) : json()},
                 {"per_kernel", per_kernel},
                 {"check_failures", summary.check_failures},
                 {"check_failure_count", failures},
                 {"final_state", trace_to_json(summary.final_state)}};
  out.wall_seconds = summary.wall_seconds;
  emit(os, out.summary);
  return out;
}

int cmd_run(const Settings& s) {
  validate_common(s);
  const auto m = cli::build_model(s.model, s.model_params);
  const Cycle cycle(kernels_of(s, m));
  const auto n = static_cast<std::size_t>(s.chains);
  RandomSource master(s.seed);
  std::vector<RandomSource> rngs;
  for (std::size_t c = 0; c < n; ++c) rngs.push_back(n == 1 ? master : master.split());

  std::vector<std::unique_ptr<std::ostream>> streams;
  std::vector<std::string> files;
  for (std::size_t c = 0; c < n; ++c) {
    if (s.out.empty()) {
      streams.push_back(std::make_unique<std::ostringstream>());
      continue;
    }
    files.push_back(n == 1 ? s.out : s.out + ".chain" + std::to_string(c));
    auto f = std::make_unique<std::ofstream>(files.back());
    if (!*f) throw ConfigError("cannot write " + files.back());
    streams.push_back(std::move(f));
  }
  // Single-chain stdout output streams directly instead of buffering.
  if (s.out.empty() && n == 1) streams[0] = std::make_unique<std::ostream>(std::cout.rdbuf());

  std::vector<ChainOutcome> outcomes(n);
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < n; ++c) {
    workers.emplace_back([&, c] {
      try {
        outcomes[c] = run_one(s, m, cycle, rngs[c], c, *streams[c]);
      } catch (const Error& e) {
        outcomes[c].error = e.what();
        outcomes[c].check_failed = e.code() == ErrorCode::CheckFailed;
      } catch (const std::exception& e) {
        outcomes[c].error = e.what();
      }
    });
  }
  for (auto& w : workers) w.join();

  if (s.out.empty() && n > 1) {
    for (auto& st : streams) std::cout << static_cast<std::ostringstream&>(*st).str();
  }
  if (!s.out.empty() && n > 1) {
    std::ofstream index(s.out);
    if (!index) throw ConfigError("cannot write " + s.out);
    json summaries = json::array();
    for (const auto& o : outcomes) summaries.push_back(o.summary);
    emit(index, {{"type", "index"}, {"chains", n}, {"files", files}, {"summaries", summaries}});
  }
  int status = kOk;
  for (std::size_t c = 0; c < n; ++c) {
    if (!outcomes[c].error.empty()) {
      std::cerr << "chain " << c << " failed: " << outcomes[c].error << "\n";
      // An assert-mode check failure is a finding about the kernel, not a
      // crash.
      status = std::max(status, outcomes[c].check_failed ? kFailed : kInternal);
    } else {
      std::cerr << "chain " << c << ": wall time " << outcomes[c].wall_seconds << " s\n";
    }
  }
  return status;
}

int cmd_check(const Settings& s) {
  validate_common(s);
  if (s.kernels.size() != 1) throw ConfigError("check takes exactly one kernel");
  const auto m = cli::build_model(s.model, s.model_params);
  auto k = kernels_of(s, m).front();
  if (s.trials == 0) std::cerr << "warning: trials = 0, nothing was checked\n";
  RandomSource rng(s.seed);
  const CheckTally t = check_many(k, static_cast<std::size_t>(s.trials), rng);
  auto line = [&](const char* name, std::size_t failures) {
    std::cout << name << ": " << (failures == 0 ? "pass" : "FAIL") << " (" << failures << "/" << t.trials
              << " trials failed)\n";
  };
  std::cout << "kernel " << k.name << ", " << t.trials << " trials, seed " << s.seed << "\n";
  line("support", t.support_failures);
  line("dimension", t.dimension_failures);
  line("involution", t.involution_failures);
  if (t.first_failure) {
    const auto& f = *t.first_failure;
    std::cout << "first failure: " << f.failed_check() << ": " << f.message;
    for (std::size_t i = 0; i < f.addresses.size(); ++i) {
      std::cout << (i ? ", " : " at ") << f.addresses[i].to_text();
      if (i < f.values.size()) std::cout << "=" << f.values[i];
    }
    std::cout << "\n";
  }
  std::cout << (t.all_passed() ? "all checks passed" : "checks failed") << "\n";
  return t.all_passed() ? kOk : kFailed;
}

int cmd_compare(const Settings& s) {
  validate_common(s);
  if (s.samples.empty()) throw ConfigError("compare needs --samples");
  const Address address = [&] {
    try {
      return Address::parse(s.address);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }();
  const auto expected = cli::oracle_marginal(s.oracle, address);
  std::ifstream in(s.samples);
  if (!in) throw ConfigError("cannot read samples " + s.samples);
  std::map<std::string, double> counts;
  std::size_t n = 0;
  std::string text;
  while (std::getline(in, text)) {
    if (text.empty()) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error&) {
      throw ConfigError("samples file has a malformed line");
    }
    if (rec.value("type", "") != "sample") continue;
    const auto& tr = rec.at("trace");
    const auto key = address.to_text();
    counts[tr.contains(key) ? tr.at(key).dump() : "null"] += 1;
    ++n;
  }
  if (n == 0) {
    std::cout << "no samples in " << s.samples << "; verdict FAIL\n";
    return kFailed;
  }
  std::vector<double> p, q;
  for (const auto& [value, prob] : expected) {
    p.push_back(prob);
    const auto it = counts.find(value);
    q.push_back(it == counts.end() ? 0.0 : it->second / double(n));
  }
  double outside = 0;
  for (const auto& [value, c] : counts) {
    if (!expected.count(value)) outside += c / double(n);
  }
  // Mass on values the oracle gives probability zero counts fully toward TV.
  double tv = 0;
  if (outside > 0) {
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    tv = 0.5 * (tv + outside);
  } else {
    tv = oracle::tv_distance(p, q);
  }
  std::cout.precision(6);
  std::cout << "address " << address.to_text() << ", " << n << " samples vs oracle " << s.oracle << "\n";
  std::size_t i = 0;
  for (const auto& [value, prob] : expected) {
    std::cout << "  " << value << ": empirical " << q[i++] << ", oracle " << prob << "\n";
  }
  if (outside > 0) std::cout << "  mass outside the oracle's support: " << outside << "\n";
  const bool pass = tv < s.threshold;
  std::cout << "tv " << tv << ", threshold " << s.threshold << ", verdict " << (pass ? "PASS" : "FAIL") << "\n";
  if (n < 1000) {
    std::cout << "note: undersampled, only " << n << " samples; Monte Carlo error alone may exceed the threshold\n";
  }
  return pass ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Involutive MCMC runner"};
  app.require_subcommand(1);
  std::string config, model, check_mode, out, samples, oracle_id, address;
  std::vector<std::string> kernels;
  long long iters = 0, burn = 0, thin = 1, chains = 1, trials = 0;
  std::uint64_t seed = 0;
  double tol = 0, threshold = 0;

  std::vector<std::pair<CLI::Option*, std::function<void(Settings&)>>> overrides;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON config file; flags override its fields");
    overrides.push_back({sub->add_option("--seed", seed, "random seed"), [&](Settings& s) { s.seed = seed; }});
    overrides.push_back({sub->add_option("--model", model, "model id"), [&](Settings& s) { s.model = model; }});
    overrides.push_back({sub->add_option("--tol", tol, "round-trip equality tolerance"),
                         [&](Settings& s) { s.tol = tol; }});
  };

  auto* run = app.add_subcommand("run", "run chains and write JSON-lines samples");
  common(run);
  overrides.push_back({run->add_option("--kernels", kernels, "kernel ids, applied in order as one cycle")->delimiter(','),
                       [&](Settings& s) { s.kernels = kernels; }});
  overrides.push_back({run->add_option("--iters", iters, "retained-phase iterations"),
                       [&](Settings& s) { s.iterations = iters; }});
  overrides.push_back({run->add_option("--burn-in", burn, "iterations discarded first"),
                       [&](Settings& s) { s.burn_in = burn; }});
  overrides.push_back({run->add_option("--thin", thin, "keep every n-th sample"), [&](Settings& s) { s.thin = thin; }});
  overrides.push_back({run->add_option("--check-mode", check_mode, "off, assert or reject"),
                       [&](Settings& s) { s.check_mode = check_mode; }});
  overrides.push_back({run->add_option("--out", out, "output path (default stdout)"), [&](Settings& s) { s.out = out; }});
  overrides.push_back({run->add_option("--chains", chains, "independent chains run in parallel"),
                       [&](Settings& s) { s.chains = chains; }});

  auto* chk = app.add_subcommand("check", "run prior-seeded dynamic checks on one kernel");
  common(chk);
  std::string kernel;
  overrides.push_back({chk->add_option("--kernel", kernel, "kernel id"), [&](Settings& s) { s.kernels = {kernel}; }});
  overrides.push_back({chk->add_option("--trials", trials, "number of test cases"),
                       [&](Settings& s) { s.trials = trials; }});

  auto* cmp = app.add_subcommand("compare", "compare a sample file against an oracle marginal");
  cmp->add_option("--config", config, "JSON config file; flags override its fields");
  overrides.push_back({cmp->add_option("--samples", samples, "JSON-lines file written by run"),
                       [&](Settings& s) { s.samples = samples; }});
  overrides.push_back({cmp->add_option("--oracle", oracle_id, "oracle id"), [&](Settings& s) { s.oracle = oracle_id; }});
  overrides.push_back({cmp->add_option("--address", address, "address whose marginal is compared"),
                       [&](Settings& s) { s.address = address; }});
  overrides.push_back({cmp->add_option("--threshold", threshold, "maximum total variation distance"),
                       [&](Settings& s) { s.threshold = threshold; }});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    Settings s;
    if (!config.empty()) load_config(config, s);
    for (auto& [opt, apply] : overrides) {
      if (opt->count() > 0) apply(s);
    }
    if (run->parsed()) return cmd_run(s);
    if (chk->parsed()) return cmd_check(s);
    return cmd_compare(s);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
}
