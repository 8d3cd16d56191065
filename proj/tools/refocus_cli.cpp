// Copyright 2026 The Refocus Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Reports go to stdout as JSON (or CSV with --csv),
// a human summary and timings go to stderr. Exit codes: 0 success, 1 domain
// failure, 2 usage.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "refocus/refocus.hpp"

namespace fs = std::filesystem;
using namespace refocus;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Json command_echo(int argc, char** argv) {
  Json args = Json::array();
  for (int i = 1; i < argc; ++i) args.push_back(argv[i]);
  return args;
}

void emit(const Json& report) { std::cout << dump_json(report, 2) << '\n'; }

std::string csv_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

fs::path resolve_cache_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("REFOCUS_CACHE_DIR"); env && *env) return env;
  return "._netcache";
}

Unitary load_target(const std::string& path) { return unitary_from_json(parse_json(read_file(path))); }

// --- refocus ----------------------------------------------------------------

struct RefocusOptions {
  int dim = 2;
  double epsilon = 1e-4;
  double eta = 0.25;
  std::string mode = "monitored";
  std::uint64_t seed = 0;
  std::string input;
  std::size_t haar = 0;
  std::string out;
  std::size_t max_rounds = 64;
  unsigned threads = 0;
  bool csv = false;
};

struct TrialResult {
  std::optional<ProtocolTrace> trace;
  double verified = -1.0;
  std::string sequence_file;
  std::string error;
};

TrialResult run_trial(const RefocusOptions& o, const Unitary& u, std::size_t index) {
  TrialResult r;
  const RngStream rng = RngStream(o.seed).substream(index);
  const ProtocolMode mode = protocol_mode_from_string(o.mode);
  if (o.dim == 2) {
    QubitProtocolConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.eta = o.eta;
    cfg.mode = mode;
    cfg.rng = rng;
    cfg.max_random_rounds = o.max_rounds;
    cfg.emit_sequence = !o.out.empty();
    r.trace = refocus_qubit(u, cfg);
  } else {
    require_special(u);
    QuditProtocolConfig cfg;
    cfg.epsilon = o.epsilon;
    cfg.eta = o.eta;
    cfg.mode = mode;
    cfg.rng = rng;
    cfg.max_rounds = o.max_rounds;
    cfg.emit_sequence = !o.out.empty();
    r.trace = refocus_qudit(u, cfg);
  }
  if (r.trace->sequence) {
    r.verified = verify(*r.trace->sequence, u);
    const fs::path file = fs::path(o.out) / ("sequence-" + std::to_string(index) + ".json");
    write_file(file.string(), serialize(*r.trace->sequence));
    r.sequence_file = file.string();
  }
  return r;
}

int cmd_refocus(const RefocusOptions& o, const Json& echo) {
  Stopwatch clock;
  if ((o.haar > 0) == !o.input.empty())
    throw CLI::ValidationError("refocus", "exactly one of --input and --haar is required");
  if (!o.out.empty()) fs::create_directories(o.out);

  std::vector<Unitary> targets;
  if (!o.input.empty()) {
    targets.push_back(load_target(o.input));
    if (targets.front().dim() != o.dim) throw DimensionMismatch(o.dim, targets.front().dim());
  } else {
    RngStream rng(o.seed, 0x7461726765);
    for (std::size_t i = 0; i < o.haar; ++i) targets.push_back(haar_unitary(o.dim, rng));
  }

  std::vector<TrialResult> results(targets.size());
  parallel_for(
      targets.size(),
      [&](std::size_t i) {
        try {
          results[i] = run_trial(o, targets[i], i);
        } catch (const DomainError& e) {
          results[i].error = e.what();
        }
      },
      o.threads == 0 ? default_thread_count() : o.threads);

  std::size_t successes = 0;
  double rounds_sum = 0.0;
  for (const auto& r : results)
    if (r.trace) {
      successes += r.trace->success;
      rounds_sum += static_cast<double>(r.trace->rounds.size());
    }
  const double n = static_cast<double>(results.size());
  const auto rate = binomial_estimate(successes, results.size());

  if (o.csv) {
    std::cout << "trial,success,status,rounds,random_rounds,initial_eps,final_eps,uses_of_U,verified\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      if (!r.trace) {
        std::cout << i << ",0,error,,,,,,\n";
        continue;
      }
      const auto& t = *r.trace;
      std::cout << i << ',' << t.success << ',' << t.status << ',' << t.rounds.size() << ','
                << t.random_rounds() << ',' << csv_number(t.initial_eps) << ','
                << csv_number(t.final_eps) << ',' << csv_number(t.uses_of_U()) << ','
                << (r.verified >= 0 ? csv_number(r.verified) : "") << '\n';
    }
  } else {
    Json report;
    report["command"] = "refocus";
    report["args"] = echo;
    Json cfg;
    cfg["dim"] = o.dim;
    cfg["epsilon"] = o.epsilon;
    cfg["eta"] = o.eta;
    cfg["mode"] = o.mode;
    cfg["seed"] = o.seed;
    cfg["max_rounds"] = o.max_rounds;
    if (o.dim == 2 && o.mode == "oblivious") cfg["k"] = qubit_k(o.epsilon, o.eta);
    report["config"] = std::move(cfg);
    Json trials = Json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      Json jt;
      jt["trial"] = i;
      if (r.trace) {
        jt["trace"] = trace_to_json(*r.trace, false, false);
        jt["verified_distance"] = r.verified >= 0 ? Json(r.verified) : Json(nullptr);
        jt["sequence_file"] = r.sequence_file.empty() ? Json(nullptr) : Json(r.sequence_file);
      } else {
        jt["error"] = r.error;
      }
      trials.push_back(std::move(jt));
    }
    report["trials"] = std::move(trials);
    Json agg;
    agg["trials"] = results.size();
    agg["successes"] = successes;
    agg["success_rate"] = rate.estimate;
    agg["ci99_halfwidth"] = rate.ci_halfwidth;
    agg["mean_rounds"] = n > 0 ? rounds_sum / n : 0.0;
    report["aggregate"] = std::move(agg);
    emit(report);
  }

  std::cerr << "refocus: " << successes << "/" << results.size() << " reached epsilon "
            << o.epsilon << " in " << clock.seconds() << " s\n";
  for (const auto& r : results) {
    if (!r.error.empty()) std::cerr << "refocus: " << r.error << '\n';
    else if (r.trace && !r.trace->sequence_note.empty() && !r.trace->success)
      std::cerr << "refocus: " << r.trace->sequence_note << '\n';
  }

  // A single target must succeed; a batch must meet the 1 − η guarantee.
  if (!o.input.empty()) return results.front().trace && results.front().trace->success ? kExitOk : kExitDomain;
  return rate.estimate >= 1.0 - o.eta ? kExitOk : kExitDomain;
}

// --- jumpprob ---------------------------------------------------------------

int cmd_jumpprob(std::size_t samples, std::uint64_t seed, bool csv, const Json& echo) {
  Stopwatch clock;
  RngStream rng(seed);
  const auto e = jump_probability_mc(samples, rng);
  if (csv) {
    std::cout << "samples,hits,estimate,ci99_halfwidth\n"
              << e.samples << ',' << e.hits << ',' << csv_number(e.estimate) << ','
              << csv_number(e.ci_halfwidth) << '\n';
  } else {
    Json report;
    report["command"] = "jumpprob";
    report["args"] = echo;
    report["seed"] = seed;
    report["samples"] = e.samples;
    report["hits"] = e.hits;
    report["estimate"] = e.estimate;
    report["ci99_halfwidth"] = e.ci_halfwidth;
    report["threshold"] = qubit_jump_threshold();
    emit(report);
  }
  std::cerr << "jumpprob: " << e.estimate << " +/- " << e.ci_halfwidth << " (99%) in "
            << clock.seconds() << " s\n";
  return kExitOk;
}

// --- verify -----------------------------------------------------------------

int cmd_verify(const std::string& sequence_path, const std::string& input, double epsilon,
               const Json& echo) {
  const PulseSequence seq = deserialize(read_file(sequence_path));
  const Unitary u = load_target(input);
  const double dist = verify(seq, u);
  Json report;
  report["command"] = "verify";
  report["args"] = echo;
  report["norm"] = std::string(to_string(seq.norm()));
  report["uses_of_U"] = seq.uses_of_U();
  report["distance"] = dist;
  report["epsilon"] = epsilon;
  report["verified"] = dist <= epsilon;
  emit(report);
  std::cerr << "verify: distance " << dist << (dist <= epsilon ? " <= " : " > ") << epsilon << '\n';
  return dist <= epsilon ? kExitOk : kExitDomain;
}

// --- constants --------------------------------------------------------------

int cmd_constants(int dim, double epsilon, double eta, const Json& echo) {
  Json report;
  report["command"] = "constants";
  report["args"] = echo;
  report["qudit"] = QuditConstants::for_dim(dim).to_json();
  if (epsilon > 0.0) report["qudit_cost"] = qudit_k(dim, epsilon, eta).to_json();
  if (dim == 2) {
    Json q;
    q["shrink_radius_hs"] = kQubitShrinkRadius;
    q["jump_threshold"] = qubit_jump_threshold();
    if (epsilon > 0.0 && epsilon < kQubitShrinkRadius) {
      const int k = qubit_k(epsilon, eta);
      q["k"] = k;
      q["uses_of_U"] = std::ldexp(1.0, 2 * k);
      q["pulse_bound"] = qubit_pulse_bound(epsilon, eta);
      q["shrink_steps"] = qubit_shrink_steps(epsilon);
    }
    report["qubit"] = std::move(q);
  }
  emit(report);
  return kExitOk;
}

// --- sk ---------------------------------------------------------------------

struct SkOptions {
  std::string gates = "std";
  std::string target;
  double eps = 1e-3;
  bool no_inverses = false;
  double radius = 0.1;
  int max_len = 40;
  int samples = 10000;
  std::uint64_t seed = 0;
  std::string cache_dir;
  bool no_cache = false;
  int max_depth = kDefaultSkMaxDepth;
  std::string mode = "qubit";
  double mu = 0.5;
  std::string out;
};

EpsilonNet obtain_net(const SkOptions& o, const GateSet& gs) {
  NetBuildParams p;
  p.target_radius = o.radius;
  p.max_len = o.max_len;
  p.samples = o.samples;
  p.seed = o.seed;
  return load_or_build_net(gs, p, o.no_cache ? fs::path{} : resolve_cache_dir(o.cache_dir));
}

int cmd_sk_net_build(const SkOptions& o, const Json& echo) {
  Stopwatch clock;
  const GateSet gs = gate_set_by_name(o.gates);
  const EpsilonNet net = obtain_net(o, gs);
  if (!o.out.empty()) save_net(net, o.out);
  Json report;
  report["command"] = "sk net build";
  report["args"] = echo;
  report["gates"] = o.gates;
  report["net"] = net.summary_json();
  // Fraction of the audit samples whose nearest W puts WU inside the qubit
  // shrinking region is 1 whenever the radius is at most √2/4.
  report["qubit_shrink_covered"] = gs.dim() == 2 && net.radius_estimate() <= kQubitShrinkRadius * std::numbers::sqrt2;
  emit(report);
  std::cerr << "sk net build: " << net.size() << " entries, L = " << net.achieved_len()
            << ", declared radius " << net.declared_radius() << " in " << clock.seconds() << " s\n";
  return kExitOk;
}

int cmd_sk_compile(const SkOptions& o, const Json& echo) {
  Stopwatch clock;
  const GateSet gs = gate_set_by_name(o.gates);
  const Unitary u = load_target(o.target);
  const EpsilonNet net = obtain_net(o, gs);
  Json report;
  report["command"] = "sk compile";
  report["args"] = echo;
  report["eps"] = o.eps;
  report["inverses"] = !o.no_inverses;
  double error = 0.0;
  std::size_t length = 0;
  if (o.no_inverses) {
    const auto r = inverse_free_compile(u, o.eps, gs, net, {}, o.max_depth);
    report["result"] = r.to_json(gs);
    error = r.error;
    length = r.word.length();
  } else {
    const auto r = sk_compile(u, o.eps, gs, net, true, o.max_depth);
    report["result"] = r.to_json(gs);
    error = r.error;
    length = r.word.length();
  }
  emit(report);
  std::cerr << "sk compile: length " << length << ", error " << error << " in " << clock.seconds()
            << " s\n";
  return error <= o.eps ? kExitOk : kExitDomain;
}

int cmd_sk_invert(const SkOptions& o, const Json& echo) {
  Stopwatch clock;
  const GateSet gs = gate_set_by_name(o.gates);
  const Unitary u = load_target(o.target);
  const EpsilonNet net = obtain_net(o, gs);
  InverseApproxConfig cfg;
  if (o.mode == "generic") cfg.mode = InverseMode::generic;
  else if (o.mode != "qubit") throw CLI::ValidationError("--mode", "expected qubit or generic");
  cfg.mu = o.mu;
  const auto r = inverse_approx(u, o.eps, net, gs, cfg);
  Json report;
  report["command"] = "sk invert";
  report["args"] = echo;
  report["eps"] = o.eps;
  report["mode"] = o.mode;
  report["result"] = r.to_json();
  emit(report);
  std::cerr << "sk invert: m = " << r.rounds << ", length " << r.word.length() << ", error "
            << r.error << " in " << clock.seconds() << " s\n";
  return r.error <= o.eps ? kExitOk : kExitDomain;
}

void add_net_options(CLI::App* cmd, SkOptions& o) {
  cmd->add_option("--gates", o.gates, "gate set: std = {H, T, X, Y, Z}, weyl2")->capture_default_str();
  cmd->add_option("--radius", o.radius, "net target radius (operator norm)")->capture_default_str();
  cmd->add_option("--max-len", o.max_len, "longest enumerated word")->capture_default_str();
  cmd->add_option("--samples", o.samples, "Haar samples per covering estimate")->capture_default_str();
  cmd->add_option("--seed", o.seed, "seed of the audit samples")->capture_default_str();
  cmd->add_option("--cache-dir", o.cache_dir, "net cache directory (default $REFOCUS_CACHE_DIR or ./._netcache)");
  cmd->add_flag("--no-cache", o.no_cache, "always rebuild the net");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal refocusing and inverse-free gate compilation"};
  app.require_subcommand(1);
  const Json echo = command_echo(argc, argv);

  RefocusOptions ro;
  auto* refocus_cmd = app.add_subcommand("refocus", "drive unknown unitaries back to the identity");
  refocus_cmd->add_option("--dim", ro.dim, "dimension d")->capture_default_str()->check(CLI::Range(2, kMaxDim));
  refocus_cmd->add_option("--epsilon", ro.epsilon, "target distance")->capture_default_str();
  refocus_cmd->add_option("--eta", ro.eta, "failure probability")->capture_default_str();
  refocus_cmd->add_option("--mode", ro.mode, "oblivious or monitored")
      ->capture_default_str()->check(CLI::IsMember({"oblivious", "monitored"}));
  refocus_cmd->add_option("--seed", ro.seed, "RNG seed")->capture_default_str();
  refocus_cmd->add_option("--input", ro.input, "target unitary (matrix JSON)");
  refocus_cmd->add_option("--haar", ro.haar, "number of Haar-random targets");
  refocus_cmd->add_option("--out", ro.out, "directory for pulse sequences");
  refocus_cmd->add_option("--max-rounds", ro.max_rounds, "monitored round cap")->capture_default_str();
  refocus_cmd->add_option("--threads", ro.threads, "worker threads (0 = all cores)");
  refocus_cmd->add_flag("--csv", ro.csv, "per-trial CSV table instead of JSON");

  std::size_t jp_samples = 1000000;
  std::uint64_t jp_seed = 0;
  bool jp_csv = false;
  auto* jump_cmd = app.add_subcommand("jumpprob", "Monte Carlo estimate of the qubit jump probability");
  jump_cmd->add_option("--samples", jp_samples, "sample count")->capture_default_str();
  jump_cmd->add_option("--seed", jp_seed, "RNG seed")->capture_default_str();
  jump_cmd->add_flag("--csv", jp_csv, "CSV instead of JSON");

  std::string v_seq, v_input;
  double v_eps = 1e-4;
  auto* verify_cmd = app.add_subcommand("verify", "distance of R1 U R2 U ... Rn U from the identity");
  verify_cmd->add_option("--sequence", v_seq, "pulse sequence file")->required();
  verify_cmd->add_option("--input", v_input, "unitary U (matrix JSON)")->required();
  verify_cmd->add_option("--epsilon", v_eps, "acceptance threshold")->capture_default_str();

  int c_dim = 2;
  double c_eps = 0.0, c_eta = 0.25;
  auto* const_cmd = app.add_subcommand("constants", "print the dimension-dependent constants");
  const_cmd->add_option("--dim", c_dim, "dimension d")->capture_default_str()->check(CLI::Range(2, kMaxDim));
  const_cmd->add_option("--epsilon", c_eps, "also report round counts for this epsilon");
  const_cmd->add_option("--eta", c_eta, "failure probability for round counts")->capture_default_str();

  SkOptions so;
  auto* sk_cmd = app.add_subcommand("sk", "Solovay-Kitaev compilation");
  sk_cmd->require_subcommand(1);
  auto* sk_compile_cmd = sk_cmd->add_subcommand("compile", "compile a target into a gate word");
  add_net_options(sk_compile_cmd, so);
  sk_compile_cmd->add_option("--target", so.target, "target unitary (matrix JSON)")->required();
  sk_compile_cmd->add_option("--eps", so.eps, "accuracy")->capture_default_str();
  sk_compile_cmd->add_flag("--no-inverses", so.no_inverses, "emit only forward gates");
  sk_compile_cmd->add_option("--max-depth", so.max_depth, "deepest recursion level")->capture_default_str();
  auto* sk_invert_cmd = sk_cmd->add_subcommand("invert", "approximate the inverse of a target");
  add_net_options(sk_invert_cmd, so);
  sk_invert_cmd->add_option("--target", so.target, "target unitary (matrix JSON)")->required();
  sk_invert_cmd->add_option("--eps", so.eps, "accuracy")->capture_default_str();
  sk_invert_cmd->add_option("--mode", so.mode, "qubit or generic contraction")->capture_default_str();
  sk_invert_cmd->add_option("--mu", so.mu, "generic mode net constant")->capture_default_str();
  auto* sk_net_cmd = sk_cmd->add_subcommand("net", "epsilon-net management");
  sk_net_cmd->require_subcommand(1);
  auto* sk_net_build_cmd = sk_net_cmd->add_subcommand("build", "build (or load) a net");
  add_net_options(sk_net_build_cmd, so);
  sk_net_build_cmd->add_option("--out", so.out, "also write the net to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*refocus_cmd) return cmd_refocus(ro, echo);
    if (*jump_cmd) return cmd_jumpprob(jp_samples, jp_seed, jp_csv, echo);
    if (*verify_cmd) return cmd_verify(v_seq, v_input, v_eps, echo);
    if (*const_cmd) return cmd_constants(c_dim, c_eps, c_eta, echo);
    if (*sk_compile_cmd) return cmd_sk_compile(so, echo);
    if (*sk_invert_cmd) return cmd_sk_invert(so, echo);
    if (*sk_net_build_cmd) return cmd_sk_net_build(so, echo);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}
