// Copyright 2026 The vqerl Authors.
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqerl/training.hpp"

namespace vqerl {

enum class ReferenceMode { Exact, LowerBound, Explicit };

/// Everything needed to reproduce a multi-seed run. Parsed from one JSON
/// document; `to_json` echoes every field with its resolved default.
struct RunConfig {
  std::string hamiltonian_path;
  ReferenceMode reference_mode = ReferenceMode::Exact;
  double reference_value = 0.0;                   // Explicit mode only
  std::optional<double> accuracy_reference;       // default: exact energy when feasible
  double chemical_accuracy = kChemicalAccuracy;
  std::optional<std::string> curriculum_profile = "exact-reference";
  double fixed_threshold = kChemicalAccuracy;     // used when no profile is set
  double threshold_floor = kChemicalAccuracy;
  std::size_t max_slots = 6;
  bool shift_energy_feature = true;
  OptimizerConfig optimizer;
  AgentConfig agent;
  int trials = 10;
  int episodes = 5000;
  std::vector<std::uint64_t> seeds;  // empty: seed, seed + 1, ...
  std::uint64_t seed = 1;
  std::string output_dir;            // empty: no files
  int threads = 0;                   // 0: hardware concurrency
  bool stop_on_success = false;

  std::vector<std::uint64_t> resolved_seeds() const {
    if (!seeds.empty()) return seeds;
    std::vector<std::uint64_t> out;
    for (int i = 0; i < trials; ++i) out.push_back(seed + static_cast<std::uint64_t>(i));
    return out;
  }
};

inline std::string to_string(ReferenceMode m) {
  switch (m) {
    case ReferenceMode::Exact: return "exact";
    case ReferenceMode::LowerBound: return "lower-bound";
    case ReferenceMode::Explicit: return "explicit";
  }
  return "?";
}

inline ReferenceMode reference_mode_from_string(const std::string& s) {
  if (s == "exact") return ReferenceMode::Exact;
  if (s == "lower-bound") return ReferenceMode::LowerBound;
  if (s == "explicit") return ReferenceMode::Explicit;
  throw std::invalid_argument("unknown reference mode '" + s + "'");
}

inline nlohmann::json optimizer_to_json(const OptimizerConfig& o) {
  return {{"method", to_string(o.kind)},
          {"strategy", to_string(o.strategy)},
          {"local_window", o.local_window},
          {"rotosolve_local_iterations", o.rotosolve_local_iterations},
          {"rotosolve_global_iterations", o.rotosolve_global_iterations},
          {"cobyla_local_iterations", o.cobyla_local_iterations},
          {"cobyla_global_iterations", o.cobyla_global_iterations},
          {"cobyla_rho_begin", o.cobyla.rho_begin},
          {"cobyla_rho_end", o.cobyla.rho_end}};
}

inline OptimizerConfig optimizer_from_json(const nlohmann::json& j) {
  OptimizerConfig o;
  o.kind = optimizer_kind_from_string(j.value("method", to_string(o.kind)));
  o.strategy = strategy_from_string(j.value("strategy", to_string(o.strategy)));
  o.local_window = j.value("local_window", o.local_window);
  o.rotosolve_local_iterations = j.value("rotosolve_local_iterations", o.rotosolve_local_iterations);
  o.rotosolve_global_iterations =
      j.value("rotosolve_global_iterations", o.rotosolve_global_iterations);
  o.cobyla_local_iterations = j.value("cobyla_local_iterations", o.cobyla_local_iterations);
  o.cobyla_global_iterations = j.value("cobyla_global_iterations", o.cobyla_global_iterations);
  o.cobyla.rho_begin = j.value("cobyla_rho_begin", o.cobyla.rho_begin);
  o.cobyla.rho_end = j.value("cobyla_rho_end", o.cobyla.rho_end);
  if (o.local_window < 1 || o.budget() < 1)
    throw std::invalid_argument("optimizer window and iteration budgets must be >= 1");
  return o;
}

inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json curriculum = {{"floor", c.threshold_floor}};
  if (c.curriculum_profile)
    curriculum["profile"] = *c.curriculum_profile;
  else
    curriculum["fixed_threshold"] = c.fixed_threshold;
  nlohmann::json reference = {{"mode", to_string(c.reference_mode)}};
  if (c.reference_mode == ReferenceMode::Explicit) reference["value"] = c.reference_value;
  const nlohmann::json agent = c.agent;
  return {{"hamiltonian", c.hamiltonian_path},
          {"reference", reference},
          {"accuracy_reference",
           c.accuracy_reference ? nlohmann::json(*c.accuracy_reference) : nlohmann::json()},
          {"chemical_accuracy", c.chemical_accuracy},
          {"curriculum", curriculum},
          {"environment", {{"max_slots", c.max_slots}, {"shift_energy_feature", c.shift_energy_feature}}},
          {"optimizer", optimizer_to_json(c.optimizer)},
          {"agent", agent},
          {"trials", c.trials},
          {"episodes", c.episodes},
          {"seeds", c.resolved_seeds()},
          {"seed", c.seed},
          {"output_dir", c.output_dir},
          {"threads", c.threads},
          {"stop_on_success", c.stop_on_success}};
}

/// Relative Hamiltonian paths resolve against `base_dir` (the config's folder).
inline RunConfig run_config_from_json(const nlohmann::json& j,
                                      const std::filesystem::path& base_dir = {}) {
  RunConfig c;
  std::filesystem::path ham = j.at("hamiltonian").get<std::string>();
  if (ham.is_relative() && !base_dir.empty()) ham = base_dir / ham;
  c.hamiltonian_path = ham.string();
  if (j.contains("reference")) {
    const auto& r = j.at("reference");
    c.reference_mode = reference_mode_from_string(r.value("mode", "exact"));
    if (c.reference_mode == ReferenceMode::Explicit) c.reference_value = r.at("value").get<double>();
  }
  if (j.contains("accuracy_reference") && !j.at("accuracy_reference").is_null())
    c.accuracy_reference = j.at("accuracy_reference").get<double>();
  c.chemical_accuracy = j.value("chemical_accuracy", c.chemical_accuracy);
  if (j.contains("curriculum")) {
    const auto& cu = j.at("curriculum");
    if (cu.contains("profile")) {
      c.curriculum_profile = cu.at("profile").get<std::string>();
      make_profile(*c.curriculum_profile);  // validates the name
    } else if (cu.contains("fixed_threshold")) {
      c.curriculum_profile.reset();
      c.fixed_threshold = cu.at("fixed_threshold").get<double>();
      if (!(c.fixed_threshold > 0)) throw std::invalid_argument("fixed_threshold must be positive");
    }
    c.threshold_floor = cu.value("floor", c.threshold_floor);
  }
  if (j.contains("environment")) {
    const auto& e = j.at("environment");
    c.max_slots = e.value("max_slots", c.max_slots);
    c.shift_energy_feature = e.value("shift_energy_feature", c.shift_energy_feature);
  }
  if (j.contains("optimizer")) c.optimizer = optimizer_from_json(j.at("optimizer"));
  if (j.contains("agent")) c.agent = j.at("agent").get<AgentConfig>();
  c.trials = j.value("trials", c.trials);
  c.episodes = j.value("episodes", c.episodes);
  c.seeds = j.value("seeds", c.seeds);
  c.seed = j.value("seed", c.seed);
  c.output_dir = j.value("output_dir", c.output_dir);
  c.threads = j.value("threads", c.threads);
  c.stop_on_success = j.value("stop_on_success", c.stop_on_success);
  if (c.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (c.episodes < 0) throw std::invalid_argument("episodes must be >= 0");
  if (c.max_slots < 1) throw std::invalid_argument("max_slots must be >= 1");
  if (!c.seeds.empty() && static_cast<int>(c.seeds.size()) != c.trials)
    throw std::invalid_argument("seed list length must equal the trial count");
  return c;
}

inline RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config file not found: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("malformed config " + path + ": " + e.what());
  }
  return run_config_from_json(j, std::filesystem::path(path).parent_path());
}

/// Averages and minima over successful trials only; absent when none succeed.
struct Aggregate {
  int trials = 0;
  int successes = 0;
  std::optional<double> avg_min_depth;
  std::optional<int> min_min_depth;
  std::optional<double> avg_min_gate_count;
  std::optional<int> min_min_gate_count;

  std::string success_text() const {
    return std::to_string(successes) + " out of " + std::to_string(trials) + " trials";
  }
};

inline Aggregate aggregate(const std::vector<TrialSummary>& summaries) {
  Aggregate a;
  a.trials = static_cast<int>(summaries.size());
  double sum_depth = 0, sum_gates = 0;
  for (const auto& s : summaries) {
    if (!s.success) continue;
    ++a.successes;
    sum_depth += *s.min_depth;
    sum_gates += *s.min_gate_count;
    a.min_min_depth = std::min(a.min_min_depth.value_or(*s.min_depth), *s.min_depth);
    a.min_min_gate_count =
        std::min(a.min_min_gate_count.value_or(*s.min_gate_count), *s.min_gate_count);
  }
  if (a.successes > 0) {
    a.avg_min_depth = sum_depth / a.successes;
    a.avg_min_gate_count = sum_gates / a.successes;
  }
  return a;
}

inline void to_json(nlohmann::json& j, const Aggregate& a) {
  auto opt = [](const auto& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  j = {{"trials", a.trials},
       {"successes", a.successes},
       {"success_text", a.success_text()},
       {"avg_min_depth", opt(a.avg_min_depth)},
       {"min_min_depth", opt(a.min_min_depth)},
       {"avg_min_gate_count", opt(a.avg_min_gate_count)},
       {"min_min_gate_count", opt(a.min_min_gate_count)}};
}

struct ExperimentResult {
  std::vector<TrialSummary> trials;  // in seed order
  Aggregate aggregate;
  double reference_energy = 0.0;
  double accuracy_energy = 0.0;
};

/// Resolves E_ref and the accuracy reference for a Hamiltonian.
inline std::pair<double, double> resolve_references(const RunConfig& c, const PauliHamiltonian& h) {
  std::optional<double> exact;
  auto exact_energy = [&]() {
    if (!exact) exact = exact_ground_energy(h);
    return *exact;
  };
  double ref = 0.0;
  switch (c.reference_mode) {
    case ReferenceMode::Exact: ref = exact_energy(); break;
    case ReferenceMode::LowerBound: ref = lower_bound(h); break;
    case ReferenceMode::Explicit: ref = c.reference_value; break;
  }
  double acc = ref;
  if (c.accuracy_reference)
    acc = *c.accuracy_reference;
  else if (h.num_qubits() <= kDenseQubitLimit)
    acc = exact_energy();
  return {ref, acc};
}

inline TrialConfig make_trial_config(const RunConfig& c,
                                     std::shared_ptr<const PauliHamiltonian> h,
                                     double reference, double accuracy, std::uint64_t seed) {
  TrialConfig t;
  t.hamiltonian = std::move(h);
  t.max_slots = c.max_slots;
  t.reference_energy = reference;
  t.accuracy_reference = accuracy;
  t.chemical_accuracy = c.chemical_accuracy;
  t.optimizer = c.optimizer;
  t.shift_energy_feature = c.shift_energy_feature;
  t.agent = c.agent;
  if (c.curriculum_profile) t.curriculum = make_profile(*c.curriculum_profile);
  t.fixed_threshold = c.fixed_threshold;
  t.threshold_floor = c.threshold_floor;
  t.episodes = c.episodes;
  t.seed = seed;
  t.stop_on_success = c.stop_on_success;
  return t;
}

/// Runs one isolated trial per seed on a pool of worker threads, writing
/// `trial_<seed>.jsonl` logs, the echoed config and `summary.json` when an
/// output directory is set.
inline ExperimentResult run_experiment(const RunConfig& cfg) {
  if (!std::filesystem::exists(cfg.hamiltonian_path))
    throw std::runtime_error("Hamiltonian file not found: " + cfg.hamiltonian_path);
  auto h = std::make_shared<const PauliHamiltonian>(load_hamiltonian(cfg.hamiltonian_path));
  const auto [reference, accuracy] = resolve_references(cfg, *h);
  const auto seeds = cfg.resolved_seeds();

  std::filesystem::path out_dir;
  if (!cfg.output_dir.empty()) {
    out_dir = cfg.output_dir;
    std::filesystem::create_directories(out_dir);
    std::ofstream(out_dir / "config.json") << std::setw(2) << to_json(cfg) << '\n';
  }

  ExperimentResult result;
  result.reference_energy = reference;
  result.accuracy_energy = accuracy;
  result.trials.resize(seeds.size());
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < seeds.size();) {
      try {
        const TrialConfig tc = make_trial_config(cfg, h, reference, accuracy, seeds[i]);
        std::ofstream log;
        if (!out_dir.empty())
          log.open(out_dir / ("trial_" + std::to_string(seeds[i]) + ".jsonl"));
        auto cb = [&](const EpisodeLog& e) {
          if (log) log << nlohmann::json(e).dump() << '\n';
        };
        TrialResult r = run_trial(tc, cb, false);
        result.trials[i] = r.summary;
        if (!out_dir.empty())
          std::ofstream(out_dir / ("agent_" + std::to_string(seeds[i]) + ".json"))
              << r.checkpoint.dump() << '\n';
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };

  int threads = cfg.threads > 0 ? cfg.threads : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, static_cast<int>(seeds.size()));
  std::vector<std::jthread> pool;
  for (int k = 0; k < threads; ++k) pool.emplace_back(worker);
  pool.clear();  // joins
  if (error) std::rethrow_exception(error);

  result.aggregate = aggregate(result.trials);
  if (!out_dir.empty()) {
    nlohmann::json s = {{"reference_energy", reference},
                        {"accuracy_energy", accuracy},
                        {"trials", result.trials},
                        {"aggregate", result.aggregate}};
    std::ofstream(out_dir / "summary.json") << std::setw(2) << s << '\n';
  }
  return result;
}

inline std::vector<EpisodeLog> read_episode_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open log: " + path);
  std::vector<EpisodeLog> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<EpisodeLog>());
    } catch (const std::exception& e) {
      throw std::runtime_error("malformed log " + path + " line " + std::to_string(line_no) +
                               ": " + e.what());
    }
  }
  return out;
}

inline const char* kPlotColumns =
    "episode,final_error,threshold,amortization,shifts,final_energy,threshold_energy,"
    "reference_energy,test_final_energy,test_error";

/// One CSV row per episode, columns as in kPlotColumns. final_error is the
/// training episode's final energy minus E_ref; threshold_energy = E_ref + xi.
inline std::string plot_csv(const std::vector<EpisodeLog>& logs) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  out << kPlotColumns << '\n';
  for (const auto& e : logs) {
    out << e.episode << ',' << (e.train_final_energy - e.reference_energy) << ','
        << e.threshold << ',' << e.amortization << ',' << e.shifts << ','
        << e.train_final_energy << ',' << (e.reference_energy + e.threshold) << ','
        << e.reference_energy << ',' << e.test_final_energy << ','
        << (e.test_final_energy - e.reference_energy) << '\n';
  }
  return out.str();
}

/// Converts every `trial_*.jsonl` in `log_dir` (or a single log file) into a
/// CSV in `out_dir`. Returns the written paths.
inline std::vector<std::string> export_plot_data(const std::string& logs,
                                                 const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::vector<fs::path> inputs;
  if (fs::is_directory(logs)) {
    for (const auto& entry : fs::directory_iterator(logs))
      if (entry.path().extension() == ".jsonl") inputs.push_back(entry.path());
    std::sort(inputs.begin(), inputs.end());
  } else if (fs::exists(logs)) {
    inputs.push_back(logs);
  } else {
    throw std::runtime_error("log path not found: " + logs);
  }
  if (inputs.empty()) throw std::runtime_error("no .jsonl logs in " + logs);
  fs::create_directories(out_dir);
  std::vector<std::string> written;
  for (const auto& in : inputs) {
    const auto csv = plot_csv(read_episode_log(in.string()));
    const fs::path target = fs::path(out_dir) / (in.stem().string() + ".csv");
    std::ofstream(target) << csv;
    written.push_back(target.string());
  }
  return written;
}

}  // namespace vqerl
