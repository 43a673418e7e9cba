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
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqerl/agent.hpp"
#include "vqerl/curriculum.hpp"
#include "vqerl/environment.hpp"

namespace vqerl {

struct TrialConfig {
  std::shared_ptr<const PauliHamiltonian> hamiltonian;
  std::size_t max_slots = 6;
  double reference_energy = 0.0;  // E_ref in rewards and thresholds
  // Energy that chemical accuracy is judged against; defaults to reference_energy.
  std::optional<double> accuracy_reference;
  double chemical_accuracy = kChemicalAccuracy;
  OptimizerConfig optimizer;
  bool shift_energy_feature = true;
  AgentConfig agent;
  std::optional<CurriculumProfile> curriculum;  // none: fixed threshold
  double fixed_threshold = kChemicalAccuracy;
  double threshold_floor = kChemicalAccuracy;
  int episodes = 0;
  std::uint64_t seed = 0;
  bool stop_on_success = false;

  double accuracy_energy() const { return accuracy_reference.value_or(reference_energy); }
};

/// One training episode followed by its greedy test episode.
struct EpisodeLog {
  int episode = 0;
  double reference_energy = 0.0;
  double threshold = 0.0;     // xi used by this episode
  double amortization = 0.0;  // delta when the episode ran
  int shifts = 0;             // greedy shifts completed before the episode
  double epsilon = 0.0;       // at the start of the training episode
  double train_final_energy = 0.0;
  double train_return = 0.0;
  bool train_success = false;
  int train_steps = 0;
  double loss = -1.0;  // last minibatch loss, negative before warm-up
  double test_final_energy = 0.0;
  bool test_success = false;
  double accuracy_error = 0.0;  // test energy minus accuracy reference
  bool chemically_accurate = false;
  int depth = 0;
  int gate_count = 0;
  nlohmann::json circuit;  // test circuit
};

inline void to_json(nlohmann::json& j, const EpisodeLog& e) {
  j = {{"episode", e.episode},
       {"reference_energy", e.reference_energy},
       {"threshold", e.threshold},
       {"amortization", e.amortization},
       {"shifts", e.shifts},
       {"epsilon", e.epsilon},
       {"train_final_energy", e.train_final_energy},
       {"train_return", e.train_return},
       {"train_success", e.train_success},
       {"train_steps", e.train_steps},
       {"loss", e.loss},
       {"test_final_energy", e.test_final_energy},
       {"test_success", e.test_success},
       {"accuracy_error", e.accuracy_error},
       {"chemically_accurate", e.chemically_accurate},
       {"depth", e.depth},
       {"gate_count", e.gate_count},
       {"circuit", e.circuit}};
}

inline void from_json(const nlohmann::json& j, EpisodeLog& e) {
  e.episode = j.at("episode").get<int>();
  e.reference_energy = j.at("reference_energy").get<double>();
  e.threshold = j.at("threshold").get<double>();
  e.amortization = j.at("amortization").get<double>();
  e.shifts = j.at("shifts").get<int>();
  e.epsilon = j.at("epsilon").get<double>();
  e.train_final_energy = j.at("train_final_energy").get<double>();
  e.train_return = j.at("train_return").get<double>();
  e.train_success = j.at("train_success").get<bool>();
  e.train_steps = j.at("train_steps").get<int>();
  e.loss = j.at("loss").get<double>();
  e.test_final_energy = j.at("test_final_energy").get<double>();
  e.test_success = j.at("test_success").get<bool>();
  e.accuracy_error = j.at("accuracy_error").get<double>();
  e.chemically_accurate = j.at("chemically_accurate").get<bool>();
  e.depth = j.at("depth").get<int>();
  e.gate_count = j.at("gate_count").get<int>();
  e.circuit = j.value("circuit", nlohmann::json());
}

/// Metrics are set only when success is true.
struct TrialSummary {
  std::uint64_t seed = 0;
  bool success = false;
  std::optional<int> min_depth;
  std::optional<int> min_gate_count;
  double best_error = std::numeric_limits<double>::infinity();
  std::optional<int> first_success_episode;
  int episodes_run = 0;
};

inline void to_json(nlohmann::json& j, const TrialSummary& s) {
  auto opt = [](const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  j = {{"seed", s.seed},
       {"success", s.success},
       {"min_depth", opt(s.min_depth)},
       {"min_gate_count", opt(s.min_gate_count)},
       {"best_error", std::isfinite(s.best_error) ? nlohmann::json(s.best_error) : nlohmann::json()},
       {"first_success_episode", opt(s.first_success_episode)},
       {"episodes_run", s.episodes_run}};
}

inline void update_summary(TrialSummary& s, const EpisodeLog& e) {
  s.episodes_run = e.episode + 1;
  s.best_error = std::min(s.best_error, e.accuracy_error);
  if (!e.chemically_accurate) return;
  if (!s.success) s.first_success_episode = e.episode;
  s.success = true;
  s.min_depth = std::min(s.min_depth.value_or(e.depth), e.depth);
  s.min_gate_count = std::min(s.min_gate_count.value_or(e.gate_count), e.gate_count);
}

struct TrialResult {
  TrialSummary summary;
  std::vector<EpisodeLog> logs;
  nlohmann::json checkpoint;
};

using EpisodeCallback = std::function<void(const EpisodeLog&)>;

/// Alternates epsilon-greedy training episodes (n-step transitions into the
/// replay buffer, one minibatch update per step after warm-up, target sync
/// every `target_sync_period` actions) with greedy test episodes that are not
/// stored. Chemical accuracy is judged on the test circuits.
inline TrialResult run_trial(const TrialConfig& cfg, const EpisodeCallback& on_episode = {},
                             bool keep_logs = true) {
  EnvConfig env_cfg;
  env_cfg.hamiltonian = cfg.hamiltonian;
  env_cfg.max_slots = cfg.max_slots;
  env_cfg.reference_energy = cfg.reference_energy;
  env_cfg.optimizer = cfg.optimizer;
  env_cfg.shift_energy_feature = cfg.shift_energy_feature;

  std::optional<ThresholdController> controller;
  if (cfg.curriculum) controller.emplace(*cfg.curriculum, cfg.threshold_floor);
  env_cfg.threshold = controller ? controller->threshold() : cfg.fixed_threshold;

  VqeEnvironment env(env_cfg);
  DdqnAgent agent(static_cast<int>(env.observation_size()), env.num_actions(), cfg.agent,
                  cfg.seed);
  NStepAccumulator nstep(cfg.agent.n_step, cfg.agent.gamma);

  TrialResult result;
  result.summary.seed = cfg.seed;
  double xi = env_cfg.threshold;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    EpisodeLog log;
    log.episode = ep;
    log.reference_energy = cfg.reference_energy;
    log.threshold = xi;
    log.amortization = controller ? controller->amortization() : 0.0;
    log.shifts = controller ? controller->shifts() : 0;
    log.epsilon = agent.epsilon();

    env.set_threshold(xi);
    CircuitState s = env.reset();
    std::vector<double> obs = env.encode(s);
    nstep.clear();
    double min_error = std::numeric_limits<double>::infinity();
    for (;;) {
      const int a = agent.act(obs);
      StepOutcome out = env.step(a);
      std::vector<double> next_obs = env.encode(out.next_state);
      for (auto& t : nstep.push(std::move(obs), a, out.reward, next_obs, out.done))
        agent.remember(std::move(t));
      if (const double loss = agent.learn(); loss >= 0) log.loss = loss;
      log.train_return += out.reward;
      ++log.train_steps;
      min_error = std::min(min_error, out.info.energy - cfg.reference_energy);
      obs = std::move(next_obs);
      if (out.done) {
        log.train_success = out.info.success;
        log.train_final_energy = out.next_state.energy();
        break;
      }
    }

    const EpisodeRecord test =
        run_episode(env, [&](const std::vector<double>& o) { return agent.greedy(o); });
    log.test_final_energy = test.final_energy;
    log.test_success = test.success;
    log.accuracy_error = test.final_energy - cfg.accuracy_energy();
    log.chemically_accurate = log.accuracy_error < cfg.chemical_accuracy;
    log.depth = test.depth;
    log.gate_count = test.gate_count;
    log.circuit = to_json(test.final_circuit);

    if (controller) xi = controller->on_episode_end(min_error, log.train_success);

    update_summary(result.summary, log);
    if (on_episode) on_episode(log);
    if (keep_logs) result.logs.push_back(std::move(log));
    if (cfg.stop_on_success && result.summary.success) break;
  }
  result.checkpoint = agent.checkpoint();
  return result;
}

}  // namespace vqerl
