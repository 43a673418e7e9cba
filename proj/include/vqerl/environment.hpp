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
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqerl/circuit.hpp"
#include "vqerl/optimizers.hpp"

namespace vqerl {

inline constexpr double kSuccessReward = 5.0;
inline constexpr double kOverlengthReward = -5.0;

struct EnvConfig {
  std::shared_ptr<const PauliHamiltonian> hamiltonian;
  std::size_t max_slots = 6;
  double reference_energy = 0.0;  // exact ground energy or a lower bound
  double threshold = 1.6e-3;      // success when E_t - reference < threshold
  OptimizerConfig optimizer;
  bool shift_energy_feature = true;  // encode E_t - reference instead of raw E_t
};

struct RewardOutcome {
  double reward = 0.0;
  bool done = false;
  bool success = false;
};

/// Step reward: +5 when E_t is within `threshold` of the reference, -5 once
/// t exceeds L, otherwise the relative improvement capped below at -1.
inline RewardOutcome compute_reward(double previous_energy, double energy,
                                    double reference_energy, double threshold, int t,
                                    std::size_t max_slots) {
  if (energy - reference_energy < threshold) return {kSuccessReward, true, true};
  if (t > static_cast<int>(max_slots)) return {kOverlengthReward, true, false};
  const double gap = previous_energy - reference_energy;
  double r;
  if (std::abs(gap) < 1e-12)
    r = energy >= previous_energy ? 0.0 : 1.0;
  else
    r = (previous_energy - energy) / gap;
  return {std::max(r, -1.0), false, false};
}

struct StepInfo {
  double energy = 0.0;
  double previous_energy = 0.0;
  int t = 0;
  bool success = false;
};

struct StepOutcome {
  CircuitState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// One episode of gate-by-gate circuit construction. Rotations are appended at
/// angle 0 and followed by the configured angle optimization; CNOTs are not.
/// The step after the L-th gate (t = L + 1) cannot place a gate and ends the
/// episode with -5 unless the circuit already met the threshold.
class VqeEnvironment {
 public:
  explicit VqeEnvironment(EnvConfig config) : cfg_(std::move(config)), state_(1, 1) {
    if (!cfg_.hamiltonian) throw std::invalid_argument("environment needs a Hamiltonian");
    if (cfg_.max_slots < 1) throw std::invalid_argument("max_slots must be >= 1");
    if (!(cfg_.threshold > 0)) throw std::invalid_argument("threshold must be positive");
    initial_energy_ = expectation(zero_state(num_qubits()), *cfg_.hamiltonian);
    reset();
  }

  const EnvConfig& config() const { return cfg_; }
  std::size_t num_qubits() const { return cfg_.hamiltonian->num_qubits(); }
  int num_actions() const { return action_count(num_qubits()); }
  std::size_t observation_size() const { return 4 * cfg_.max_slots + 1; }

  /// Takes effect at the next reset; the threshold is frozen within an episode.
  void set_threshold(double xi) {
    if (!(xi > 0)) throw std::invalid_argument("threshold must be positive");
    pending_threshold_ = xi;
  }
  double threshold() const { return threshold_; }

  CircuitState reset() {
    if (pending_threshold_ > 0) threshold_ = pending_threshold_;
    else threshold_ = cfg_.threshold;
    state_ = CircuitState(num_qubits(), cfg_.max_slots, initial_energy_);
    t_ = 0;
    done_ = false;
    return state_;
  }

  StepOutcome step(int action_index) {
    if (done_) throw std::logic_error("step() called on a terminated episode");
    const double previous = state_.energy();
    ++t_;
    if (!state_.full()) {
      const GateSpec gate = decode_action(action_index, num_qubits()).gate;
      state_.append(gate);
      if (gate.is_rotation()) {
        const OptimizeResult r = apply_strategy(state_, *cfg_.hamiltonian, cfg_.optimizer);
        apply_angles(state_, r);
      } else {
        state_.set_energy(circuit_energy(state_, *cfg_.hamiltonian));
      }
    } else {
      decode_action(action_index, num_qubits());  // validates the index
    }
    const RewardOutcome o = compute_reward(previous, state_.energy(), cfg_.reference_energy,
                                           threshold_, t_, cfg_.max_slots);
    done_ = o.done;
    return {state_, o.reward, o.done, {state_.energy(), previous, t_, o.success}};
  }

  std::vector<double> encode(const CircuitState& s) const {
    return encode_state(s, cfg_.shift_energy_feature ? cfg_.reference_energy : 0.0);
  }

  const CircuitState& state() const { return state_; }
  int t() const { return t_; }
  bool done() const { return done_; }
  double initial_energy() const { return initial_energy_; }

 private:
  EnvConfig cfg_;
  CircuitState state_;
  double initial_energy_ = 0.0;
  double threshold_ = 0.0;
  double pending_threshold_ = 0.0;
  int t_ = 0;
  bool done_ = false;
};

struct EpisodeRecord {
  std::vector<std::vector<double>> states;  // encodings before each action
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<double> energies;  // E_t after each step
  CircuitState final_circuit{1, 1};
  double final_energy = 0.0;
  bool success = false;
  int depth = 0;
  int gate_count = 0;

  /// min_t (E_t - reference) over the episode's steps.
  double min_error(double reference) const {
    double m = final_energy - reference;
    for (double e : energies) m = std::min(m, e - reference);
    return m;
  }
};

using Policy = std::function<int(const std::vector<double>&)>;

inline EpisodeRecord run_episode(VqeEnvironment& env, const Policy& policy) {
  EpisodeRecord rec;
  CircuitState s = env.reset();
  rec.final_energy = s.energy();
  for (;;) {
    auto obs = env.encode(s);
    const int a = policy(obs);
    StepOutcome out = env.step(a);
    rec.states.push_back(std::move(obs));
    rec.actions.push_back(a);
    rec.rewards.push_back(out.reward);
    rec.energies.push_back(out.info.energy);
    s = std::move(out.next_state);
    if (out.done) {
      rec.success = out.info.success;
      break;
    }
  }
  rec.final_energy = s.energy();
  rec.depth = depth(s);
  rec.gate_count = gate_count(s);
  rec.final_circuit = std::move(s);
  return rec;
}

/// JSON-lines record form.
inline nlohmann::json to_json(const EpisodeRecord& r) {
  return {{"actions", r.actions},
          {"rewards", r.rewards},
          {"energies", r.energies},
          {"final_energy", r.final_energy},
          {"success", r.success},
          {"depth", r.depth},
          {"gate_count", r.gate_count},
          {"circuit", to_json(r.final_circuit)}};
}

}  // namespace vqerl
