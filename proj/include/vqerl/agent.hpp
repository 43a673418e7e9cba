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
#include <cstdint>
#include <deque>
#include <fstream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqerl/qnetwork.hpp"

namespace vqerl {

/// Defaults follow the published settings where given (gamma, epsilon
/// schedule, buffer size, target sync period, n); network shape, batch size,
/// learning rate and warm-up are conventional choices.
struct AgentConfig {
  double gamma = 0.88;
  double epsilon_initial = 1.0;
  double epsilon_decay = 0.99995;
  double epsilon_min = 0.05;
  std::size_t replay_capacity = 20000;
  int target_sync_period = 500;
  int n_step = 6;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  std::vector<int> hidden = {128, 128};
  std::size_t warmup = 1000;

  void validate() const {
    if (!(gamma > 0 && gamma <= 1)) throw std::invalid_argument("gamma must be in (0, 1]");
    if (!(epsilon_min >= 0 && epsilon_min <= epsilon_initial && epsilon_initial <= 1))
      throw std::invalid_argument("need 0 <= epsilon_min <= epsilon_initial <= 1");
    if (!(epsilon_decay > 0 && epsilon_decay <= 1))
      throw std::invalid_argument("epsilon_decay must be in (0, 1]");
    if (replay_capacity == 0) throw std::invalid_argument("replay_capacity must be positive");
    if (target_sync_period < 1) throw std::invalid_argument("target_sync_period must be >= 1");
    if (n_step < 1) throw std::invalid_argument("n_step must be >= 1");
    if (batch_size == 0) throw std::invalid_argument("batch_size must be positive");
    if (!(learning_rate > 0)) throw std::invalid_argument("learning_rate must be positive");
  }
};

inline void to_json(nlohmann::json& j, const AgentConfig& c) {
  j = {{"gamma", c.gamma},
       {"epsilon_initial", c.epsilon_initial},
       {"epsilon_decay", c.epsilon_decay},
       {"epsilon_min", c.epsilon_min},
       {"replay_capacity", c.replay_capacity},
       {"target_sync_period", c.target_sync_period},
       {"n_step", c.n_step},
       {"batch_size", c.batch_size},
       {"learning_rate", c.learning_rate},
       {"hidden", c.hidden},
       {"warmup", c.warmup}};
}

inline void from_json(const nlohmann::json& j, AgentConfig& c) {
  AgentConfig d;
  c.gamma = j.value("gamma", d.gamma);
  c.epsilon_initial = j.value("epsilon_initial", d.epsilon_initial);
  c.epsilon_decay = j.value("epsilon_decay", d.epsilon_decay);
  c.epsilon_min = j.value("epsilon_min", d.epsilon_min);
  c.replay_capacity = j.value("replay_capacity", d.replay_capacity);
  c.target_sync_period = j.value("target_sync_period", d.target_sync_period);
  c.n_step = j.value("n_step", d.n_step);
  c.batch_size = j.value("batch_size", d.batch_size);
  c.learning_rate = j.value("learning_rate", d.learning_rate);
  c.hidden = j.value("hidden", d.hidden);
  c.warmup = j.value("warmup", d.warmup);
  c.validate();
}

/// epsilon after k decayed steps: max(epsilon_min, epsilon_initial * decay^k).
inline double epsilon_at(const AgentConfig& c, std::uint64_t k) {
  return std::max(c.epsilon_min, c.epsilon_initial * std::pow(c.epsilon_decay, double(k)));
}

struct Transition {
  std::vector<double> state;
  int action = 0;
  double n_step_return = 0.0;
  std::vector<double> bootstrap_state;  // state n steps later; unused when done
  bool done = false;
};

/// Fixed-capacity FIFO experience store with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
    data_.reserve(std::min<std::size_t>(capacity, 4096));
  }

  void push(Transition t) {
    if (data_.size() < capacity_) {
      data_.push_back(std::move(t));
    } else {
      data_[head_] = std::move(t);
      head_ = (head_ + 1) % capacity_;
    }
  }

  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }

  /// i-th oldest transition.
  const Transition& at(std::size_t i) const {
    if (i >= data_.size()) throw std::out_of_range("replay index out of range");
    return data_[(head_ + i) % data_.size()];
  }

  /// Uniform sampling with replacement.
  std::vector<const Transition*> sample(std::size_t count, std::mt19937_64& rng) const {
    if (data_.empty()) throw std::logic_error("cannot sample an empty replay buffer");
    std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
    std::vector<const Transition*> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(&data_[pick(rng)]);
    return out;
  }

 private:
  std::size_t capacity_;
  std::size_t head_ = 0;  // oldest element once full
  std::vector<Transition> data_;
};

/// Turns a stream of one-step experiences into n-step transitions with
/// G = sum_{k<n} gamma^k r_{t+k}, truncated at episode end.
class NStepAccumulator {
 public:
  NStepAccumulator(int n, double gamma) : n_(n), gamma_(gamma) {
    if (n < 1) throw std::invalid_argument("n must be >= 1");
  }

  std::vector<Transition> push(std::vector<double> state, int action, double reward,
                               const std::vector<double>& next_state, bool done) {
    pending_.push_back({std::move(state), action, reward});
    std::vector<Transition> out;
    if (done) {
      while (!pending_.empty()) out.push_back(emit(next_state, true));
    } else if (static_cast<int>(pending_.size()) == n_) {
      out.push_back(emit(next_state, false));
    }
    return out;
  }

  void clear() { pending_.clear(); }
  std::size_t pending() const { return pending_.size(); }

 private:
  struct Step {
    std::vector<double> state;
    int action;
    double reward;
  };

  Transition emit(const std::vector<double>& next_state, bool done) {
    double g = 0.0, w = 1.0;
    for (const auto& s : pending_) {
      g += w * s.reward;
      w *= gamma_;
    }
    Transition t{std::move(pending_.front().state), pending_.front().action, g, next_state, done};
    pending_.pop_front();
    return t;
  }

  int n_;
  double gamma_;
  std::deque<Step> pending_;
};

/// Index of the largest value; ties go to the lowest index.
inline int argmax(std::span<const double> q) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

/// epsilon-greedy: uniform random action with probability epsilon, otherwise
/// the greedy action.
inline int select_action(const QNetwork& net, std::span<const double> state, double epsilon,
                         std::mt19937_64& rng) {
  if (epsilon > 0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<int> pick(0, net.output_size() - 1);
      return pick(rng);
    }
  }
  const Eigen::VectorXd q = net.forward(state);
  return argmax({q.data(), static_cast<std::size_t>(q.size())});
}

/// Double-DQN regression targets: G for terminal transitions, otherwise
/// G + gamma^n Q_target(s', argmax_a Q_online(s', a)).
inline std::vector<double> ddqn_targets(const QNetwork& online, const QNetwork& target,
                                        const std::vector<const Transition*>& batch,
                                        double gamma, int n) {
  std::vector<double> y(batch.size());
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    y[i] = batch[i]->n_step_return;
    if (!batch[i]->done) live.push_back(i);
  }
  if (live.empty() || gamma == 0.0) return y;
  Eigen::MatrixXd next(online.input_size(), static_cast<Eigen::Index>(live.size()));
  for (std::size_t k = 0; k < live.size(); ++k) {
    const auto& s = batch[live[k]]->bootstrap_state;
    next.col(k) = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
  }
  const Eigen::MatrixXd q_online = online.forward(next);
  const Eigen::MatrixXd q_target = target.forward(next);
  const double discount = std::pow(gamma, n);
  for (std::size_t k = 0; k < live.size(); ++k) {
    Eigen::Index a = 0;
    q_online.col(k).maxCoeff(&a);
    // maxCoeff returns the first maximum, i.e. lowest index on ties.
    y[live[k]] += discount * q_target(a, k);
  }
  return y;
}

/// Mean squared error between Q_online(s, a) and `targets`, and its gradient
/// with respect to the online parameters.
inline std::pair<double, Eigen::VectorXd> td_loss_and_gradient(
    const QNetwork& online, const std::vector<const Transition*>& batch,
    const std::vector<double>& targets) {
  const auto b = static_cast<Eigen::Index>(batch.size());
  Eigen::MatrixXd x(online.input_size(), b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const auto& s = batch[i]->state;
    x.col(i) = Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(s.size()));
  }
  const Eigen::MatrixXd q = online.forward(x);
  Eigen::MatrixXd dout = Eigen::MatrixXd::Zero(q.rows(), q.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < b; ++i) {
    const double diff = q(batch[i]->action, i) - targets[i];
    loss += diff * diff;
    dout(batch[i]->action, i) = 2.0 * diff / double(b);
  }
  return {loss / double(b), online.backward(x, dout)};
}

/// One Adam step on the DDQN loss. Returns the pre-update loss.
inline double train_step(QNetwork& online, const QNetwork& target, Adam& adam,
                         const std::vector<const Transition*>& batch, double gamma, int n) {
  if (batch.empty()) throw std::invalid_argument("train_step needs a non-empty batch");
  const auto y = ddqn_targets(online, target, batch, gamma, n);
  auto [loss, grad] = td_loss_and_gradient(online, batch, y);
  adam.step(online.parameters(), grad);
  return loss;
}

/// Online/target networks, replay memory and the exploration schedule.
class DdqnAgent {
 public:
  DdqnAgent(int observation_size, int num_actions, AgentConfig config, std::uint64_t seed)
      : cfg_(std::move(config)), rng_(seed), buffer_(cfg_.replay_capacity),
        adam_(cfg_.learning_rate) {
    cfg_.validate();
    std::vector<int> sizes{observation_size};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(num_actions);
    online_ = QNetwork(sizes, rng_);
    target_ = online_;
  }

  const AgentConfig& config() const { return cfg_; }
  const QNetwork& online() const { return online_; }
  const QNetwork& target() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  std::mt19937_64& rng() { return rng_; }

  double epsilon() const { return epsilon_at(cfg_, actions_taken_); }
  std::uint64_t actions_taken() const { return actions_taken_; }
  std::uint64_t train_steps() const { return train_steps_; }
  std::uint64_t target_syncs() const { return target_syncs_; }

  /// Exploratory action for a training episode; advances the epsilon schedule
  /// and the target-sync counter.
  int act(std::span<const double> state) {
    const int a = select_action(online_, state, epsilon(), rng_);
    ++actions_taken_;
    if (actions_taken_ % static_cast<std::uint64_t>(cfg_.target_sync_period) == 0) {
      target_ = online_;
      ++target_syncs_;
    }
    return a;
  }

  /// Greedy action (epsilon = 0); touches no counters.
  int greedy(std::span<const double> state) const {
    const Eigen::VectorXd q = online_.forward(state);
    return argmax({q.data(), static_cast<std::size_t>(q.size())});
  }

  void remember(Transition t) { buffer_.push(std::move(t)); }

  /// Trains on one minibatch once the buffer holds `warmup` transitions.
  /// Returns the loss, or a negative value when no update happened.
  double learn() {
    if (buffer_.size() < std::max(cfg_.warmup, cfg_.batch_size)) return -1.0;
    const auto batch = buffer_.sample(cfg_.batch_size, rng_);
    ++train_steps_;
    return train_step(online_, target_, adam_, batch, cfg_.gamma, cfg_.n_step);
  }

  nlohmann::json checkpoint() const {
    const nlohmann::json cfg = cfg_;
    return {{"format", "vqerl-ddqn"},
            {"version", 1},
            {"config", cfg},
            {"config_hash", fnv1a(cfg.dump())},
            {"actions_taken", actions_taken_},
            {"online", online_.to_json()},
            {"target", target_.to_json()}};
  }

  void save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << checkpoint().dump() << '\n';
  }

  /// Restores networks and counters from a checkpoint produced with the same config.
  void restore(const nlohmann::json& j) {
    if (j.at("format") != "vqerl-ddqn" || j.at("version") != 1)
      throw std::invalid_argument("unsupported checkpoint format");
    const nlohmann::json cfg = cfg_;
    if (j.at("config_hash").get<std::uint64_t>() != fnv1a(cfg.dump()))
      throw std::invalid_argument("checkpoint config hash mismatch");
    QNetwork on = QNetwork::from_json(j.at("online"));
    QNetwork tg = QNetwork::from_json(j.at("target"));
    if (on.sizes() != online_.sizes() || tg.sizes() != online_.sizes())
      throw std::invalid_argument("checkpoint network shape mismatch");
    online_ = std::move(on);
    target_ = std::move(tg);
    actions_taken_ = j.at("actions_taken").get<std::uint64_t>();
  }

 private:
  AgentConfig cfg_;
  std::mt19937_64 rng_;
  QNetwork online_;
  QNetwork target_;
  ReplayBuffer buffer_;
  Adam adam_;
  std::uint64_t actions_taken_ = 0;
  std::uint64_t train_steps_ = 0;
  std::uint64_t target_syncs_ = 0;
};

}  // namespace vqerl
