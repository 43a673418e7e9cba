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
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vqerl/statevector.hpp"

namespace vqerl {

/// Ordered list of at most `max_slots` gates plus the energy of the state it
/// prepares. One gate per slot.
class CircuitState {
 public:
  CircuitState(std::size_t num_qubits, std::size_t max_slots, double energy = 0.0)
      : num_qubits_(num_qubits), max_slots_(max_slots), energy_(energy) {
    if (num_qubits == 0) throw std::invalid_argument("num_qubits must be positive");
    if (max_slots == 0) throw std::invalid_argument("max_slots must be positive");
  }

  std::size_t num_qubits() const { return num_qubits_; }
  std::size_t max_slots() const { return max_slots_; }
  std::size_t size() const { return slots_.size(); }
  bool empty() const { return slots_.empty(); }
  bool full() const { return slots_.size() >= max_slots_; }

  const std::vector<GateSpec>& slots() const { return slots_; }
  const GateSpec& operator[](std::size_t i) const { return slots_[i]; }

  double energy() const { return energy_; }
  void set_energy(double e) { energy_ = e; }

  void append(const GateSpec& gate) {
    if (full())
      throw std::length_error("circuit already holds " + std::to_string(max_slots_) +
                              " gates");
    gate.validate(num_qubits_);
    slots_.push_back(gate);
  }

  void set_angle(std::size_t slot, double angle) {
    if (slot >= slots_.size() || !slots_[slot].is_rotation())
      throw std::invalid_argument("slot " + std::to_string(slot) +
                                  " is not a rotation gate");
    slots_[slot].angle = angle;
  }

  /// Slot positions holding rotation gates, in circuit order.
  std::vector<std::size_t> rotation_slots() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < slots_.size(); ++i)
      if (slots_[i].is_rotation()) out.push_back(i);
    return out;
  }

  friend bool operator==(const CircuitState&, const CircuitState&) = default;

 private:
  std::size_t num_qubits_;
  std::size_t max_slots_;
  std::vector<GateSpec> slots_;
  double energy_;
};

struct ActionSpec {
  int index = 0;
  GateSpec gate;  // angle unset

  friend bool operator==(const ActionSpec&, const ActionSpec&) = default;
};

/// |Q|(|Q|+2) = 3|Q| rotations + 2 C(|Q|, 2) ordered CNOT pairs.
inline int action_count(std::size_t num_qubits) {
  const int n = static_cast<int>(num_qubits);
  return n * (n + 2);
}

// decode/encode also serve single-qubit environments (3 rotations, no CNOT);
// enumerate_actions keeps the |Q| >= 2 contract.
// Action order: rotations first, index 3q + (axis - 1) with axes X, Y, Z;
// then CNOT(c, t) for c ascending, t ascending, t != c.
inline ActionSpec decode_action(int index, std::size_t num_qubits) {
  const int n = static_cast<int>(num_qubits);
  if (n < 1) throw std::invalid_argument("action space needs at least 1 qubit");
  if (index < 0 || index >= action_count(num_qubits))
    throw std::out_of_range("action index " + std::to_string(index) + " out of range");
  if (index < 3 * n) {
    static constexpr GateKind kAxes[3] = {GateKind::RX, GateKind::RY, GateKind::RZ};
    return {index, GateSpec::rotation(kAxes[index % 3], index / 3)};
  }
  const int k = index - 3 * n;
  const int control = k / (n - 1);
  int target = k % (n - 1);
  if (target >= control) ++target;
  return {index, GateSpec::cnot(control, target)};
}

inline int encode_action(const GateSpec& gate, std::size_t num_qubits) {
  const int n = static_cast<int>(num_qubits);
  if (n < 1) throw std::invalid_argument("action space needs at least 1 qubit");
  gate.validate(num_qubits);
  if (gate.is_rotation()) return 3 * gate.target + axis_number(gate.kind) - 1;
  const int t = gate.target > gate.control ? gate.target - 1 : gate.target;
  return 3 * n + gate.control * (n - 1) + t;
}

inline std::vector<ActionSpec> enumerate_actions(std::size_t num_qubits) {
  if (num_qubits < 2) throw std::invalid_argument("action space needs at least 2 qubits");
  std::vector<ActionSpec> out;
  const int count = action_count(num_qubits);
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(decode_action(i, num_qubits));
  return out;
}

/// Per-slot block (control, target, rotated qubit, axis) followed by one
/// energy entry, 4L + 1 values. Unused qubit fields hold the sentinel |Q|,
/// unused axis fields hold 0. The energy entry is E_t - energy_offset.
inline std::vector<double> encode_state(const CircuitState& c, double energy_offset = 0.0) {
  const double sentinel = static_cast<double>(c.num_qubits());
  std::vector<double> out;
  out.reserve(4 * c.max_slots() + 1);
  for (std::size_t i = 0; i < c.max_slots(); ++i) {
    if (i >= c.size()) {
      out.insert(out.end(), {sentinel, sentinel, sentinel, 0.0});
      continue;
    }
    const GateSpec& g = c[i];
    if (g.is_rotation())
      out.insert(out.end(), {sentinel, sentinel, double(g.target), double(axis_number(g.kind))});
    else
      out.insert(out.end(), {double(g.control), double(g.target), sentinel, 0.0});
  }
  out.push_back(c.energy() - energy_offset);
  return out;
}

/// Longest gate chain along shared wires; each gate sits one layer above the
/// deepest wire it touches. Commutation is ignored.
inline int depth(std::span<const GateSpec> gates, std::size_t num_qubits) {
  std::vector<int> wire(num_qubits, 0);
  int d = 0;
  for (const auto& g : gates) {
    if (g.is_rotation()) {
      d = std::max(d, ++wire[g.target]);
    } else {
      const int layer = 1 + std::max(wire[g.control], wire[g.target]);
      wire[g.control] = wire[g.target] = layer;
      d = std::max(d, layer);
    }
  }
  return d;
}

inline int depth(const CircuitState& c) { return depth(c.slots(), c.num_qubits()); }

inline int gate_count(const CircuitState& c) { return static_cast<int>(c.size()); }

// JSON form: {"num_qubits", "max_slots", "energy", "gates": [{"kind", "qubits", "angle"}]}.
// CNOT qubits are [control, target]; rotations carry a single qubit.

inline nlohmann::json gate_to_json(const GateSpec& g) {
  if (g.is_rotation())
    return {{"kind", to_string(g.kind)}, {"qubits", nlohmann::json::array({g.target})}, {"angle", g.angle}};
  return {{"kind", "CNOT"}, {"qubits", nlohmann::json::array({g.control, g.target})}};
}

inline GateSpec gate_from_json(const nlohmann::json& j) {
  const GateKind kind = gate_kind_from_string(j.at("kind").get<std::string>());
  const auto& q = j.at("qubits");
  if (kind == GateKind::CNOT) {
    if (q.size() != 2) throw std::invalid_argument("CNOT needs two qubits");
    return GateSpec::cnot(q[0].get<int>(), q[1].get<int>());
  }
  if (q.size() != 1) throw std::invalid_argument("rotation needs one qubit");
  return GateSpec::rotation(kind, q[0].get<int>(), j.value("angle", 0.0));
}

inline nlohmann::json to_json(const CircuitState& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.slots()) gates.push_back(gate_to_json(g));
  return {{"num_qubits", c.num_qubits()},
          {"max_slots", c.max_slots()},
          {"energy", c.energy()},
          {"gates", std::move(gates)}};
}

inline CircuitState circuit_from_json(const nlohmann::json& j) {
  CircuitState c(j.at("num_qubits").get<std::size_t>(), j.at("max_slots").get<std::size_t>(),
                 j.value("energy", 0.0));
  for (const auto& g : j.at("gates")) c.append(gate_from_json(g));
  return c;
}

/// Energy of the state prepared by the circuit's gates from |0...0>.
inline double circuit_energy(const CircuitState& c, const PauliHamiltonian& h) {
  return expectation(simulate(c.num_qubits(), c.slots()), h);
}

}  // namespace vqerl
