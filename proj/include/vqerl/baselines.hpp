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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vqerl/circuit.hpp"
#include "vqerl/optimizers.hpp"

namespace vqerl {

/// Hardware-efficient ansatz: each layer applies one rotation per qubit
/// (axes cycle through `axes`, one entry per layer) and then the CNOT ladder
/// CNOT(0,1), CNOT(1,2), ..., CNOT(n-2,n-1).
struct HardwareEfficientSpec {
  std::size_t num_qubits = 2;
  int num_layers = 1;
  std::vector<GateKind> axes = {GateKind::RY};
  bool final_rotation_layer = false;
  GateKind final_axis = GateKind::RY;

  int expected_gate_count() const {
    const int n = static_cast<int>(num_qubits);
    return num_layers * (2 * n - 1) + (final_rotation_layer ? n : 0);
  }
};

inline CircuitState build_hardware_efficient(const HardwareEfficientSpec& spec) {
  if (spec.num_layers < 1) throw std::invalid_argument("need at least one layer");
  if (spec.axes.empty()) throw std::invalid_argument("need at least one rotation axis");
  const int n = static_cast<int>(spec.num_qubits);
  CircuitState c(spec.num_qubits, static_cast<std::size_t>(spec.expected_gate_count()));
  for (int l = 0; l < spec.num_layers; ++l) {
    const GateKind axis = spec.axes[l % spec.axes.size()];
    for (int q = 0; q < n; ++q) c.append(GateSpec::rotation(axis, q));
    for (int q = 0; q + 1 < n; ++q) c.append(GateSpec::cnot(q, q + 1));
  }
  if (spec.final_rotation_layer)
    for (int q = 0; q < n; ++q) c.append(GateSpec::rotation(spec.final_axis, q));
  return c;
}

struct ReferenceRow {
  std::string method;
  double avg_depth;
  int min_depth;
  double avg_gates;
  int min_gates;
};

/// Published depth / gate-count comparison for 6-qubit LiH at 2.2 Angstrom.
inline const std::vector<ReferenceRow>& reference_table() {
  static const std::vector<ReferenceRow> rows = {
      {"RL global COBYLA", 14, 12, 36, 29},
      {"HE", 17, 17, 63, 63},
      {"UCCSD", 377, 377, 610, 610},
  };
  return rows;
}

inline const ReferenceRow& reference_lookup(const std::string& method) {
  for (const auto& r : reference_table())
    if (r.method == method) return r;
  throw std::invalid_argument("no reference row for '" + method + "'");
}

struct HardwareEfficientResult {
  int layers = 0;
  CircuitState circuit{1, 1};
  double energy = 0.0;
  int depth = 0;
  int gate_count = 0;
  bool reached = false;
};

/// Optimizes all angles of a fixed ansatz (angles start from their current
/// values) and returns the optimized circuit.
inline CircuitState optimize_all_angles(CircuitState c, const PauliHamiltonian& h,
                                        const OptimizerConfig& cfg) {
  OptimizerConfig global = cfg;
  global.strategy = Strategy::Global;
  const OptimizeResult r = apply_strategy(c, h, global);
  if (!r.indices.empty())
    apply_angles(c, r);
  else
    c.set_energy(r.energy);
  return c;
}

/// Smallest layer count in [1, max_layers] whose optimized energy lies within
/// `accuracy` of `reference_energy`. When none does, returns the deepest
/// attempt with reached = false.
inline HardwareEfficientResult search_hardware_efficient(
    const PauliHamiltonian& h, double reference_energy, double accuracy, int max_layers,
    const OptimizerConfig& cfg, HardwareEfficientSpec base = {}) {
  HardwareEfficientResult out;
  base.num_qubits = h.num_qubits();
  for (int layers = 1; layers <= max_layers; ++layers) {
    base.num_layers = layers;
    CircuitState c = optimize_all_angles(build_hardware_efficient(base), h, cfg);
    out = {layers, c, c.energy(), depth(c), gate_count(c),
           c.energy() - reference_energy < accuracy};
    if (out.reached) break;
  }
  return out;
}

}  // namespace vqerl
