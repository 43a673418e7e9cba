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

#include <gtest/gtest.h>

#include "vqerl/baselines.hpp"
#include "vqerl/curriculum.hpp"

using namespace vqerl;

TEST(HardwareEfficient, TwoQubitSingleLayer) {
  const auto c = build_hardware_efficient({2, 1});
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], GateSpec::rotation(GateKind::RY, 0));
  EXPECT_EQ(c[1], GateSpec::rotation(GateKind::RY, 1));
  EXPECT_EQ(c[2], GateSpec::cnot(0, 1));
  EXPECT_EQ(depth(c), 2);
}

TEST(HardwareEfficient, GateCountFormula) {
  EXPECT_EQ(gate_count(build_hardware_efficient({4, 2})), 14);
  for (std::size_t n = 2; n <= 7; ++n)
    for (int layers = 1; layers <= 5; ++layers) {
      const HardwareEfficientSpec spec{n, layers};
      const auto c = build_hardware_efficient(spec);
      const int ni = static_cast<int>(n);
      EXPECT_EQ(gate_count(c), layers * (2 * ni - 1));
      EXPECT_EQ(gate_count(c), spec.expected_gate_count());
      // Each ladder is n - 1 deep and the next rotation layer overlaps all but two of its steps.
      EXPECT_EQ(depth(c), n == 2 ? 2 * layers : ni + 3 * (layers - 1)) << n << " " << layers;
    }
}

TEST(HardwareEfficient, AxisCycleAndFinalLayer) {
  HardwareEfficientSpec spec{3, 2, {GateKind::RY, GateKind::RZ}, true, GateKind::RX};
  const auto c = build_hardware_efficient(spec);
  EXPECT_EQ(c[0].kind, GateKind::RY);
  EXPECT_EQ(c[5].kind, GateKind::RZ);
  EXPECT_EQ(c[10].kind, GateKind::RX);
  EXPECT_EQ(gate_count(c), 13);
  EXPECT_THROW(build_hardware_efficient({2, 0}), std::invalid_argument);
}

TEST(ReferenceTable, Lookups) {
  EXPECT_EQ(reference_lookup("HE").min_depth, 17);
  EXPECT_EQ(reference_lookup("HE").min_gates, 63);
  EXPECT_EQ(reference_lookup("UCCSD").min_depth, 377);
  EXPECT_EQ(reference_lookup("UCCSD").min_gates, 610);
  EXPECT_EQ(reference_lookup("RL global COBYLA").min_depth, 12);
  EXPECT_EQ(reference_lookup("RL global COBYLA").min_gates, 29);
  EXPECT_EQ(reference_lookup("RL global COBYLA").avg_depth, 14);
  EXPECT_EQ(reference_lookup("RL global COBYLA").avg_gates, 36);
  EXPECT_THROW(reference_lookup("QAOA"), std::invalid_argument);
}

TEST(HardwareEfficient, SearchReachesToyGroundState) {
  const auto h = load_hamiltonian(VQERL_DATA_DIR "/toy3q.ham");
  const double exact = exact_ground_energy(h);
  OptimizerConfig cfg;
  cfg.kind = OptimizerKind::Rotosolve;
  cfg.rotosolve_global_iterations = 200;
  const auto r = search_hardware_efficient(h, exact, kChemicalAccuracy, 6, cfg,
                                           {3, 1, {GateKind::RY}, true});
  EXPECT_TRUE(r.reached);
  EXPECT_GE(r.energy, exact - 1e-9);
  EXPECT_LT(r.energy - exact, kChemicalAccuracy);
  EXPECT_EQ(r.gate_count, gate_count(r.circuit));
  EXPECT_NEAR(r.energy, circuit_energy(r.circuit, h), 1e-9);
  EXPECT_LE(r.layers, 6);
}
