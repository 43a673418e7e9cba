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

// Trains one agent on the bundled 2-qubit Hamiltonian and prints the first
// chemically accurate circuit it finds, next to the hardware-efficient
// baseline.

#include <iostream>
#include <memory>

#include "vqerl/vqerl.hpp"

int main(int argc, char** argv) {
  using namespace vqerl;
  const std::string path = argc > 1 ? argv[1] : VQERL_DATA_DIR "/toy2q.ham";
  auto h = std::make_shared<const PauliHamiltonian>(load_hamiltonian(path));
  const double exact = exact_ground_energy(*h);

  TrialConfig cfg;
  cfg.hamiltonian = h;
  cfg.max_slots = 6;
  cfg.reference_energy = exact;
  cfg.curriculum = make_profile("exact-reference");
  cfg.episodes = 2000;
  cfg.seed = 7;
  cfg.stop_on_success = true;

  const TrialResult r = run_trial(cfg);
  std::cout << "exact ground energy " << exact << " Ha\n";
  if (!r.summary.success) {
    std::cout << "no chemically accurate circuit after " << r.summary.episodes_run
              << " episodes\n";
    return 1;
  }
  const EpisodeLog& hit = r.logs.back();
  std::cout << "episode " << hit.episode << ": error " << hit.accuracy_error << " Ha, depth "
            << hit.depth << ", gates " << hit.gate_count << '\n'
            << hit.circuit.dump(2) << '\n';

  OptimizerConfig opt;
  opt.kind = OptimizerKind::Rotosolve;
  opt.rotosolve_global_iterations = 100;
  const auto he = search_hardware_efficient(*h, exact, kChemicalAccuracy, 6, opt);
  std::cout << "hardware-efficient: " << he.layers << " layer(s), depth " << he.depth
            << ", gates " << he.gate_count << ", error " << he.energy - exact << " Ha\n";
  return 0;
}
