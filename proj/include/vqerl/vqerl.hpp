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

#include "vqerl/agent.hpp"
#include "vqerl/baselines.hpp"
#include "vqerl/circuit.hpp"
#include "vqerl/curriculum.hpp"
#include "vqerl/environment.hpp"
#include "vqerl/experiment.hpp"
#include "vqerl/optimizers.hpp"
#include "vqerl/pauli_hamiltonian.hpp"
#include "vqerl/qnetwork.hpp"
#include "vqerl/statevector.hpp"
#include "vqerl/training.hpp"
