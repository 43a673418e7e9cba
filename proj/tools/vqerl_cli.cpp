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

// vqerl command-line entry point: train, baseline, inspect, export.

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "vqerl/vqerl.hpp"

namespace {

using namespace vqerl;

void print_summary(std::ostream& os, const TrialSummary& s) {
  os << "trial seed=" << s.seed << " success=" << (s.success ? "yes" : "no");
  if (s.success)
    os << " min_depth=" << *s.min_depth << " min_gates=" << *s.min_gate_count
       << " first_success_episode=" << *s.first_success_episode;
  if (std::isfinite(s.best_error)) os << " best_error=" << s.best_error;
  os << " episodes=" << s.episodes_run << '\n';
}

void print_aggregate(std::ostream& os, const Aggregate& a) {
  os << "aggregate:\n  chemical accuracy in " << a.success_text() << '\n';
  if (a.successes == 0) {
    os << "  depth/gate metrics: absent (no successful trial)\n";
    return;
  }
  os << "  avg depth " << *a.avg_min_depth << "  min depth " << *a.min_min_depth << '\n'
     << "  avg gates " << *a.avg_min_gate_count << "  min gates " << *a.min_min_gate_count
     << '\n';
}

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              std::optional<int> trials, std::optional<int> episodes,
              std::optional<std::string> output) {
  RunConfig cfg = load_run_config(config_path);
  if (seed) {
    cfg.seed = *seed;
    cfg.seeds.clear();
  }
  if (trials) {
    cfg.trials = *trials;
    if (!cfg.seeds.empty() && static_cast<int>(cfg.seeds.size()) != cfg.trials) cfg.seeds.clear();
  }
  if (episodes) cfg.episodes = *episodes;
  if (output) cfg.output_dir = *output;
  if (cfg.trials < 1) throw std::invalid_argument("--trials must be >= 1");
  if (cfg.episodes < 0) throw std::invalid_argument("--episodes must be >= 0");

  const ExperimentResult r = run_experiment(cfg);
  std::cout << std::setprecision(10) << "reference energy " << r.reference_energy
            << " Ha, accuracy reference " << r.accuracy_energy << " Ha\n";
  for (const auto& s : r.trials) print_summary(std::cout, s);
  print_aggregate(std::cout, r.aggregate);
  if (!cfg.output_dir.empty()) std::cout << "logs written to " << cfg.output_dir << '\n';
  return 0;
}

int cmd_inspect(const std::string& path) {
  const PauliHamiltonian h = load_hamiltonian(path);
  std::cout << std::setprecision(10);
  std::cout << "qubits: " << h.num_qubits() << '\n'
            << "terms: " << h.terms().size() << '\n'
            << "lower bound: " << lower_bound(h) << " Ha\n";
  if (h.num_qubits() <= StateVector::kMaxQubits)
    std::cout << "fiducial energy: " << expectation(zero_state(h.num_qubits()), h) << " Ha\n";
  if (h.num_qubits() <= kDenseQubitLimit)
    std::cout << "exact ground energy: " << exact_ground_energy(h) << " Ha\n";
  else
    std::cout << "exact ground energy: not computed (more than " << kDenseQubitLimit
              << " qubits)\n";
  return 0;
}

int cmd_baseline(const std::string& path, int max_layers, double accuracy,
                 const std::string& method, int iterations, std::optional<double> reference) {
  const PauliHamiltonian h = load_hamiltonian(path);
  const double ref = reference ? *reference : exact_ground_energy(h);
  OptimizerConfig opt;
  opt.kind = optimizer_kind_from_string(method);
  opt.strategy = Strategy::Global;
  opt.rotosolve_global_iterations = iterations;
  opt.cobyla_global_iterations = iterations;
  const auto r = search_hardware_efficient(h, ref, accuracy, max_layers, opt);
  std::cout << std::setprecision(10) << "reference energy: " << ref << " Ha\n"
            << "layers: " << r.layers << (r.reached ? "" : " (accuracy not reached)") << '\n'
            << "energy: " << r.energy << " Ha (error " << r.energy - ref << ")\n"
            << "depth: " << r.depth << '\n'
            << "gates: " << r.gate_count << '\n';
  std::cout << "published reference rows (6-qubit LiH, 2.2 A):\n";
  for (const auto& row : reference_table())
    std::cout << "  " << row.method << ": avg depth " << row.avg_depth << ", min depth "
              << row.min_depth << ", avg gates " << row.avg_gates << ", min gates "
              << row.min_gates << '\n';
  return r.reached ? 0 : 2;
}

int cmd_export(const std::string& logs, const std::string& out) {
  for (const auto& p : export_plot_data(logs, out)) std::cout << p << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reinforcement-learning synthesis of shallow VQE ansatz circuits"};
  app.require_subcommand(1);

  auto* train = app.add_subcommand("train", "Run a multi-seed training experiment");
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials, episodes;
  std::optional<std::string> output;
  train->add_option("--config", config_path, "JSON run configuration")->required();
  train->add_option("--seed", seed, "Base seed (trials use seed, seed+1, ...)");
  train->add_option("--trials", trials, "Number of independent trials");
  train->add_option("--episodes", episodes, "Episodes per trial");
  train->add_option("--output", output, "Output directory for logs");

  auto* inspect = app.add_subcommand("inspect", "Print Hamiltonian statistics");
  std::string ham_path;
  inspect->add_option("hamiltonian", ham_path, "Hamiltonian file")->required();

  auto* baseline = app.add_subcommand("baseline", "Hardware-efficient ansatz layer search");
  std::string base_path, method = "rotosolve";
  int max_layers = 10, iterations = 200;
  double accuracy = kChemicalAccuracy;
  std::optional<double> reference;
  baseline->add_option("hamiltonian", base_path, "Hamiltonian file")->required();
  baseline->add_option("--max-layers", max_layers, "Largest layer count to try");
  baseline->add_option("--accuracy", accuracy, "Target energy error in Hartree");
  baseline->add_option("--optimizer", method, "rotosolve or cobyla");
  baseline->add_option("--iterations", iterations, "Optimizer iteration budget");
  baseline->add_option("--reference-energy", reference, "Reference energy (default: exact)");

  auto* exp = app.add_subcommand("export", "Convert episode logs to plot CSVs");
  std::string logs, out_dir = ".";
  exp->add_option("logs", logs, "Run directory or single .jsonl log")->required();
  exp->add_option("--out", out_dir, "Directory for CSV files");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) return cmd_train(config_path, seed, trials, episodes, output);
    if (*inspect) return cmd_inspect(ham_path);
    if (*baseline)
      return cmd_baseline(base_path, max_layers, accuracy, method, iterations, reference);
    if (*exp) return cmd_export(logs, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
