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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "vqerl/experiment.hpp"

using namespace vqerl;
namespace fs = std::filesystem;

namespace {

const std::string kToy2 = VQERL_DATA_DIR "/toy2q.ham";

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("vqerl_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

TrialConfig toy_trial(int episodes, std::uint64_t seed) {
  TrialConfig t;
  t.hamiltonian = std::make_shared<const PauliHamiltonian>(load_hamiltonian(kToy2));
  t.reference_energy = exact_ground_energy(*t.hamiltonian);
  t.curriculum = make_profile("exact-reference");
  t.episodes = episodes;
  t.seed = seed;
  t.agent.warmup = 32;
  t.agent.batch_size = 16;
  t.agent.hidden = {32, 32};
  return t;
}

struct Captured {
  int status;
  std::string out;
};

Captured run_cli(const std::string& args) {
  const std::string cmd = std::string(VQERL_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

}  // namespace

TEST(Training, ZeroEpisodes) {
  const auto r = run_trial(toy_trial(0, 1));
  EXPECT_TRUE(r.logs.empty());
  EXPECT_FALSE(r.summary.success);
  EXPECT_EQ(r.summary.episodes_run, 0);
  EXPECT_EQ(r.checkpoint.at("actions_taken"), 0);
}

TEST(Training, SameSeedGivesIdenticalLogs) {
  const auto a = run_trial(toy_trial(60, 4));
  const auto b = run_trial(toy_trial(60, 4));
  ASSERT_EQ(a.logs.size(), 60u);
  ASSERT_EQ(a.logs.size(), b.logs.size());
  for (std::size_t i = 0; i < a.logs.size(); ++i)
    EXPECT_EQ(nlohmann::json(a.logs[i]).dump(), nlohmann::json(b.logs[i]).dump());
  EXPECT_EQ(a.checkpoint, b.checkpoint);
}

TEST(Training, LogFieldsAreConsistent) {
  const auto r = run_trial(toy_trial(80, 2));
  const double exact = -std::sqrt(1.25);
  for (const auto& e : r.logs) {
    EXPECT_GE(e.train_steps, 1);
    EXPECT_LE(e.train_steps, 7);
    EXPECT_GE(e.test_final_energy, exact - 1e-9);
    EXPECT_NEAR(e.accuracy_error, e.test_final_energy - exact, 1e-12);
    EXPECT_EQ(e.chemically_accurate, e.accuracy_error < kChemicalAccuracy);
    EXPECT_GE(e.threshold, kChemicalAccuracy);
    EXPECT_EQ(e.gate_count, static_cast<int>(e.circuit.at("gates").size()));
  }
  EXPECT_GT(r.logs.back().loss, 0.0);
  const auto back = nlohmann::json(r.logs[5]).get<EpisodeLog>();
  EXPECT_EQ(nlohmann::json(back), nlohmann::json(r.logs[5]));
}

TEST(Training, StopOnSuccessEndsAtFirstAccurateEpisode) {
  auto cfg = toy_trial(400, 3);
  cfg.stop_on_success = true;
  const auto r = run_trial(cfg);
  if (r.summary.success) {
    EXPECT_EQ(*r.summary.first_success_episode, r.logs.back().episode);
    EXPECT_EQ(r.summary.episodes_run, static_cast<int>(r.logs.size()));
  } else {
    EXPECT_EQ(r.logs.size(), 400u);
  }
}

TEST(Summary, AggregateOverSuccessfulTrials) {
  std::vector<TrialSummary> s(4);
  s[0].success = true, s[0].min_depth = 3, s[0].min_gate_count = 5;
  s[1].success = true, s[1].min_depth = 1, s[1].min_gate_count = 2;
  s[3].success = true, s[3].min_depth = 2, s[3].min_gate_count = 8;
  const auto a = aggregate(s);
  EXPECT_EQ(a.success_text(), "3 out of 4 trials");
  EXPECT_EQ(*a.min_min_depth, 1);
  EXPECT_DOUBLE_EQ(*a.avg_min_depth, 2.0);
  EXPECT_EQ(*a.min_min_gate_count, 2);
  EXPECT_DOUBLE_EQ(*a.avg_min_gate_count, 5.0);
  EXPECT_LE(*a.min_min_depth, *a.avg_min_depth);
  const auto none = aggregate({TrialSummary{}});
  EXPECT_EQ(none.successes, 0);
  EXPECT_FALSE(none.avg_min_depth.has_value());
}

TEST(Summary, UpdateTracksMinima) {
  TrialSummary s;
  EpisodeLog e;
  e.accuracy_error = 0.5;
  update_summary(s, e);
  EXPECT_FALSE(s.success);
  e.episode = 3, e.accuracy_error = 1e-4, e.chemically_accurate = true, e.depth = 4, e.gate_count = 6;
  update_summary(s, e);
  e.episode = 4, e.depth = 2, e.gate_count = 7;
  update_summary(s, e);
  EXPECT_TRUE(s.success);
  EXPECT_EQ(*s.first_success_episode, 3);
  EXPECT_EQ(*s.min_depth, 2);
  EXPECT_EQ(*s.min_gate_count, 6);
  EXPECT_EQ(s.episodes_run, 5);
}

TEST(Config, ParsesAndResolvesRelativePaths) {
  const auto dir = scratch("config");
  std::ofstream(dir / "run.json") << R"({
    "hamiltonian": "toy.ham",
    "reference": {"mode": "lower-bound"},
    "curriculum": {"profile": "lower-bound-proxy"},
    "optimizer": {"method": "rotosolve", "strategy": "local"},
    "agent": {"n_step": 1},
    "trials": 3, "episodes": 7, "seed": 11
  })";
  const auto c = load_run_config((dir / "run.json").string());
  EXPECT_EQ(fs::path(c.hamiltonian_path), dir / "toy.ham");
  EXPECT_EQ(c.reference_mode, ReferenceMode::LowerBound);
  EXPECT_EQ(*c.curriculum_profile, "lower-bound-proxy");
  EXPECT_EQ(c.optimizer.kind, OptimizerKind::Rotosolve);
  EXPECT_EQ(c.optimizer.budget(), 5);
  EXPECT_EQ(c.agent.n_step, 1);
  EXPECT_EQ(c.resolved_seeds(), (std::vector<std::uint64_t>{11, 12, 13}));
  const auto again = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, Errors) {
  try {
    load_run_config("/nonexistent/run.json");
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos);
  }
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(R"({"hamiltonian": "x", "trials": 0})")),
               std::invalid_argument);
  EXPECT_THROW(run_config_from_json(nlohmann::json::parse(
                   R"({"hamiltonian": "x", "curriculum": {"profile": "steep"}})")),
               std::invalid_argument);
}

TEST(Experiment, References) {
  RunConfig c;
  const auto h = load_hamiltonian(kToy2);
  auto [ref, acc] = resolve_references(c, h);
  EXPECT_NEAR(ref, -std::sqrt(1.25), 1e-12);
  EXPECT_EQ(ref, acc);
  c.reference_mode = ReferenceMode::LowerBound;
  std::tie(ref, acc) = resolve_references(c, h);
  EXPECT_DOUBLE_EQ(ref, -1.5);
  EXPECT_NEAR(acc, -std::sqrt(1.25), 1e-12);
  c.accuracy_reference = -1.2;
  EXPECT_EQ(resolve_references(c, h).second, -1.2);
}

TEST(Experiment, ZeroEpisodesAndReproducibility) {
  RunConfig c;
  c.hamiltonian_path = kToy2;
  c.trials = 1;
  c.episodes = 0;
  auto r = run_experiment(c);
  ASSERT_EQ(r.trials.size(), 1u);
  EXPECT_FALSE(r.trials[0].success);

  c.trials = 2;
  c.episodes = 25;
  c.agent.warmup = 16;
  c.agent.batch_size = 8;
  c.agent.hidden = {16};
  c.threads = 2;
  const auto a = run_experiment(c);
  const auto b = run_experiment(c);
  EXPECT_EQ(nlohmann::json(a.trials), nlohmann::json(b.trials));
  if (a.aggregate.successes > 0) {
    EXPECT_LE(*a.aggregate.min_min_depth, *a.aggregate.avg_min_depth);
  }
}

TEST(Experiment, WritesLogsAndExportsCsv) {
  const auto dir = scratch("run");
  RunConfig c;
  c.hamiltonian_path = kToy2;
  c.trials = 1;
  c.episodes = 3;
  c.seed = 5;
  c.output_dir = (dir / "out").string();
  run_experiment(c);
  for (const char* f : {"config.json", "summary.json", "trial_5.jsonl", "agent_5.json"})
    EXPECT_TRUE(fs::exists(dir / "out" / f)) << f;
  const auto logs = read_episode_log((dir / "out" / "trial_5.jsonl").string());
  ASSERT_EQ(logs.size(), 3u);
  const auto written = export_plot_data((dir / "out").string(), (dir / "csv").string());
  ASSERT_EQ(written.size(), 1u);
  std::ifstream in(written[0]);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], kPlotColumns);
  EXPECT_EQ(lines[1].substr(0, 2), "0,");
}

TEST(Cli, InspectToyHamiltonian) {
  const auto r = run_cli("inspect " + kToy2);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("qubits: 2"), std::string::npos);
  EXPECT_NE(r.out.find("terms: 2"), std::string::npos);
  EXPECT_NE(r.out.find("lower bound: -1.5"), std::string::npos);
}

TEST(Cli, MissingConfigFails) {
  const auto r = run_cli("train --config /nonexistent/missing.json");
  EXPECT_NE(r.status, 0);
  EXPECT_NE(r.out.find("not found"), std::string::npos);
}

TEST(Cli, UnknownSubcommandFails) {
  EXPECT_NE(run_cli("frobnicate").status, 0);
  EXPECT_NE(run_cli("train --bogus").status, 0);
}

TEST(Cli, TrainPrintsOneSummaryPerTrial) {
  const auto dir = scratch("cli");
  std::ofstream(dir / "toy.json") << R"({"hamiltonian": ")" << kToy2 << R"(",
    "agent": {"hidden": [16], "warmup": 16, "batch_size": 8}})";
  const auto r = run_cli("train --config " + (dir / "toy.json").string() +
                         " --trials 3 --episodes 4 --seed 7 --output " + (dir / "out").string());
  EXPECT_EQ(r.status, 0) << r.out;
  int summaries = 0;
  for (std::size_t p = 0; (p = r.out.find("trial seed=", p)) != std::string::npos; ++p) ++summaries;
  EXPECT_EQ(summaries, 3);
  EXPECT_NE(r.out.find("out of 3 trials"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "out" / "trial_9.jsonl"));

  const auto e = run_cli("export " + (dir / "out").string() + " --out " + (dir / "csv").string());
  EXPECT_EQ(e.status, 0) << e.out;
  EXPECT_TRUE(fs::exists(dir / "csv" / "trial_7.csv"));
}

TEST(Cli, BaselineReportsLayers) {
  const auto r = run_cli("baseline " + kToy2 + " --max-layers 3");
  EXPECT_NE(r.out.find("layers:"), std::string::npos);
  EXPECT_NE(r.out.find("UCCSD"), std::string::npos);
}
