// Copyright 2026 The GSG-I Lab Authors.
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

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "gsgi/metagame.hpp"
#include "gsgi/rl.hpp"

namespace gsgi::dedol {

enum class Plan { kPureGlobal, kLocalThenGlobal, kPureLocal };

Plan parse_plan(const std::string& name);
std::string to_string(Plan plan);

/// How a defender mixture's expected utility is measured.
enum class EuMethod {
  kAuto,       // exact when the game tree fits the budget, otherwise trained
  kExact,      // exact best-response attacker on the game tree
  kTrained,    // worse of a freshly trained attacker DQN and the heuristic attacker
  kHeuristic,  // heuristic attacker only (cheap smoke runs)
};

EuMethod parse_eu_method(const std::string& name);
std::string to_string(EuMethod m);

struct DedolConfig {
  double alpha = 0.15;
  int max_iterations = 3;        // global phase
  int local_iterations = 2;      // each local phase
  Plan plan = Plan::kPureGlobal;
  std::vector<Cell> local_entries;  // empty: all entries of the game
  double delta = -1.0;              // < 0: three times the largest relevant standard error
  int episodes_per_entry = 200;
  rl::TrainingConfig defender_training;
  rl::TrainingConfig attacker_training;
  EuMethod eu_method = EuMethod::kAuto;
  rl::TrainingConfig eval_training;  // attacker oracle used by kTrained
  int eval_episodes = 2000;
  bool vanilla_psro = false;
  std::uint64_t seed = 0;

  void validate(const GameConfig& game) const;
};

/// Desk-sized defaults for a square grid.
DedolConfig default_dedol_config(int grid_size, const std::string& profile = "desk");

nlohmann::json to_json(const DedolConfig& d);
DedolConfig dedol_from_json(const nlohmann::json& j, DedolConfig base);

struct Validation {
  bool defender_added = false;
  bool attacker_added = false;
  double defender_margin = 0.0;  // u(f_d, sigma_a) - max_i u(i, sigma_a)
  double attacker_margin = 0.0;  // min_j u(sigma_d, j) - u(sigma_d, f_a)
  double delta = 0.0;
};

/// Evaluates the candidates against every registered opponent strategy and
/// compares them with the existing strategies at the given equilibrium.
/// Valid candidates are added to `game`.
Validation validate_best_responses(RestrictedGame& game, const ZeroSumSolution& ne, PolicyPtr defender_candidate,
                                   PolicyPtr attacker_candidate, const GameConfig& config, int episodes_per_entry,
                                   std::uint64_t seed, double delta, std::optional<Cell> entry = std::nullopt);

struct IterationRecord {
  int iteration = 0;  // 0 describes the initial restricted game
  std::vector<std::string> defenders;
  std::vector<std::string> attackers;
  Eigen::VectorXd nash_defender;
  Eigen::VectorXd nash_attacker;
  double game_value = 0.0;
  double uniform_mass_defender = 0.0;  // of the mixtures used in training
  double uniform_mass_attacker = 0.0;
  std::string trained_defender;
  std::string trained_attacker;
  Validation validation;
  bool retrained = false;
  std::string retrained_defender;
  std::string retrained_attacker;
  std::optional<Validation> retrain_validation;
  bool terminate = false;
  double defender_eu = 0.0;  // NE defender mixture after this iteration
  std::optional<double> retrained_defender_eu;
  std::string eu_method;
  double seconds = 0.0;
  // Defender mixture the EU refers to, by strategy id.
  std::vector<std::string> final_ids;
  std::vector<double> final_weights;
};

nlohmann::json to_json(const IterationRecord& r);

struct Selection {
  std::size_t record = 0;
  bool retrained_candidate = false;
  double eu = 0.0;
};

/// argmax of recorded defender EU over records and evaluated retrain
/// candidates; ties go to the latest.
Selection select_final_strategy(const std::vector<IterationRecord>& records);

/// Measures defender EU of mixtures against a strong attacker; caches per-policy work.
class EuEvaluator {
 public:
  EuEvaluator(const GameConfig& config, EuMethod method, rl::TrainingConfig training, int episodes,
              std::uint64_t seed);
  ~EuEvaluator();
  EuEvaluator(const EuEvaluator&) = delete;
  EuEvaluator& operator=(const EuEvaluator&) = delete;

  double evaluate(const PolicyMixture& defender);
  EuMethod method() const { return method_; }

 private:
  struct Exact;
  const GameConfig& config_;
  EuMethod method_;
  rl::TrainingConfig training_;
  int episodes_;
  std::uint64_t seed_;
  int calls_ = 0;
  std::unique_ptr<Exact> exact_;
};

struct DedolResult {
  RestrictedGame game;
  std::vector<IterationRecord> records;
  PolicyMixture final_defender;
  Selection selection;
};

/// Progress callback, called after each record.
using RecordSink = std::function<void(const std::string& phase, const IterationRecord&)>;

/// One DeDOL-S phase starting from `initial`.
DedolResult run_dedol_s(RestrictedGame initial, const GameConfig& config, const DedolConfig& dedol,
                        int iterations, EuEvaluator& eu, const std::string& phase = "global",
                        std::optional<Cell> entry = std::nullopt, const RecordSink& sink = {});

/// Initial strategies: random sweep and the heuristic attacker, or
/// untrained networks for the vanilla-PSRO ablation.
RestrictedGame initial_game(const GameConfig& config, const DedolConfig& dedol);

struct DedolReport {
  std::vector<std::pair<std::string, IterationRecord>> records;  // (phase, record)
  PolicyMixture final_defender;
  RestrictedGame game;
  nlohmann::json tree_stats;
  // Per local mode: its final defender mixture's EU in that mode and in the
  // global game. Gaps are reported only, not corrected.
  nlohmann::json cross_mode = nlohmann::json::array();
};

/// Full run following the configured plan. Local phases run in parallel over
/// GSGI_WORKERS threads.
DedolReport run_dedol(const GameConfig& config, const DedolConfig& dedol, const RecordSink& sink = {});

/// Writes checkpoints plus manifest.json describing the mixture.
void save_bundle(const std::string& dir, const PolicyMixture& mixture, const nlohmann::json& provenance);
PolicyMixture load_bundle(const std::string& dir);

}  // namespace gsgi::dedol
