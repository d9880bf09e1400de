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
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "gsgi/lp.hpp"
#include "gsgi/policies.hpp"

namespace gsgi {

/// Normal-form game over registered pure strategies. Rows are defender
/// strategies, columns attacker strategies, entries defender utility.
struct RestrictedGame {
  std::vector<PolicyPtr> defenders;
  std::vector<PolicyPtr> attackers;
  Eigen::MatrixXd payoff;     // mean defender utility
  Eigen::MatrixXd std_error;  // standard error of each mean
  Eigen::MatrixXi episodes;   // 0 marks an entry still to be estimated

  int num_defenders() const { return static_cast<int>(defenders.size()); }
  int num_attackers() const { return static_cast<int>(attackers.size()); }
  void add(PolicyPtr policy);
  bool complete() const { return (episodes.array() > 0).all(); }
  void check_complete() const;
  const std::vector<PolicyPtr>& strategies(Side side) const;
};

RestrictedGame make_restricted_game(std::vector<PolicyPtr> defenders, std::vector<PolicyPtr> attackers);

/// Number of worker threads for parallel fan-out, from GSGI_WORKERS (default 1).
int worker_count();

/// Simulates every entry with episodes == 0. An entry's episodes use seeds
/// derived from (seed, row id, column id), so the estimate does not depend on
/// when or in which order it is filled in. `entry` fixes the attacker entry.
void estimate_payoff_matrix(RestrictedGame& game, const GameConfig& config, int episodes_per_entry,
                            std::uint64_t seed, std::optional<Cell> entry = std::nullopt);

struct ZeroSumSolution {
  Eigen::VectorXd defender;  // maximin row mixture
  Eigen::VectorXd attacker;  // minimax column mixture
  double value = 0.0;
};

/// Solves the zero-sum matrix game (row player maximizes) by linear
/// programming and verifies the optimality certificate to `tolerance`.
ZeroSumSolution solve_zero_sum(const Eigen::MatrixXd& G, double tolerance = 1e-6);

/// (1 - alpha) * nash + alpha * uniform.
Eigen::VectorXd mix_strategies(const Eigen::VectorXd& nash, const Eigen::VectorXd& uniform, double alpha);

Eigen::VectorXd uniform_strategy(int n);

/// sd' G sa.
double expected_utility(const Eigen::VectorXd& sd, const Eigen::VectorXd& sa, const Eigen::MatrixXd& G);

/// Mixture over one side's strategy list with the given probabilities.
PolicyMixture to_mixture(const RestrictedGame& game, Side side, const Eigen::VectorXd& probs);

/// Opponent mixture used in training, keeping its two components.
struct ExplorationMixture {
  Eigen::VectorXd nash;
  Eigen::VectorXd uniform;
  double alpha = 0.0;
  Eigen::VectorXd combined;

  /// Probability mass contributed by the uniform component.
  double uniform_mass() const { return alpha * uniform.sum(); }
};

ExplorationMixture make_exploration_mixture(const Eigen::VectorXd& nash, double alpha);

nlohmann::json to_json(const ZeroSumSolution& s);
/// CSV with strategy ids as row and column headers.
std::string payoff_csv(const RestrictedGame& game);

}  // namespace gsgi
