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

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "gsgi/agent.hpp"
#include "gsgi/nn/network.hpp"

namespace gsgi {

/// Softmax weights of the parameterized random-walk attacker.
struct HeuristicAttackerParams {
  double w_p = 2.0;   // average success probability
  double w_i = -4.0;  // entering footprints
  double w_o = -2.0;  // leaving footprints
  double tau = 0.3;   // placement temperature, > 0
};

/// Movement-only variant of the same softmax for the defender.
struct HeuristicDefenderParams {
  double w_p = 0.0;
  double w_i = 0.0;
  double w_o = 0.0;
};

/// Per-direction inputs of the heuristic softmax; index 4 is "stay".
struct DirectionFeatures {
  std::array<double, kNumMoves> avg_success{};
  std::array<double, kNumMoves> entering{};
  std::array<double, kNumMoves> leaving{};
};

/// Mean success probability of the cells strictly on each side of the
/// observer (0 for an empty side), the current cell for "stay", and the
/// opponent footprint bits of the current cell.
DirectionFeatures direction_features(const Observation& obs, const GameConfig& config);

/// softmax_k(w_p * P_k + w_i * I_k + w_o * O_k). Throws on non-finite logits.
std::array<double, kNumMoves> heuristic_move_distribution(const DirectionFeatures& f, double w_p,
                                                           double w_i, double w_o);

/// exp(P(m,n) / tau) / sum_ij exp(P(i,j) / tau) at the observer's cell;
/// 0 when no tools remain.
double snare_placement_probability(const Observation& obs, const GameConfig& config, double tau);

// --- random sweeping -------------------------------------------------------

enum class SweepPhase { kToEdge, kBoundary, kFollow };

/// Per-episode state of the sweeping defender. `edge` is the boundary side it
/// heads for first (U, D, L, R); `clockwise` is the traversal orientation.
struct SweepState {
  SweepPhase phase = SweepPhase::kToEdge;
  Move edge = Move::kUp;
  bool clockwise = true;
};

bool on_boundary(Cell c, const GameConfig& config);
/// Next boundary cell's direction when traversing in the given orientation.
Move boundary_move(Cell c, const GameConfig& config, bool clockwise);

/// Action distribution of the sweeping defender in `state`.
std::array<double, kNumMoves> sweep_distribution(const Observation& obs, const SweepState& state,
                                                 const GameConfig& config);
/// Phase update after taking `move`.
void sweep_commit(const Observation& obs, SweepState& state, Move move, const GameConfig& config);
/// Samples a move (uniform tie-break among footprints) and updates the state.
Move random_sweep_action(const Observation& obs, SweepState& state, const GameConfig& config,
                         Rng& rng);

// --- pure strategies -------------------------------------------------------

struct HeuristicAttackerPolicy {
  HeuristicAttackerParams params;
};
struct RandomSweepPolicy {};
struct HeuristicDefenderPolicy {
  HeuristicDefenderParams params;
};
/// Greedy in the network's outputs; ties go to the lowest action index.
struct QNetworkPolicy {
  std::shared_ptr<const nn::QNetwork> network;
};
struct UniformRandomPolicy {};

using PolicyKind = std::variant<HeuristicAttackerPolicy, RandomSweepPolicy, HeuristicDefenderPolicy,
                                QNetworkPolicy, UniformRandomPolicy>;

/// A registered strategy of the meta-game. Stochastic heuristics are treated
/// as fixed behavioural strategies.
struct PurePolicy {
  std::string id;
  Side side = Side::kDefender;
  PolicyKind kind;
};

using PolicyPtr = std::shared_ptr<const PurePolicy>;

PolicyPtr make_policy(std::string id, Side side, PolicyKind kind);
std::unique_ptr<Agent> make_agent(const PurePolicy& policy, const GameConfig& config);
std::string kind_name(const PurePolicy& policy);
nlohmann::json describe(const PurePolicy& policy);

/// Probability-weighted list of pure strategies of one side.
struct PolicyMixture {
  std::vector<PolicyPtr> policies;
  std::vector<double> weights;

  static PolicyMixture pure(PolicyPtr p) { return {{std::move(p)}, {1.0}}; }
  static PolicyMixture uniform(std::vector<PolicyPtr> ps);
  Side side() const;
  void validate() const;
  /// Agent that draws one component per episode.
  std::unique_ptr<Agent> make_agent(const GameConfig& config) const;
};

struct UtilityStats {
  double mean = 0.0;
  double stddev = 0.0;
  double std_error = 0.0;
  int episodes = 0;

  double ci95() const { return 1.96 * std_error; }
};

UtilityStats summarize(const std::vector<double>& utilities);

/// Mean defender utility of the two mixtures; components are redrawn each
/// episode and episode i uses seed mix_seed(seed, i).
UtilityStats evaluate_matchup(const GameConfig& config, const PolicyMixture& defender,
                              const PolicyMixture& attacker, int episodes, std::uint64_t seed,
                              std::optional<Cell> entry = std::nullopt);

// --- grid search for the heuristic defender ---------------------------------

struct GridRange {
  double lo = -5.0;
  double hi = 5.0;
  double step = 0.1;

  std::vector<double> points() const;
};

struct GridSearchRow {
  HeuristicDefenderParams params;
  UtilityStats stats;
};

struct GridSearchResult {
  HeuristicDefenderParams best;
  UtilityStats best_stats;
  std::vector<GridSearchRow> rows;
};

/// Number of lattice points that grid_search_defender_params would evaluate.
std::size_t grid_search_size(const GridRange& w_p, const GridRange& w_i, const GridRange& w_o);

/// Exhaustive search over (w_p, w_i, w_o); every point sees the same episode
/// seeds. Ties keep the first point in lattice order.
GridSearchResult grid_search_defender_params(const GameConfig& config, const PolicyMixture& opponent,
                                             const GridRange& w_p, const GridRange& w_i,
                                             const GridRange& w_o, int episodes_per_point,
                                             std::uint64_t seed);

}  // namespace gsgi
