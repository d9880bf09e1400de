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
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "gsgi/agent.hpp"
#include "gsgi/config.hpp"
#include "gsgi/simulator.hpp"

namespace gsgi::exact {

enum class NodeKind : std::uint8_t { kChance = 0, kDefender = 1, kAttacker = 2, kTerminal = 3 };

/// 128-bit digest of an observation-action history.
struct InfoSetKey {
  std::uint64_t hi = 0x6a09e667f3bcc908ULL;
  std::uint64_t lo = 0xbb67ae8584caa73bULL;

  InfoSetKey extend(std::uint64_t symbol) const {
    return {splitmix64(hi ^ symbol), splitmix64(lo + symbol * 0x9e3779b97f4a7c15ULL + 0x632be59bd9b4e019ULL)};
  }
  friend bool operator==(const InfoSetKey&, const InfoSetKey&) = default;
};

/// Key under which an infoset of `owner` with history `key` is registered.
inline InfoSetKey owned_key(Side owner, const InfoSetKey& key) {
  return key.extend(static_cast<std::uint64_t>(owner) + 0x5151);
}

struct InfoSetKeyHash {
  std::size_t operator()(const InfoSetKey& k) const { return static_cast<std::size_t>(k.hi ^ (k.lo * 31)); }
};

struct InfoSetInfo {
  Side owner = Side::kDefender;
  std::uint8_t num_actions = 0;
  std::uint32_t offset = 0;  // first slot of this infoset in a flat profile
};

struct TreeBudget {
  std::uint64_t max_nodes = 100'000'000;
  std::uint64_t max_bytes = 3ULL << 30;
};

/// Explicit extensive-form game, stored structure-of-arrays. Node 0 is the
/// root. Children of a node occupy a contiguous index range; decision nodes
/// have one child per action in action order.
class GameTree {
 public:
  explicit GameTree(TreeBudget budget = {});

  std::uint32_t num_nodes() const { return static_cast<std::uint32_t>(kind_.size()); }
  NodeKind kind(std::uint32_t n) const { return static_cast<NodeKind>(kind_[n]); }
  int num_children(std::uint32_t n) const { return count_[n]; }
  std::uint32_t child(std::uint32_t n, int i) const { return first_[n] + static_cast<std::uint32_t>(i); }
  double chance_prob(std::uint32_t n, int i) const { return chance_probs_[aux_[n] + static_cast<std::uint32_t>(i)]; }
  double payoff(std::uint32_t n) const { return payoffs_[aux_[n]]; }  // defender utility
  std::uint32_t infoset_of(std::uint32_t n) const { return aux_[n]; }

  std::uint32_t num_infosets() const { return static_cast<std::uint32_t>(infosets_.size()); }
  const InfoSetInfo& infoset(std::uint32_t i) const { return infosets_[i]; }
  /// Total slots of a flat behavioural profile.
  std::uint32_t profile_size() const { return profile_size_; }
  /// Nodes belonging to each infoset (built on first use).
  std::span<const std::uint32_t> members(std::uint32_t infoset) const;

  // --- construction -------------------------------------------------------
  std::uint32_t add_root();
  void make_terminal(std::uint32_t node, double defender_utility);
  /// Returns the index of the first child.
  std::uint32_t make_chance(std::uint32_t node, std::span<const double> probs);
  std::uint32_t make_decision(std::uint32_t node, std::uint32_t infoset);
  /// Finds or registers the infoset with this key; the action count must agree.
  std::uint32_t intern_infoset(Side owner, const InfoSetKey& key, int num_actions);
  /// Infoset registered under this owner and history key, if any.
  std::optional<std::uint32_t> find_infoset(Side owner, const InfoSetKey& key) const;
  /// Registered keys, as produced by owned_key().
  const std::unordered_map<InfoSetKey, std::uint32_t, InfoSetKeyHash>& key_index() const { return index_; }
  /// Releases spare capacity once construction is finished.
  void finalize();

  std::uint64_t memory_bytes() const;
  const TreeBudget& budget() const { return budget_; }
  bool explicit_triggers() const { return explicit_triggers_; }
  void set_explicit_triggers(bool on) { explicit_triggers_ = on; }
  nlohmann::json stats() const;

 private:
  std::uint32_t allocate(int count);

  TreeBudget budget_;
  bool explicit_triggers_ = false;
  std::vector<std::uint8_t> kind_;
  std::vector<std::uint8_t> count_;
  std::vector<std::uint32_t> first_;
  std::vector<std::uint32_t> aux_;
  std::vector<double> payoffs_;
  std::vector<double> chance_probs_;
  std::vector<InfoSetInfo> infosets_;
  std::unordered_map<InfoSetKey, std::uint32_t, InfoSetKeyHash> index_;
  std::uint32_t profile_size_ = 0;
  mutable std::vector<std::uint32_t> member_offsets_;
  mutable std::vector<std::uint32_t> member_nodes_;
};

/// Per-cell trigger counts after placement, with their probability, in the
/// order used for chance children.
struct TriggerOutcome {
  std::vector<int> counts;  // aligned with armed_cells()
  double probability = 1.0;
};
std::vector<TriggerOutcome> trigger_outcomes(const GameState& state, const GameConfig& config,
                                             const std::vector<int>& armed);

/// Observation symbols that extend infoset keys after a step.
std::uint64_t defender_symbol(const GameState& after, const GameConfig& config, int action);
std::uint64_t attacker_symbol(const GameState& after, const GameConfig& config, int action);
InfoSetKey defender_root_key();
InfoSetKey attacker_root_key(const GameConfig& config, Cell entry);

/// Simulator state plus the expected number of live tools per cell. Snare
/// triggers are never observed by either player, so the default tree folds
/// them into expected rewards; `expected` is unused with explicit triggers.
struct TreeState {
  GameState s;
  std::vector<double> expected;
};

struct StepOutcome {
  double probability = 1.0;
  TreeState next;
};

/// One step from `state`. With explicit triggers, one outcome per trigger
/// pattern of positive probability; otherwise a single outcome whose reward
/// is the expectation over triggers.
std::vector<StepOutcome> expand_step(const TreeState& state, const GameConfig& config, Move d,
                                     std::optional<AttackerAction> a, bool explicit_triggers);

/// Knuth's random-probe estimate of the GSG-I tree size.
double estimate_tree_size(const GameConfig& config, int probes, std::uint64_t seed,
                          bool explicit_triggers = false);

/// Approximate bytes used per stored node, for budget checks before building.
double estimated_bytes_per_node();

struct TreeOptions {
  TreeBudget budget;
  bool explicit_triggers = false;
  int estimate_probes = 2000;  // 0 skips the pre-build estimate
};

/// Builds the full GSG-I game tree: a chance root over entries, then per step
/// a defender node and an attacker node (while he is active) that does not
/// see the defender's pending move. With explicit triggers a chance node over
/// trigger patterns follows whenever more than one has positive probability.
/// Throws BudgetError when the estimate or the build exceeds the budget.
GameTree build_game_tree(const GameConfig& config, const TreeOptions& options = {});

/// Behavioural profile of `agent` on its side's infosets of a GSG-I tree built
/// from `config`; other slots are zero. The agent must have a single episode
/// variant; its internal state is replayed along every path.
std::vector<double> agent_profile(const GameTree& tree, const GameConfig& config, const Agent& agent);

/// Matching pennies: defender picks, attacker picks without seeing it,
/// defender gets +1 on a match and -1 otherwise.
GameTree matching_pennies_tree();

}  // namespace gsgi::exact
