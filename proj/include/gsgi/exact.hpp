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
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "gsgi/agent.hpp"
#include "gsgi/game_tree.hpp"

namespace gsgi::exact {

/// Flat behavioural profile: slot infoset(i).offset + a holds the probability
/// of action a at infoset i.
using Profile = std::vector<double>;

Profile uniform_profile(const GameTree& tree);

/// Throws std::invalid_argument unless every infoset of `side` (both sides
/// when unset) carries a distribution.
void validate_profile(const GameTree& tree, const Profile& profile, std::optional<Side> side = std::nullopt);

/// Defender utility of the profile.
double expected_value(const GameTree& tree, const Profile& profile);

struct BestResponse {
  Side side = Side::kDefender;
  double value = 0.0;        // in the searching side's utility
  std::vector<int> actions;  // per infoset; -1 for the opponent's infosets
};

/// Best response of `side` to the opponent's part of `opponent`. Ties and
/// unreachable infosets take the lowest action index.
BestResponse exact_best_response(const GameTree& tree, const Profile& opponent, Side side);

/// `base` with the searching side's slots replaced by the pure choice.
Profile apply_pure(const GameTree& tree, Profile base, const BestResponse& br);

/// Sum of both sides' best-response values against the profile.
double exploitability(const GameTree& tree, const Profile& profile);

/// Value for `side` of a pure policy (one action per own infoset) against the opponent profile.
double pure_policy_value(const GameTree& tree, const Profile& opponent, Side side, std::span<const int> actions);

/// Enumerates the reduced pure policies of `side`: actions are fixed only at
/// infosets the policy itself can reach. Throws BudgetError beyond `cap`.
std::vector<std::vector<int>> enumerate_pure_policies(const GameTree& tree, Side side, std::size_t cap = 50000);

/// Combines behavioural strategies of one side into the behavioural strategy
/// of their weighted mixture, weighting each by its own reach of the infoset.
Profile mix_profiles(const GameTree& tree, Side side, std::span<const Profile> profiles,
                     std::span<const double> weights);

/// Behavioural profile of any agent, expanding per-episode variants.
Profile behavioural_profile(const GameTree& tree, const GameConfig& config, const Agent& agent);

/// Tree strategy of one side, keyed by infoset history.
struct TabularPolicy {
  Side side = Side::kDefender;
  std::unordered_map<InfoSetKey, std::vector<double>, InfoSetKeyHash> table;
};

std::shared_ptr<const TabularPolicy> tabular_policy(const GameTree& tree, const Profile& profile, Side side);

/// Plays a tabular policy in the simulator, rebuilding infoset keys from
/// observations. Histories missing from the table are played uniformly.
class TabularAgent : public Agent {
 public:
  explicit TabularAgent(std::shared_ptr<const TabularPolicy> policy);

  void reset(Rng& rng) override;
  void distribution(const Observation& obs, std::span<double> probs) const override;
  void commit(const Observation& obs, int action) override;
  std::unique_ptr<Agent> clone() const override { return std::make_unique<TabularAgent>(*this); }

 private:
  InfoSetKey key_at(const Observation& obs) const;

  std::shared_ptr<const TabularPolicy> policy_;
  bool started_ = false;
  InfoSetKey key_;
  int pending_ = -1;
};

}  // namespace gsgi::exact
