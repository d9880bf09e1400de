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

#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "gsgi/config.hpp"
#include "gsgi/rng.hpp"
#include "gsgi/simulator.hpp"

namespace gsgi {

class Agent;

struct WeightedAgent {
  double weight = 1.0;
  std::unique_ptr<Agent> agent;
};

/// Per-episode decision maker for one side. Actions are move indices for the
/// defender and AttackerAction::encode() indices for the attacker.
///
/// Any internal state must be a deterministic function of the observations
/// and committed actions once per-episode randomness is fixed; the exact
/// solvers rely on this to replay agents along a game tree.
class Agent {
 public:
  explicit Agent(Side side) : side_(side) {}
  virtual ~Agent() = default;

  Side side() const { return side_; }
  int action_count() const { return num_actions(side_); }

  /// Starts an episode, drawing any per-episode randomness from `rng`.
  virtual void reset(Rng& rng) { (void)rng; }

  /// Per-episode randomness spelled out: fresh agents, each already reset to
  /// one variant, with their probabilities.
  virtual std::vector<WeightedAgent> episode_variants() const;

  /// Action distribution at this decision point; `probs` has action_count() entries.
  virtual void distribution(const Observation& obs, std::span<double> probs) const = 0;

  /// Records that `action` was taken at `obs`.
  virtual void commit(const Observation& obs, int action) { (void)obs, (void)action; }

  virtual std::unique_ptr<Agent> clone() const = 0;

  /// Samples from distribution() and commits the result.
  virtual int act(const Observation& obs, Rng& rng);

 private:
  Side side_;
};

/// One simulated episode.
struct EpisodeResult {
  double defender_utility = 0.0;
  Cell entry;
  std::vector<StepRecord> replay;
  GameState final_state;
};

/// Plays one episode. The entry is drawn uniformly from the config unless
/// `entry` is given (local mode). Streams for entry, triggers and both
/// policies derive from `seed`.
EpisodeResult rollout_episode(const GameConfig& config, Agent& defender, Agent& attacker,
                              std::uint64_t seed, std::optional<Cell> entry = std::nullopt,
                              bool record_replay = true);

}  // namespace gsgi
