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

#include "gsgi/agent.hpp"

#include <array>

namespace gsgi {

std::vector<WeightedAgent> Agent::episode_variants() const {
  std::vector<WeightedAgent> out;
  out.push_back({1.0, clone()});
  return out;
}

int Agent::act(const Observation& obs, Rng& rng) {
  std::array<double, kNumAttackerActions> probs{};
  std::span<double> view(probs.data(), static_cast<std::size_t>(action_count()));
  distribution(obs, view);
  const int a = rng.categorical(view);
  commit(obs, a);
  return a;
}

EpisodeResult rollout_episode(const GameConfig& config, Agent& defender, Agent& attacker,
                              std::uint64_t seed, std::optional<Cell> entry, bool record_replay) {
  Rng entry_rng(seed, Stream::kEntry);
  Rng trigger_rng(seed, Stream::kTriggers);
  Rng def_rng(seed, Stream::kDefenderPolicy);
  Rng att_rng(seed, Stream::kAttackerPolicy);

  EpisodeResult result;
  result.entry = entry ? *entry
                       : config.entry_points[static_cast<std::size_t>(
                             entry_rng.uniform_int(static_cast<int>(config.entry_points.size())))];
  GameState state = initial_state(config, result.entry);
  defender.reset(def_rng);
  attacker.reset(att_rng);

  while (!state.terminal) {
    const Move d = static_cast<Move>(defender.act(observe(state, config, Side::kDefender), def_rng));
    AttackerAction a;
    if (state.attacker_active()) {
      a = AttackerAction::decode(attacker.act(observe(state, config, Side::kAttacker), att_rng));
    }
    StepRecord record;
    record.t = state.t;
    record.events = step(state, config, d, a, trigger_rng);
    if (record_replay) {
      record.defender_pos = state.defender_pos;
      record.attacker_pos = state.attacker_pos;
      result.replay.push_back(std::move(record));
    }
  }
  result.defender_utility = state.cumulative_defender_reward;
  result.final_state = std::move(state);
  return result;
}

}  // namespace gsgi
