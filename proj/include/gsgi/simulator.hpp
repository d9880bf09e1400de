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

#include <json.hpp>

#include "gsgi/config.hpp"
#include "gsgi/rng.hpp"
#include "gsgi/types.hpp"

namespace gsgi {

/// Footprint bits of one player. Per cell an 8-bit mask: bit d (d < 4) is
/// "entered from side d", bit 4 + d is "left through side d". Bits never clear.
class FootprintGrid {
 public:
  FootprintGrid() = default;
  explicit FootprintGrid(int cells) : bits_(static_cast<std::size_t>(cells), 0) {}

  static constexpr std::uint8_t entering_bit(Move side) { return std::uint8_t(1u << int(side)); }
  static constexpr std::uint8_t leaving_bit(Move side) { return std::uint8_t(1u << (4 + int(side))); }

  std::uint8_t mask(int cell) const { return bits_[static_cast<std::size_t>(cell)]; }
  void merge(int cell, std::uint8_t mask) { bits_[static_cast<std::size_t>(cell)] |= mask; }

  bool entering(int cell, Move side) const { return mask(cell) & entering_bit(side); }
  bool leaving(int cell, Move side) const { return mask(cell) & leaving_bit(side); }

  int size() const { return static_cast<int>(bits_.size()); }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const FootprintGrid&, const FootprintGrid&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Full simulator state. Trigger randomness lives outside (see Episode) so the
/// exact solvers can enumerate trigger outcomes instead of sampling them.
struct GameState {
  int t = 0;
  Cell defender_pos;
  Cell attacker_pos;
  Cell attacker_entry;
  int tools_remaining = 0;
  std::vector<int> deployed;  // tool count per cell
  FootprintGrid footprints_def;
  FootprintGrid footprints_att;
  FootprintGrid memory_def;  // attacker bits the defender has seen
  FootprintGrid memory_att;  // defender bits the attacker has seen
  bool attacker_caught = false;
  bool attacker_home = false;
  bool terminal = false;
  double cumulative_defender_reward = 0.0;
  int tools_removed = 0;
  int tools_triggered = 0;

  int deployed_total() const;
  bool attacker_active() const { return !attacker_caught && !attacker_home; }
};

/// What one player knows at a decision point.
struct Observation {
  Side side = Side::kDefender;
  int t = 0;
  int horizon = 1;
  Cell position;
  Cell entry;                      // attacker only; the defender sees her post
  std::uint8_t current_mask = 0;   // opponent bits in the current cell
  FootprintGrid opponent_memory;
  FootprintGrid own_footprints;
  int tools_remaining = 0;         // attacker only
  bool attacker_caught = false;
  const GameConfig* config = nullptr;

  double normalized_time() const { return static_cast<double>(t) / horizon; }
};

struct TriggerEvent {
  Cell cell;
  int count = 0;
};

/// Everything that happened during one step.
struct StepEvents {
  Move defender_move = Move::kStay;
  AttackerAction attacker_action;
  bool placed = false;
  std::vector<TriggerEvent> triggered;
  int removed = 0;
  bool caught = false;
  bool went_home = false;
  double defender_reward = 0.0;
  bool terminal = false;
};

GameState initial_state(const GameConfig& config, Cell entry);

/// Phase 1 of a step: simultaneous moves, footprints and tool placement.
/// Returns whether a tool was placed.
bool apply_moves(GameState& state, const GameConfig& config, Move defender_move,
                 AttackerAction attacker_action);

/// Cells with deployed tools, in index order; trigger outcomes are reported
/// per entry of this list.
std::vector<int> armed_cells(const GameState& state);

/// Phase 2: apply the given per-cell trigger counts (aligned with armed_cells).
/// Phase 3 follows inside: removals, catch, return home, time advance and
/// terminal check, and observation memory updates.
void resolve_step(GameState& state, const GameConfig& config, const std::vector<int>& armed,
                  const std::vector<int>& triggered_counts, StepEvents& events);

/// Full transition with sampled triggers. Throws std::logic_error on a terminal state.
StepEvents step(GameState& state, const GameConfig& config, Move defender_move,
                AttackerAction attacker_action, Rng& trigger_rng);

Observation observe(const GameState& state, const GameConfig& config, Side side);

/// One line of the replay log.
struct StepRecord {
  int t = 0;  // step index before the move
  Cell defender_pos;
  Cell attacker_pos;
  StepEvents events;
};

nlohmann::json to_json(const StepRecord& record);

}  // namespace gsgi
