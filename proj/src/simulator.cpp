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

#include "gsgi/simulator.hpp"

#include <numeric>
#include <stdexcept>

namespace gsgi {

int GameState::deployed_total() const { return std::accumulate(deployed.begin(), deployed.end(), 0); }

GameState initial_state(const GameConfig& config, Cell entry) {
  if (!config.contains(entry)) throw ConfigError("attacker entry off the grid");
  GameState s;
  const int cells = config.num_cells();
  s.defender_pos = config.patrol_post;
  s.attacker_pos = entry;
  s.attacker_entry = entry;
  s.tools_remaining = config.num_tools;
  s.deployed.assign(static_cast<std::size_t>(cells), 0);
  s.footprints_def = FootprintGrid(cells);
  s.footprints_att = FootprintGrid(cells);
  s.memory_def = FootprintGrid(cells);
  s.memory_att = FootprintGrid(cells);
  return s;
}

namespace {

void write_footprints(FootprintGrid& grid, const GameConfig& config, Cell from, Cell to, Move m) {
  if (from == to) return;
  grid.merge(config.index(from), FootprintGrid::leaving_bit(m));
  grid.merge(config.index(to), FootprintGrid::entering_bit(opposite(m)));
}

}  // namespace

bool apply_moves(GameState& s, const GameConfig& config, Move defender_move,
                 AttackerAction attacker_action) {
  if (s.terminal) throw std::logic_error("step called on a terminal state");
  const Cell d_next = apply_move(s.defender_pos, defender_move, config.rows, config.cols);
  write_footprints(s.footprints_def, config, s.defender_pos, d_next, defender_move);
  s.defender_pos = d_next;

  if (!s.attacker_active()) return false;
  const Cell a_next = apply_move(s.attacker_pos, attacker_action.move, config.rows, config.cols);
  write_footprints(s.footprints_att, config, s.attacker_pos, a_next, attacker_action.move);
  s.attacker_pos = a_next;
  if (attacker_action.place && s.tools_remaining > 0) {
    --s.tools_remaining;
    ++s.deployed[static_cast<std::size_t>(config.index(a_next))];
    return true;
  }
  return false;
}

std::vector<int> armed_cells(const GameState& s) {
  std::vector<int> out;
  for (std::size_t i = 0; i < s.deployed.size(); ++i) {
    if (s.deployed[i] > 0) out.push_back(static_cast<int>(i));
  }
  return out;
}

void resolve_step(GameState& s, const GameConfig& config, const std::vector<int>& armed,
                  const std::vector<int>& triggered_counts, StepEvents& ev) {
  for (std::size_t k = 0; k < armed.size(); ++k) {
    const int n = triggered_counts[k];
    if (n == 0) continue;
    const auto cell = static_cast<std::size_t>(armed[k]);
    s.deployed[cell] -= n;
    s.tools_triggered += n;
    const double r = n * config.rewards.attack_penalty[cell];
    ev.defender_reward += r;
    ev.triggered.push_back({config.cell(armed[k]), n});
  }

  const auto d_cell = static_cast<std::size_t>(config.index(s.defender_pos));
  if (s.deployed[d_cell] > 0) {
    ev.removed = s.deployed[d_cell];
    ev.defender_reward += ev.removed * config.rewards.tool_removal[d_cell];
    s.tools_removed += ev.removed;
    s.deployed[d_cell] = 0;
  }

  if (s.attacker_active() && s.attacker_pos == s.defender_pos) {
    s.attacker_caught = true;
    ev.caught = true;
    ev.defender_reward += config.rewards.catch_reward;
  }

  if (config.attacker_returns_home && s.attacker_active() && s.tools_remaining == 0 &&
      s.attacker_pos == s.attacker_entry) {
    s.attacker_home = true;
    ev.went_home = true;
  }

  ++s.t;
  s.cumulative_defender_reward += ev.defender_reward;

  // Each player remembers the opponent bits in the cell it now occupies.
  const int a_cell = config.index(s.attacker_pos);
  s.memory_def.merge(static_cast<int>(d_cell), s.footprints_att.mask(static_cast<int>(d_cell)));
  if (s.attacker_active() || ev.caught || ev.went_home) {
    s.memory_att.merge(a_cell, s.footprints_def.mask(a_cell));
  }

  const bool no_tools_out = s.deployed_total() == 0;
  s.terminal = s.t >= config.horizon || (s.attacker_caught && no_tools_out) ||
               (s.attacker_home && no_tools_out);
  ev.terminal = s.terminal;
}

StepEvents step(GameState& s, const GameConfig& config, Move defender_move,
                AttackerAction attacker_action, Rng& trigger_rng) {
  StepEvents ev;
  ev.defender_move = defender_move;
  ev.attacker_action = attacker_action;
  ev.placed = apply_moves(s, config, defender_move, attacker_action);
  const std::vector<int> armed = armed_cells(s);
  std::vector<int> counts(armed.size(), 0);
  for (std::size_t k = 0; k < armed.size(); ++k) {
    const double p = config.trigger_probability(armed[k]);
    const int n = s.deployed[static_cast<std::size_t>(armed[k])];
    for (int i = 0; i < n; ++i) counts[k] += trigger_rng.bernoulli(p) ? 1 : 0;
  }
  resolve_step(s, config, armed, counts, ev);
  return ev;
}

Observation observe(const GameState& s, const GameConfig& config, Side side) {
  Observation o;
  o.side = side;
  o.t = s.t;
  o.horizon = config.horizon;
  o.config = &config;
  o.attacker_caught = s.attacker_caught;
  if (side == Side::kDefender) {
    o.position = s.defender_pos;
    o.entry = config.patrol_post;
    o.current_mask = s.footprints_att.mask(config.index(s.defender_pos));
    o.opponent_memory = s.memory_def;
    o.own_footprints = s.footprints_def;
  } else {
    o.position = s.attacker_pos;
    o.entry = s.attacker_entry;
    o.current_mask = s.footprints_def.mask(config.index(s.attacker_pos));
    o.opponent_memory = s.memory_att;
    o.own_footprints = s.footprints_att;
    o.tools_remaining = s.tools_remaining;
  }
  return o;
}

nlohmann::json to_json(const StepRecord& r) {
  nlohmann::json triggered = nlohmann::json::array();
  for (const auto& t : r.events.triggered) triggered.push_back({{"cell", t.cell}, {"count", t.count}});
  return {{"t", r.t},
          {"defender_pos", r.defender_pos},
          {"attacker_pos", r.attacker_pos},
          {"defender_action", static_cast<int>(r.events.defender_move)},
          {"attacker_action", r.events.attacker_action.encode()},
          {"placed", r.events.placed},
          {"triggered", triggered},
          {"removed", r.events.removed},
          {"caught", r.events.caught},
          {"home", r.events.went_home},
          {"defender_reward", r.events.defender_reward},
          {"attacker_reward", -r.events.defender_reward},
          {"terminal", r.events.terminal}};
}

}  // namespace gsgi
