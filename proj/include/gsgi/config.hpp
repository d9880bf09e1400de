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
#include <string>
#include <vector>

#include <json.hpp>

#include "gsgi/types.hpp"

namespace gsgi {

/// Per-cell reward tables. Values are from the defender's point of view; the
/// attacker receives the negation of every entry.
struct RewardScheme {
  std::vector<double> tool_removal;    // r_tool, one per cell, > 0
  double catch_reward = 8.0;           // r_catch, > 0
  std::vector<double> attack_penalty;  // p_attack, one per cell, < 0

  static RewardScheme constant(int cells, double r_tool = 2.0, double r_catch = 8.0,
                               double p_attack = -4.0);
};

/// Immutable definition of one GSG-I instance.
struct GameConfig {
  int rows = 0;
  int cols = 0;
  std::vector<double> success_map;  // row-major rows*cols, values in [0, 1]
  double trigger_scale = 0.1;       // per-step trigger probability is scale * P(i,j)
  std::vector<Cell> entry_points;
  Cell patrol_post;
  int horizon = 1;
  int num_tools = 0;
  RewardScheme rewards;
  std::uint64_t seed = 0;
  bool attacker_returns_home = true;

  int num_cells() const { return rows * cols; }
  int index(Cell c) const { return c.row * cols + c.col; }
  Cell cell(int index) const { return {index / cols, index % cols}; }
  bool contains(Cell c) const { return on_grid(c, rows, cols); }
  double success(Cell c) const { return success_map[static_cast<std::size_t>(index(c))]; }
  double trigger_probability(int cell_index) const {
    return trigger_scale * success_map[static_cast<std::size_t>(cell_index)];
  }

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;

  /// Copy of this config with the attacker entry fixed to one cell (local mode).
  GameConfig with_single_entry(Cell entry) const;
};

enum class MapKind { kUniform, kGaussianMixture };

MapKind parse_map_kind(const std::string& name);
std::string to_string(MapKind kind);

/// Success-probability map. Cells within Chebyshev distance `clip_radius` of
/// an entry are clipped to at most 0.2; a negative radius selects the default
/// (1 for grids whose smaller side exceeds 3, otherwise 0).
std::vector<double> generate_map(MapKind kind, int rows, int cols, const std::vector<Cell>& entries,
                                  std::uint64_t seed, int clip_radius = -1);

std::vector<Cell> corner_cells(int rows, int cols);

/// Square instance with corner entries and a centre patrol post.
GameConfig make_square_config(int size, MapKind kind, int horizon, int num_tools,
                              std::uint64_t seed);

/// The small-game instance: 3x3, four steps, three tools.
GameConfig standard_small_config(MapKind kind = MapKind::kUniform, std::uint64_t seed = 1);

/// Default horizon and tool count used for a given grid size (3: 4/3, 5: 25/6, 7: 75/6).
int default_horizon(int size);
int default_tools(int size);

void to_json(nlohmann::json& j, const Cell& c);
void from_json(const nlohmann::json& j, Cell& c);
nlohmann::json config_to_json(const GameConfig& config);
GameConfig config_from_json(const nlohmann::json& j);
GameConfig load_config(const std::string& path);
void save_config(const GameConfig& config, const std::string& path);

/// FNV-1a hash of the canonical JSON dump; used in artifact manifests.
std::uint64_t config_hash(const GameConfig& config);

}  // namespace gsgi
