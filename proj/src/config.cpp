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

#include "gsgi/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "gsgi/rng.hpp"

namespace gsgi {

using nlohmann::json;

RewardScheme RewardScheme::constant(int cells, double r_tool, double r_catch, double p_attack) {
  RewardScheme r;
  r.tool_removal.assign(static_cast<std::size_t>(cells), r_tool);
  r.catch_reward = r_catch;
  r.attack_penalty.assign(static_cast<std::size_t>(cells), p_attack);
  return r;
}

void GameConfig::validate() const {
  if (rows < 1 || cols < 1) throw ConfigError("grid dimensions must be positive");
  const auto cells = static_cast<std::size_t>(num_cells());
  if (success_map.size() != cells) throw ConfigError("success_map size does not match the grid");
  for (double p : success_map) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("success_map values must lie in [0, 1]");
  }
  if (!(trigger_scale > 0.0 && trigger_scale <= 1.0)) {
    throw ConfigError("trigger_scale must lie in (0, 1]");
  }
  if (entry_points.empty()) throw ConfigError("at least one entry point is required");
  for (const Cell& e : entry_points) {
    if (!contains(e)) throw ConfigError("entry point off the grid");
  }
  if (!contains(patrol_post)) throw ConfigError("patrol post off the grid");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (num_tools < 0) throw ConfigError("num_tools must be nonnegative");
  if (rewards.tool_removal.size() != cells || rewards.attack_penalty.size() != cells) {
    throw ConfigError("reward tables do not match the grid");
  }
  for (double r : rewards.tool_removal) {
    if (!(r > 0.0)) throw ConfigError("r_tool must be positive");
  }
  for (double p : rewards.attack_penalty) {
    if (!(p < 0.0)) throw ConfigError("p_attack must be negative");
  }
  if (!(rewards.catch_reward > 0.0)) throw ConfigError("r_catch must be positive");
}

GameConfig GameConfig::with_single_entry(Cell entry) const {
  if (!contains(entry)) throw ConfigError("local-mode entry off the grid");
  GameConfig copy = *this;
  copy.entry_points = {entry};
  return copy;
}

MapKind parse_map_kind(const std::string& name) {
  if (name == "uniform" || name == "random") return MapKind::kUniform;
  if (name == "gaussian" || name == "gaussian-mixture") return MapKind::kGaussianMixture;
  throw ConfigError("unknown map kind: " + name);
}

std::string to_string(MapKind kind) {
  return kind == MapKind::kUniform ? "uniform" : "gaussian-mixture";
}

std::vector<double> generate_map(MapKind kind, int rows, int cols, const std::vector<Cell>& entries,
                                 std::uint64_t seed, int clip_radius) {
  if (rows < 2 || cols < 2) throw ConfigError("maps need at least 2 rows and 2 columns");
  Rng rng(seed, Stream::kMap);
  std::vector<double> map(static_cast<std::size_t>(rows * cols));

  if (kind == MapKind::kUniform) {
    for (double& v : map) v = rng.uniform(0.2, 1.0);
  } else {
    // Two ridges: the middle row and the middle column. Each contributes a
    // Gaussian bump in the distance from it, so the intersection is the peak.
    const double mid_r = (rows - 1) / 2.0;
    const double mid_c = (cols - 1) / 2.0;
    const double width_r = rng.uniform(0.8, 1.4) * std::max(1.0, rows / 4.0);
    const double width_c = rng.uniform(0.8, 1.4) * std::max(1.0, cols / 4.0);
    const double amp_r = rng.uniform(0.8, 1.2);
    const double amp_c = rng.uniform(0.8, 1.2);
    double lo = 1e300, hi = -1e300;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c < cols; ++c) {
        const double dr = std::floor(std::abs(r - mid_r));
        const double dc = std::floor(std::abs(c - mid_c));
        const double v = amp_r * std::exp(-dr * dr / (2 * width_r * width_r)) +
                         amp_c * std::exp(-dc * dc / (2 * width_c * width_c));
        map[static_cast<std::size_t>(r * cols + c)] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
    for (double& v : map) v = hi > lo ? 0.2 + 0.8 * (v - lo) / (hi - lo) : 1.0;
  }

  if (clip_radius < 0) clip_radius = std::min(rows, cols) > 3 ? 1 : 0;
  for (const Cell& e : entries) {
    for (int r = e.row - clip_radius; r <= e.row + clip_radius; ++r) {
      for (int c = e.col - clip_radius; c <= e.col + clip_radius; ++c) {
        if (!on_grid({r, c}, rows, cols)) continue;
        double& v = map[static_cast<std::size_t>(r * cols + c)];
        v = std::min(v, 0.2);
      }
    }
  }
  return map;
}

std::vector<Cell> corner_cells(int rows, int cols) {
  return {{0, 0}, {0, cols - 1}, {rows - 1, 0}, {rows - 1, cols - 1}};
}

int default_horizon(int size) {
  switch (size) {
    case 3: return 4;
    case 5: return 25;
    case 7: return 75;
    default: return 4 * size;
  }
}

int default_tools(int size) { return size <= 3 ? 3 : 6; }

GameConfig make_square_config(int size, MapKind kind, int horizon, int num_tools,
                              std::uint64_t seed) {
  GameConfig g;
  g.rows = size;
  g.cols = size;
  g.entry_points = corner_cells(size, size);
  g.patrol_post = {size / 2, size / 2};
  g.horizon = horizon;
  g.num_tools = num_tools;
  g.seed = seed;
  g.success_map = generate_map(kind, size, size, g.entry_points, seed);
  g.rewards = RewardScheme::constant(size * size);
  g.validate();
  return g;
}

GameConfig standard_small_config(MapKind kind, std::uint64_t seed) {
  return make_square_config(3, kind, 4, 3, seed);
}

void to_json(json& j, const Cell& c) { j = json::array({c.row, c.col}); }

void from_json(const json& j, Cell& c) {
  if (!j.is_array() || j.size() != 2) throw ConfigError("cells are [row, col] pairs");
  c.row = j.at(0).get<int>();
  c.col = j.at(1).get<int>();
}

namespace {

json grid_to_json(const std::vector<double>& values, int rows, int cols) {
  json out = json::array();
  for (int r = 0; r < rows; ++r) {
    json row = json::array();
    for (int c = 0; c < cols; ++c) row.push_back(values[static_cast<std::size_t>(r * cols + c)]);
    out.push_back(std::move(row));
  }
  return out;
}

bool is_constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

json table_to_json(const std::vector<double>& values, int rows, int cols) {
  if (!values.empty() && is_constant(values)) return values.front();
  return grid_to_json(values, rows, cols);
}

std::vector<double> grid_from_json(const json& j, int rows, int cols, const char* name) {
  const auto cells = static_cast<std::size_t>(rows * cols);
  if (j.is_number()) return std::vector<double>(cells, j.get<double>());
  if (!j.is_array()) throw ConfigError(std::string(name) + " must be a number or an array");
  std::vector<double> out;
  out.reserve(cells);
  for (const auto& item : j) {
    if (item.is_array()) {
      if (item.size() != static_cast<std::size_t>(cols)) {
        throw ConfigError(std::string(name) + " row length does not match cols");
      }
      for (const auto& x : item) out.push_back(x.get<double>());
    } else {
      out.push_back(item.get<double>());
    }
  }
  if (out.size() != cells) throw ConfigError(std::string(name) + " does not match the grid size");
  return out;
}

}  // namespace

json config_to_json(const GameConfig& g) {
  json j;
  j["rows"] = g.rows;
  j["cols"] = g.cols;
  j["success_map"] = grid_to_json(g.success_map, g.rows, g.cols);
  j["trigger_scale"] = g.trigger_scale;
  j["entry_points"] = g.entry_points;
  j["patrol_post"] = g.patrol_post;
  j["horizon"] = g.horizon;
  j["num_tools"] = g.num_tools;
  j["rewards"] = {{"r_tool", table_to_json(g.rewards.tool_removal, g.rows, g.cols)},
                  {"r_catch", g.rewards.catch_reward},
                  {"p_attack", table_to_json(g.rewards.attack_penalty, g.rows, g.cols)}};
  j["seed"] = g.seed;
  j["attacker_returns_home"] = g.attacker_returns_home;
  return j;
}

GameConfig config_from_json(const json& j) {
  try {
    GameConfig g;
    g.rows = j.at("rows").get<int>();
    g.cols = j.at("cols").get<int>();
    if (g.rows < 1 || g.cols < 1) throw ConfigError("grid dimensions must be positive");
    g.seed = j.value("seed", std::uint64_t{0});
    g.entry_points = j.at("entry_points").get<std::vector<Cell>>();
    g.patrol_post = j.at("patrol_post").get<Cell>();
    if (j.contains("success_map")) {
      g.success_map = grid_from_json(j.at("success_map"), g.rows, g.cols, "success_map");
    } else {
      const auto kind = parse_map_kind(j.value("map_kind", std::string("uniform")));
      g.success_map = generate_map(kind, g.rows, g.cols, g.entry_points, g.seed);
    }
    g.trigger_scale = j.value("trigger_scale", 0.1);
    g.horizon = j.at("horizon").get<int>();
    g.num_tools = j.at("num_tools").get<int>();
    const json rewards = j.value("rewards", json::object());
    g.rewards.tool_removal = grid_from_json(rewards.value("r_tool", json(2.0)), g.rows, g.cols, "r_tool");
    g.rewards.catch_reward = rewards.value("r_catch", 8.0);
    g.rewards.attack_penalty =
        grid_from_json(rewards.value("p_attack", json(-4.0)), g.rows, g.cols, "p_attack");
    g.attacker_returns_home = j.value("attacker_returns_home", true);
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed game config: ") + e.what());
  }
}

GameConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

void save_config(const GameConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write config file: " + path);
  out << config_to_json(config).dump(2) << '\n';
}

std::uint64_t config_hash(const GameConfig& config) {
  return hash_string(config_to_json(config).dump());
}

}  // namespace gsgi
