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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <memory>

#include "gsgi/agent.hpp"
#include "gsgi/config.hpp"
#include "gsgi/encoding.hpp"
#include "gsgi/simulator.hpp"
#include "invariant_suite.hpp"

using namespace gsgi;

namespace {

/// Plays a fixed action script, then stays.
class ScriptedAgent : public Agent {
 public:
  ScriptedAgent(Side side, std::vector<int> script) : Agent(side), script_(std::move(script)) {}

  void reset(Rng&) override { next_ = 0; }
  void distribution(const Observation&, std::span<double> probs) const override {
    std::fill(probs.begin(), probs.end(), 0.0);
    const int a = next_ < script_.size() ? script_[next_] : static_cast<int>(Move::kStay);
    probs[static_cast<std::size_t>(a)] = 1.0;
  }
  void commit(const Observation&, int) override { ++next_; }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<ScriptedAgent>(*this); }

 private:
  std::vector<int> script_;
  std::size_t next_ = 0;
};

GameConfig line_config() {
  GameConfig c;
  c.rows = 3;
  c.cols = 3;
  c.success_map.assign(9, 0.5);
  c.trigger_scale = 0.1;
  c.entry_points = {{0, 0}};
  c.patrol_post = {1, 1};
  c.horizon = 6;
  c.num_tools = 3;
  c.rewards = RewardScheme::constant(9);
  c.validate();
  return c;
}

int u(Move m) { return static_cast<int>(m); }

}  // namespace

TEST_CASE("uniform map values and entry clipping") {
  const auto corners = corner_cells(7, 7);
  const auto map = generate_map(MapKind::kUniform, 7, 7, corners, 1);
  REQUIRE(map.size() == 49);
  for (double v : map) {
    CHECK(v >= 0.2);
    CHECK(v <= 1.0);
  }
  for (const Cell& e : corners) {
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const Cell c{e.row + dr, e.col + dc};
        if (on_grid(c, 7, 7)) CHECK(map[std::size_t(c.row * 7 + c.col)] <= 0.2);
      }
    }
  }
}

TEST_CASE("gaussian-mixture map peaks at the ridge intersection") {
  const auto map = generate_map(MapKind::kGaussianMixture, 7, 7, corner_cells(7, 7), 1);
  const double peak = *std::max_element(map.begin(), map.end());
  CHECK(map[3 * 7 + 3] == peak);
  for (double v : map) CHECK((v >= 0.0 && v <= 1.0));
}

TEST_CASE("maps are deterministic in the seed") {
  for (MapKind kind : {MapKind::kUniform, MapKind::kGaussianMixture}) {
    const auto a = generate_map(kind, 5, 6, {{0, 0}}, 42);
    const auto b = generate_map(kind, 5, 6, {{0, 0}}, 42);
    CHECK(a == b);
  }
  CHECK(generate_map(MapKind::kUniform, 5, 5, {}, 1) != generate_map(MapKind::kUniform, 5, 5, {}, 2));
  CHECK_THROWS_AS(generate_map(MapKind::kUniform, 1, 5, {}, 1), ConfigError);
}

TEST_CASE("config validation") {
  GameConfig c = line_config();
  CHECK_NOTHROW(c.validate());
  SUBCASE("entry off grid") {
    c.entry_points = {{3, 0}};
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("probability above one") {
    c.success_map[4] = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("zero horizon") {
    c.horizon = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("nonnegative attack penalty") {
    c.rewards.attack_penalty[0] = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
  SUBCASE("no entries") {
    c.entry_points.clear();
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }
}

TEST_CASE("config json round trip") {
  GameConfig c = make_square_config(5, MapKind::kGaussianMixture, 25, 6, 9);
  c.rewards.tool_removal[3] = 2.5;
  const GameConfig back = config_from_json(config_to_json(c));
  CHECK(back.rows == c.rows);
  CHECK(back.success_map == c.success_map);
  CHECK(back.rewards.tool_removal == c.rewards.tool_removal);
  CHECK(back.entry_points == c.entry_points);
  CHECK(back.horizon == c.horizon);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(make_square_config(5, MapKind::kUniform, 25, 6, 9)) != config_hash(c));
}

TEST_CASE("moves, off-grid stay and footprints") {
  const GameConfig c = line_config();
  GameState s = initial_state(c, {0, 0});
  Rng rng(1);
  step(s, c, Move::kRight, {Move::kUp, false}, rng);
  CHECK(s.defender_pos == Cell{1, 2});
  CHECK(s.attacker_pos == Cell{0, 0});
  CHECK(s.footprints_def.leaving(c.index({1, 1}), Move::kRight));
  CHECK(s.footprints_def.entering(c.index({1, 2}), Move::kLeft));
  for (int i = 0; i < c.num_cells(); ++i) CHECK(s.footprints_att.mask(i) == 0);
  CHECK(s.t == 1);
}

TEST_CASE("a tool on a zero-probability cell never triggers") {
  GameConfig c = line_config();
  c.success_map.assign(9, 0.0);
  c.success_map[c.index({1, 1})] = 1.0;
  c.trigger_scale = 1.0;
  c.horizon = 20;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    GameState s = initial_state(c, {0, 0});
    Rng rng(seed);
    StepEvents ev = step(s, c, Move::kStay, {Move::kStay, true}, rng);
    CHECK(ev.triggered.empty());
    while (!s.terminal) {
      ev = step(s, c, Move::kStay, {Move::kStay, false}, rng);
      CHECK(ev.triggered.empty());
    }
    CHECK(s.tools_triggered == 0);
  }
}

TEST_CASE("defender entering a cell with two tools removes both") {
  GameConfig c = line_config();
  c.success_map.assign(9, 0.0);
  GameState s = initial_state(c, {0, 0});
  Rng rng(3);
  step(s, c, Move::kStay, {Move::kRight, true}, rng);
  step(s, c, Move::kStay, {Move::kStay, true}, rng);
  CHECK(s.deployed[std::size_t(c.index({0, 1}))] == 2);
  const StepEvents ev = step(s, c, Move::kUp, {Move::kRight, false}, rng);
  CHECK(ev.removed == 2);
  CHECK(ev.defender_reward == doctest::Approx(2 * c.rewards.tool_removal[0]));
  CHECK(s.tools_removed == 2);
  CHECK(s.deployed_total() == 0);
}

TEST_CASE("co-location after simultaneous moves is a catch, a swap is not") {
  const GameConfig c = line_config();
  SUBCASE("same cell") {
    Rng rng(1);
    GameState t = initial_state(c, {0, 0});
    step(t, c, Move::kUp, {Move::kStay, false}, rng);  // defender at (0,1)
    const StepEvents hit = step(t, c, Move::kLeft, {Move::kStay, false}, rng);
    CHECK(hit.caught);
    CHECK(hit.defender_reward == doctest::Approx(c.rewards.catch_reward));
    CHECK(t.attacker_caught);
    CHECK(t.terminal);
  }
  SUBCASE("edge swap") {
    GameState s = initial_state(c, {0, 0});
    Rng rng(1);
    step(s, c, Move::kUp, {Move::kStay, false}, rng);  // defender (0,1), attacker (0,0)
    const StepEvents ev = step(s, c, Move::kLeft, {Move::kRight, false}, rng);
    CHECK_FALSE(ev.caught);
  }
}

TEST_CASE("caught attacker keeps deployed tools active") {
  GameConfig c = line_config();
  c.success_map.assign(9, 0.0);
  GameState s = initial_state(c, {0, 0});
  Rng rng(1);
  step(s, c, Move::kUp, {Move::kStay, true}, rng);  // tool at (0,0), defender (0,1)
  const StepEvents ev = step(s, c, Move::kStay, {Move::kRight, false}, rng);
  CHECK(ev.caught);
  CHECK_FALSE(s.terminal);
  step(s, c, Move::kLeft, {Move::kRight, true}, rng);
  CHECK(s.attacker_pos == Cell{0, 1});
  CHECK(s.tools_removed == 1);
  CHECK(s.terminal);
}

TEST_CASE("attacker returns home once out of tools") {
  GameConfig c = line_config();
  c.num_tools = 1;
  c.success_map.assign(9, 0.0);
  c.success_map[c.index({0, 1})] = 1.0;
  c.trigger_scale = 1.0;
  GameState s = initial_state(c, {0, 0});
  Rng rng(1);
  StepEvents ev = step(s, c, Move::kDown, {Move::kRight, true}, rng);
  REQUIRE(ev.triggered.size() == 1);
  CHECK(ev.defender_reward == doctest::Approx(c.rewards.attack_penalty[1]));
  ev = step(s, c, Move::kStay, {Move::kLeft, false}, rng);
  CHECK(ev.went_home);
  CHECK(s.terminal);
  CHECK_THROWS_AS(step(s, c, Move::kStay, {}, rng), std::logic_error);
}

TEST_CASE("tool-free stay attacker yields only catch rewards") {
  GameConfig c = line_config();
  c.num_tools = 0;
  c.attacker_returns_home = false;  // otherwise a tool-free attacker is home at once
  ScriptedAgent defender(Side::kDefender, {u(Move::kUp), u(Move::kLeft)});
  ScriptedAgent attacker(Side::kAttacker, {});
  const EpisodeResult r = rollout_episode(c, defender, attacker, 5);
  CHECK(r.defender_utility == doctest::Approx(c.rewards.catch_reward));
  ScriptedAgent idle(Side::kDefender, {});
  const EpisodeResult r2 = rollout_episode(c, idle, attacker, 5);
  CHECK(r2.defender_utility == 0.0);
}

TEST_CASE("rollouts are reproducible and bounded by the horizon") {
  const GameConfig c = standard_small_config();
  ScriptedAgent defender(Side::kDefender, {u(Move::kUp), u(Move::kLeft), u(Move::kDown), u(Move::kRight)});
  ScriptedAgent attacker(Side::kAttacker, {AttackerAction{Move::kRight, true}.encode(),
                                           AttackerAction{Move::kDown, true}.encode(),
                                           AttackerAction{Move::kStay, true}.encode()});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EpisodeResult a = rollout_episode(c, defender, attacker, seed);
    const EpisodeResult b = rollout_episode(c, defender, attacker, seed);
    CHECK(a.defender_utility == b.defender_utility);
    REQUIRE(a.replay.size() == b.replay.size());
    for (std::size_t i = 0; i < a.replay.size(); ++i) CHECK(to_json(a.replay[i]) == to_json(b.replay[i]));
    CHECK(a.replay.size() <= 4);
  }
  const EpisodeResult fixed = rollout_episode(c, defender, attacker, 1, Cell{2, 2});
  CHECK(fixed.entry == Cell{2, 2});
}

TEST_CASE("state encoding") {
  GameConfig c = make_square_config(5, MapKind::kUniform, 10, 2, 3);
  GameState s = initial_state(c, {0, 0});
  SUBCASE("initial observation") {
    const Eigen::VectorXd x = encode_state(observe(s, c, Side::kDefender), c);
    REQUIRE(x.size() == 5 * 5 * kStateChannels);
    double position = 0.0;
    for (int r = 0; r < 5; ++r) {
      for (int col = 0; col < 5; ++col) {
        for (int ch = 0; ch < 16; ++ch) CHECK(x(tensor_index(c, r, col, ch)) == 0.0);
        position += x(tensor_index(c, r, col, channel::kPosition));
        CHECK(x(tensor_index(c, r, col, channel::kTime)) == 0.0);
        CHECK(x(tensor_index(c, r, col, channel::kSuccess)) == c.success_map[std::size_t(r * 5 + col)]);
      }
    }
    CHECK(position == 1.0);
    CHECK(x(tensor_index(c, 2, 2, channel::kPosition)) == 1.0);
  }
  SUBCASE("time plane at the horizon") {
    Observation o = observe(s, c, Side::kDefender);
    o.t = c.horizon;
    const Eigen::VectorXd x = encode_state(o, c);
    for (int cell = 0; cell < 25; ++cell) CHECK(x(cell * kStateChannels + channel::kTime) == 1.0);
  }
  SUBCASE("one observed footprint") {
    Observation o = observe(s, c, Side::kDefender);
    o.opponent_memory.merge(c.index({2, 3}), FootprintGrid::entering_bit(Move::kLeft));
    const Eigen::VectorXd x = encode_state(o, c);
    int nonzero = 0;
    for (int cell = 0; cell < 25; ++cell) {
      for (int ch = 0; ch < 8; ++ch) nonzero += x(cell * kStateChannels + ch) != 0.0;
    }
    CHECK(nonzero == 1);
    CHECK(x(tensor_index(c, 2, 3, channel::kOpponentEntering + int(Move::kLeft))) == 1.0);
  }
  SUBCASE("float encoding matches double") {
    Eigen::VectorXf xf(state_tensor_size(c));
    encode_state(observe(s, c, Side::kAttacker), c, xf);
    const Eigen::VectorXd xd = encode_state(observe(s, c, Side::kAttacker), c);
    CHECK((xf.cast<double>() - xd).cwiseAbs().maxCoeff() < 1e-7);
  }
}

TEST_CASE("memory reflects traversal, not only the current cell") {
  const GameConfig c = line_config();
  GameState s = initial_state(c, {0, 0});
  Rng rng(1);
  step(s, c, Move::kStay, {Move::kRight, false}, rng);  // attacker footprints in (0,0) and (0,1)
  step(s, c, Move::kUp, {Move::kRight, false}, rng);    // defender into (0,1)
  const Observation o = observe(s, c, Side::kDefender);
  CHECK(o.opponent_memory.mask(c.index({0, 1})) != 0);
  CHECK(o.opponent_memory.mask(c.index({0, 0})) == 0);
  step(s, c, Move::kRight, {Move::kStay, false}, rng);
  const Observation later = observe(s, c, Side::kDefender);
  CHECK(later.opponent_memory.mask(c.index({0, 1})) == o.opponent_memory.mask(c.index({0, 1})));
  CHECK(later.current_mask == s.footprints_att.mask(c.index({0, 2})));
}

TEST_CASE("randomized simulator invariants") {
  const auto report = testing::run_invariant_suite(20000, 11);
  for (const auto& f : report.failures) INFO(f);
  CHECK(report.ok());
  CHECK(report.steps >= 20000);
}
