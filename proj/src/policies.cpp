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

#include "gsgi/policies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gsgi/encoding.hpp"

namespace gsgi {

DirectionFeatures direction_features(const Observation& obs, const GameConfig& config) {
  DirectionFeatures f;
  const int m = obs.position.row;
  const int n = obs.position.col;
  double up = 0, down = 0, left = 0, right = 0;
  for (int r = 0; r < config.rows; ++r) {
    for (int c = 0; c < config.cols; ++c) {
      const double p = config.success({r, c});
      if (r < m) up += p;
      if (r > m) down += p;
      if (c < n) left += p;
      if (c > n) right += p;
    }
  }
  auto mean = [](double sum, int count) { return count > 0 ? sum / count : 0.0; };
  f.avg_success[0] = mean(up, m * config.cols);
  f.avg_success[1] = mean(down, (config.rows - 1 - m) * config.cols);
  f.avg_success[2] = mean(left, n * config.rows);
  f.avg_success[3] = mean(right, (config.cols - 1 - n) * config.rows);
  f.avg_success[4] = config.success(obs.position);
  for (int d = 0; d < kNumDirections; ++d) {
    const auto side = static_cast<Move>(d);
    f.entering[d] = (obs.current_mask & FootprintGrid::entering_bit(side)) ? 1.0 : 0.0;
    f.leaving[d] = (obs.current_mask & FootprintGrid::leaving_bit(side)) ? 1.0 : 0.0;
  }
  return f;
}

std::array<double, kNumMoves> heuristic_move_distribution(const DirectionFeatures& f, double w_p,
                                                           double w_i, double w_o) {
  std::array<double, kNumMoves> z{};
  for (int k = 0; k < kNumMoves; ++k) {
    z[k] = w_p * f.avg_success[k] + w_i * f.entering[k] + w_o * f.leaving[k];
    if (!std::isfinite(z[k])) throw std::domain_error("non-finite heuristic logit");
  }
  const double top = *std::max_element(z.begin(), z.end());
  double total = 0.0;
  for (double& v : z) total += (v = std::exp(v - top));
  for (double& v : z) v /= total;
  return z;
}

double snare_placement_probability(const Observation& obs, const GameConfig& config, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("placement temperature must be positive");
  if (obs.tools_remaining <= 0) return 0.0;
  const double top = *std::max_element(config.success_map.begin(), config.success_map.end());
  double total = 0.0;
  for (double p : config.success_map) total += std::exp((p - top) / tau);
  return std::exp((config.success(obs.position) - top) / tau) / total;
}

// --- random sweeping -------------------------------------------------------

bool on_boundary(Cell c, const GameConfig& config) {
  return c.row == 0 || c.col == 0 || c.row == config.rows - 1 || c.col == config.cols - 1;
}

Move boundary_move(Cell c, const GameConfig& config, bool clockwise) {
  const int last_r = config.rows - 1, last_c = config.cols - 1;
  if (clockwise) {
    if (c.row == 0 && c.col < last_c) return Move::kRight;
    if (c.col == last_c && c.row < last_r) return Move::kDown;
    if (c.row == last_r && c.col > 0) return Move::kLeft;
    return Move::kUp;
  }
  if (c.row == 0 && c.col > 0) return Move::kLeft;
  if (c.col == 0 && c.row < last_r) return Move::kDown;
  if (c.row == last_r && c.col < last_c) return Move::kRight;
  return Move::kUp;
}

namespace {

bool on_edge(Cell c, Move edge, const GameConfig& config) {
  switch (edge) {
    case Move::kUp: return c.row == 0;
    case Move::kDown: return c.row == config.rows - 1;
    case Move::kLeft: return c.col == 0;
    case Move::kRight: return c.col == config.cols - 1;
    case Move::kStay: return true;
  }
  return true;
}

Move nearest_edge(Cell c, const GameConfig& config) {
  const std::array<int, 4> dist = {c.row, config.rows - 1 - c.row, c.col, config.cols - 1 - c.col};
  return static_cast<Move>(std::min_element(dist.begin(), dist.end()) - dist.begin());
}

bool following(const Observation& obs) { return !obs.attacker_caught && obs.current_mask != 0; }

}  // namespace

std::array<double, kNumMoves> sweep_distribution(const Observation& obs, const SweepState& state,
                                                 const GameConfig& config) {
  std::array<double, kNumMoves> p{};
  if (following(obs)) {
    // Follow a leaving footprint; with only entering ones, walk back along them.
    int count = 0;
    for (int d = 0; d < kNumDirections; ++d) {
      if (obs.current_mask & FootprintGrid::leaving_bit(static_cast<Move>(d))) p[d] = 1.0, ++count;
    }
    if (count == 0) {
      for (int d = 0; d < kNumDirections; ++d) {
        if (obs.current_mask & FootprintGrid::entering_bit(static_cast<Move>(d))) {
          p[static_cast<int>(opposite(static_cast<Move>(d)))] = 1.0;
          ++count;
        }
      }
    }
    for (double& v : p) v /= count;
    return p;
  }
  const Cell pos = obs.position;
  Move m;
  if (state.phase == SweepPhase::kToEdge && !on_edge(pos, state.edge, config)) {
    m = state.edge;
  } else if (on_boundary(pos, config)) {
    m = boundary_move(pos, config, state.clockwise);
  } else {
    m = nearest_edge(pos, config);
  }
  p[static_cast<int>(m)] = 1.0;
  return p;
}

void sweep_commit(const Observation& obs, SweepState& state, Move move, const GameConfig& config) {
  (void)move;
  if (following(obs)) {
    state.phase = SweepPhase::kFollow;
  } else if (state.phase == SweepPhase::kFollow ||
             (state.phase == SweepPhase::kToEdge && on_edge(obs.position, state.edge, config))) {
    state.phase = SweepPhase::kBoundary;
  }
}

Move random_sweep_action(const Observation& obs, SweepState& state, const GameConfig& config,
                         Rng& rng) {
  const auto p = sweep_distribution(obs, state, config);
  const auto m = static_cast<Move>(rng.categorical(p));
  sweep_commit(obs, state, m, config);
  return m;
}

// --- agents ----------------------------------------------------------------

namespace {

class HeuristicAttackerAgent final : public Agent {
 public:
  HeuristicAttackerAgent(HeuristicAttackerParams params, const GameConfig& config)
      : Agent(Side::kAttacker), params_(params), config_(&config) {}

  void distribution(const Observation& obs, std::span<double> probs) const override {
    const auto moves = heuristic_move_distribution(direction_features(obs, *config_), params_.w_p,
                                                   params_.w_i, params_.w_o);
    const double place = snare_placement_probability(obs, *config_, params_.tau);
    for (int m = 0; m < kNumMoves; ++m) {
      probs[static_cast<std::size_t>(m)] = moves[m] * (1.0 - place);
      probs[static_cast<std::size_t>(m + kNumMoves)] = moves[m] * place;
    }
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<HeuristicAttackerAgent>(*this); }

 private:
  HeuristicAttackerParams params_;
  const GameConfig* config_;
};

class HeuristicDefenderAgent final : public Agent {
 public:
  HeuristicDefenderAgent(HeuristicDefenderParams params, const GameConfig& config)
      : Agent(Side::kDefender), params_(params), config_(&config) {}

  void distribution(const Observation& obs, std::span<double> probs) const override {
    const auto moves = heuristic_move_distribution(direction_features(obs, *config_), params_.w_p,
                                                   params_.w_i, params_.w_o);
    std::copy(moves.begin(), moves.end(), probs.begin());
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<HeuristicDefenderAgent>(*this); }

 private:
  HeuristicDefenderParams params_;
  const GameConfig* config_;
};

class RandomSweepAgent final : public Agent {
 public:
  explicit RandomSweepAgent(const GameConfig& config) : Agent(Side::kDefender), config_(&config) {}

  void reset(Rng& rng) override {
    if (pinned_) {
      state_ = {SweepPhase::kToEdge, state_.edge, state_.clockwise};
      return;
    }
    state_ = {};
    state_.edge = static_cast<Move>(rng.uniform_int(kNumDirections));
    state_.clockwise = rng.uniform_int(2) == 0;
  }
  std::vector<WeightedAgent> episode_variants() const override {
    std::vector<WeightedAgent> out;
    if (pinned_) {
      out.push_back({1.0, clone()});
      return out;
    }
    for (int e = 0; e < kNumDirections; ++e) {
      for (bool cw : {true, false}) {
        auto a = std::make_unique<RandomSweepAgent>(*config_);
        a->state_ = {SweepPhase::kToEdge, static_cast<Move>(e), cw};
        a->pinned_ = true;
        out.push_back({1.0 / (2 * kNumDirections), std::move(a)});
      }
    }
    return out;
  }
  void distribution(const Observation& obs, std::span<double> probs) const override {
    const auto p = sweep_distribution(obs, state_, *config_);
    std::copy(p.begin(), p.end(), probs.begin());
  }
  void commit(const Observation& obs, int action) override {
    sweep_commit(obs, state_, static_cast<Move>(action), *config_);
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<RandomSweepAgent>(*this); }

 private:
  const GameConfig* config_;
  SweepState state_;
  bool pinned_ = false;  // fixed edge and direction
};

class QNetworkAgent final : public Agent {
 public:
  QNetworkAgent(Side side, std::shared_ptr<const nn::QNetwork> net, const GameConfig& config)
      : Agent(side), net_(std::move(net)), config_(&config) {
    if (!net_) throw std::invalid_argument("q-network policy without a network");
    if (net_->spec().output_size() != num_actions(side)) {
      throw std::invalid_argument("q-network output size does not match the side's action count");
    }
    if (net_->spec().input_size() != state_tensor_size(config)) {
      throw std::invalid_argument("q-network input does not match the grid");
    }
  }

  void distribution(const Observation& obs, std::span<double> probs) const override {
    std::fill(probs.begin(), probs.end(), 0.0);
    probs[static_cast<std::size_t>(greedy(obs))] = 1.0;
  }
  int act(const Observation& obs, Rng&) override { return greedy(obs); }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<QNetworkAgent>(*this); }

 private:
  int greedy(const Observation& obs) const {
    Eigen::VectorXf x(state_tensor_size(*config_));
    encode_state(obs, *config_, x);
    const Eigen::VectorXf q = net_->predict_one(x);
    Eigen::Index best = 0;
    q.maxCoeff(&best);
    return static_cast<int>(best);
  }

  std::shared_ptr<const nn::QNetwork> net_;
  const GameConfig* config_;
};

class UniformAgent final : public Agent {
 public:
  using Agent::Agent;
  void distribution(const Observation&, std::span<double> probs) const override {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
  }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<UniformAgent>(*this); }
};

class MixtureAgent final : public Agent {
 public:
  MixtureAgent(const PolicyMixture& mixture, const GameConfig& config)
      : Agent(mixture.side()), weights_(mixture.weights) {
    for (const auto& p : mixture.policies) components_.push_back(gsgi::make_agent(*p, config));
  }
  MixtureAgent(const MixtureAgent& other) : Agent(other.side()), weights_(other.weights_), active_(other.active_) {
    for (const auto& c : other.components_) components_.push_back(c->clone());
  }

  void reset(Rng& rng) override {
    active_ = static_cast<std::size_t>(rng.categorical(weights_));
    components_[active_]->reset(rng);
  }
  std::vector<WeightedAgent> episode_variants() const override {
    std::vector<WeightedAgent> out;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (weights_[i] <= 0.0) continue;
      for (auto& v : components_[i]->episode_variants()) {
        out.push_back({weights_[i] * v.weight, std::move(v.agent)});
      }
    }
    return out;
  }
  void distribution(const Observation& obs, std::span<double> probs) const override {
    components_[active_]->distribution(obs, probs);
  }
  void commit(const Observation& obs, int action) override { components_[active_]->commit(obs, action); }
  int act(const Observation& obs, Rng& rng) override { return components_[active_]->act(obs, rng); }
  std::unique_ptr<Agent> clone() const override { return std::make_unique<MixtureAgent>(*this); }

 private:
  std::vector<std::unique_ptr<Agent>> components_;
  std::vector<double> weights_;
  std::size_t active_ = 0;
};

}  // namespace

PolicyPtr make_policy(std::string id, Side side, PolicyKind kind) {
  auto p = std::make_shared<PurePolicy>();
  p->id = std::move(id);
  p->side = side;
  p->kind = std::move(kind);
  if (std::holds_alternative<HeuristicAttackerPolicy>(p->kind) && side != Side::kAttacker) {
    throw std::invalid_argument("heuristic attacker policy registered for the defender");
  }
  if ((std::holds_alternative<RandomSweepPolicy>(p->kind) ||
       std::holds_alternative<HeuristicDefenderPolicy>(p->kind)) &&
      side != Side::kDefender) {
    throw std::invalid_argument("defender heuristic registered for the attacker");
  }
  return p;
}

std::unique_ptr<Agent> make_agent(const PurePolicy& policy, const GameConfig& config) {
  struct Visitor {
    const PurePolicy& policy;
    const GameConfig& config;
    std::unique_ptr<Agent> operator()(const HeuristicAttackerPolicy& h) const {
      return std::make_unique<HeuristicAttackerAgent>(h.params, config);
    }
    std::unique_ptr<Agent> operator()(const RandomSweepPolicy&) const {
      return std::make_unique<RandomSweepAgent>(config);
    }
    std::unique_ptr<Agent> operator()(const HeuristicDefenderPolicy& h) const {
      return std::make_unique<HeuristicDefenderAgent>(h.params, config);
    }
    std::unique_ptr<Agent> operator()(const QNetworkPolicy& q) const {
      return std::make_unique<QNetworkAgent>(policy.side, q.network, config);
    }
    std::unique_ptr<Agent> operator()(const UniformRandomPolicy&) const {
      return std::make_unique<UniformAgent>(policy.side);
    }
  };
  return std::visit(Visitor{policy, config}, policy.kind);
}

std::string kind_name(const PurePolicy& policy) {
  static constexpr const char* kNames[] = {"heuristic-attacker", "random-sweep", "heuristic-defender",
                                           "q-network", "uniform-random"};
  return kNames[policy.kind.index()];
}

nlohmann::json describe(const PurePolicy& policy) {
  nlohmann::json j = {{"id", policy.id}, {"side", to_string(policy.side)}, {"kind", kind_name(policy)}};
  if (const auto* h = std::get_if<HeuristicAttackerPolicy>(&policy.kind)) {
    j["params"] = {{"w_p", h->params.w_p}, {"w_i", h->params.w_i}, {"w_o", h->params.w_o},
                   {"tau", h->params.tau}};
  } else if (const auto* d = std::get_if<HeuristicDefenderPolicy>(&policy.kind)) {
    j["params"] = {{"w_p", d->params.w_p}, {"w_i", d->params.w_i}, {"w_o", d->params.w_o}};
  }
  return j;
}

PolicyMixture PolicyMixture::uniform(std::vector<PolicyPtr> ps) {
  PolicyMixture m;
  m.weights.assign(ps.size(), ps.empty() ? 0.0 : 1.0 / static_cast<double>(ps.size()));
  m.policies = std::move(ps);
  return m;
}

Side PolicyMixture::side() const {
  if (policies.empty()) throw std::invalid_argument("empty policy mixture");
  return policies.front()->side;
}

void PolicyMixture::validate() const {
  if (policies.empty()) throw std::invalid_argument("empty policy mixture");
  if (policies.size() != weights.size()) throw std::invalid_argument("mixture weight count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    if (!policies[i]) throw std::invalid_argument("null policy in mixture");
    if (policies[i]->side != policies.front()->side) {
      throw std::invalid_argument("mixture mixes defender and attacker policies");
    }
    if (!(weights[i] >= 0.0)) throw std::invalid_argument("negative mixture weight");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture weights must sum to 1");
}

std::unique_ptr<Agent> PolicyMixture::make_agent(const GameConfig& config) const {
  validate();
  if (policies.size() == 1) return gsgi::make_agent(*policies.front(), config);
  return std::make_unique<MixtureAgent>(*this, config);
}

UtilityStats summarize(const std::vector<double>& utilities) {
  UtilityStats s;
  s.episodes = static_cast<int>(utilities.size());
  if (utilities.empty()) return s;
  s.mean = std::accumulate(utilities.begin(), utilities.end(), 0.0) / s.episodes;
  double ss = 0.0;
  for (double u : utilities) ss += (u - s.mean) * (u - s.mean);
  s.stddev = s.episodes > 1 ? std::sqrt(ss / (s.episodes - 1)) : 0.0;
  s.std_error = s.stddev / std::sqrt(static_cast<double>(s.episodes));
  return s;
}

UtilityStats evaluate_matchup(const GameConfig& config, const PolicyMixture& defender,
                              const PolicyMixture& attacker, int episodes, std::uint64_t seed,
                              std::optional<Cell> entry) {
  if (episodes < 1) throw std::invalid_argument("episodes must be positive");
  if (defender.side() != Side::kDefender || attacker.side() != Side::kAttacker) {
    throw std::invalid_argument("evaluate_matchup expects (defender, attacker) mixtures");
  }
  auto d = defender.make_agent(config);
  auto a = attacker.make_agent(config);
  std::vector<double> utilities;
  utilities.reserve(static_cast<std::size_t>(episodes));
  for (int i = 0; i < episodes; ++i) {
    const auto result = rollout_episode(config, *d, *a, mix_seed(seed, static_cast<std::uint64_t>(i)),
                                        entry, false);
    utilities.push_back(result.defender_utility);
  }
  return summarize(utilities);
}

// --- grid search -------------------------------------------------------------

std::vector<double> GridRange::points() const {
  if (!(step > 0.0) || hi < lo) throw std::invalid_argument("invalid grid range");
  const auto n = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(lo + i * step);
  return out;
}

std::size_t grid_search_size(const GridRange& w_p, const GridRange& w_i, const GridRange& w_o) {
  return w_p.points().size() * w_i.points().size() * w_o.points().size();
}

GridSearchResult grid_search_defender_params(const GameConfig& config, const PolicyMixture& opponent,
                                             const GridRange& w_p, const GridRange& w_i,
                                             const GridRange& w_o, int episodes_per_point,
                                             std::uint64_t seed) {
  if (episodes_per_point < 1) throw std::invalid_argument("episodes_per_point must be positive");
  GridSearchResult result;
  bool first = true;
  for (double p : w_p.points()) {
    for (double i : w_i.points()) {
      for (double o : w_o.points()) {
        const HeuristicDefenderParams params{p, i, o};
        auto policy = make_policy("heuristic-defender", Side::kDefender, HeuristicDefenderPolicy{params});
        const UtilityStats stats = evaluate_matchup(config, PolicyMixture::pure(policy), opponent,
                                                    episodes_per_point, seed);
        result.rows.push_back({params, stats});
        if (first || stats.mean > result.best_stats.mean) {
          result.best = params;
          result.best_stats = stats;
          first = false;
        }
      }
    }
  }
  return result;
}

}  // namespace gsgi
