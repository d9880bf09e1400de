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
#include <optional>
#include <string>
#include <vector>

#include "gsgi/config.hpp"
#include "gsgi/nn/network.hpp"
#include "gsgi/nn/optimizer.hpp"
#include "gsgi/policies.hpp"

namespace gsgi::rl {

using nn::QNetwork;
using StateVector = Eigen::VectorXf;

struct Transition {
  StateVector s;
  int a = 0;
  float r = 0.0f;
  StateVector s_next;  // unused when terminal
  bool terminal = false;
};

/// Fixed-capacity FIFO ring with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return data_.size(); }
  std::size_t capacity() const { return capacity_; }
  /// i-th oldest stored transition.
  const Transition& at(std::size_t i) const;
  /// `batch` indices drawn uniformly with replacement.
  std::vector<std::size_t> sample(std::size_t batch, Rng& rng) const;
  std::uint64_t total_pushed() const { return pushed_; }

 private:
  std::size_t capacity_;
  std::vector<Transition> data_;
  std::size_t head_ = 0;  // oldest element once full
  std::uint64_t pushed_ = 0;
};

enum class TdRule { kMax, kDouble };

/// r + gamma * max_a' Q~(s', a') for kMax, r + gamma * Q~(s', argmax_a' Q(s', a'))
/// for kDouble; terminal transitions use r alone.
Eigen::VectorXf compute_td_targets(const std::vector<const Transition*>& batch, const QNetwork& online,
                                   const QNetwork& target, double gamma, TdRule rule);

enum class Variant { kVanillaDouble, kDuelingDouble, kActorCritic };

Variant parse_variant(const std::string& name);
std::string to_string(Variant v);

struct TrainingConfig {
  double lr = 5e-5;
  double gamma = 0.99;
  int batch = 32;
  int target_update_steps = 1000;
  int episodes = 20000;
  double epsilon_start = 1.0;
  double epsilon_decay = 0.05;
  int epsilon_decay_every = 500;
  double epsilon_floor = 0.1;
  std::size_t buffer_capacity = 10000;
  Variant variant = Variant::kDuelingDouble;
  bool double_q = true;
  int curve_every = 500;
  double value_lr = 0.0;  // actor-critic critic rate; 0 means use lr
  std::uint64_t seed = 0;

  void validate() const;
  double epsilon(int episode) const;
};

/// Budgets sized for a workstation ("desk") or for long runs ("full").
TrainingConfig training_profile(const std::string& name, int grid_size, Side learner);

nlohmann::json to_json(const TrainingConfig& t);
TrainingConfig training_from_json(const nlohmann::json& j, TrainingConfig base);

struct CurvePoint {
  int episode = 0;        // episodes completed
  double mean_utility = 0.0;  // learner's utility over the window
  double epsilon = 0.0;
};

struct TrainingResult {
  std::shared_ptr<QNetwork> network;
  std::vector<CurvePoint> curve;
  long long env_steps = 0;
  long long updates = 0;
};

/// Learns a best response of `learner` against the frozen `opponent` mixture.
/// The opponent component is redrawn every episode; `entry` fixes the attacker
/// entry (local mode).
TrainingResult train_best_response(const GameConfig& config, Side learner,
                                   const PolicyMixture& opponent, const TrainingConfig& training,
                                   std::optional<Cell> entry = std::nullopt);

/// One actor-critic step on a trajectory. `policy` has a softmax head,
/// `value` a scalar head. Advantage r + gamma V(s') - V(s) (terminal: r - V(s)).
struct ActorCriticState {
  nn::AdamState<float> policy_adam;
  nn::AdamState<float> value_adam;
};

void actor_critic_update(QNetwork& policy, QNetwork& value, const std::vector<Transition>& trajectory,
                         double gamma, double policy_lr, double value_lr, ActorCriticState& state);

/// Policy wrapper for a trained network.
PolicyPtr network_policy(std::string id, Side side, std::shared_ptr<const QNetwork> net);

}  // namespace gsgi::rl
