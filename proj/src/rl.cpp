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

#include "gsgi/rl.hpp"

#include <cmath>
#include <stdexcept>

#include "gsgi/encoding.hpp"

namespace gsgi::rl {

using Matrix = nn::RowMatrix<float>;

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  ++pushed_;
  if (data_.size() < capacity_) {
    data_.push_back(std::move(t));
    return;
  }
  data_[head_] = std::move(t);
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) throw std::out_of_range("replay index");
  return data_[(head_ + i) % data_.size()];
}

std::vector<std::size_t> ReplayBuffer::sample(std::size_t batch, Rng& rng) const {
  if (data_.empty()) throw std::logic_error("sampling from an empty replay buffer");
  std::vector<std::size_t> out(batch);
  for (auto& i : out) i = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(data_.size())));
  return out;
}

namespace {

Matrix stack(const std::vector<const Transition*>& batch, bool next) {
  const auto width = batch.front()->s.size();
  Matrix m(static_cast<Eigen::Index>(batch.size()), width);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const Transition& t = *batch[i];
    if (next && t.terminal) {
      m.row(static_cast<Eigen::Index>(i)).setZero();
    } else {
      m.row(static_cast<Eigen::Index>(i)) = (next ? t.s_next : t.s).transpose();
    }
  }
  return m;
}

}  // namespace

Eigen::VectorXf compute_td_targets(const std::vector<const Transition*>& batch, const QNetwork& online,
                                   const QNetwork& target, double gamma, TdRule rule) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Matrix next = stack(batch, true);
  const Matrix q_target = target.predict(next);
  Matrix q_online;
  if (rule == TdRule::kDouble) q_online = online.predict(next);
  Eigen::VectorXf y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = *batch[static_cast<std::size_t>(i)];
    if (t.terminal || gamma == 0.0) {
      y(i) = t.r;
      continue;
    }
    float boot;
    if (rule == TdRule::kMax) {
      boot = q_target.row(i).maxCoeff();
    } else {
      Eigen::Index best = 0;
      q_online.row(i).maxCoeff(&best);
      boot = q_target(i, best);
    }
    y(i) = t.r + static_cast<float>(gamma) * boot;
  }
  return y;
}

Variant parse_variant(const std::string& name) {
  if (name == "vanilla-double") return Variant::kVanillaDouble;
  if (name == "dueling-double") return Variant::kDuelingDouble;
  if (name == "actor-critic") return Variant::kActorCritic;
  throw ConfigError("unknown training variant '" + name + "'");
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kVanillaDouble: return "vanilla-double";
    case Variant::kDuelingDouble: return "dueling-double";
    case Variant::kActorCritic: return "actor-critic";
  }
  return "?";
}

void TrainingConfig::validate() const {
  if (!(lr > 0.0)) throw ConfigError("learning rate must be positive");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("discount must lie in [0, 1]");
  if (batch < 1) throw ConfigError("batch must be positive");
  if (target_update_steps < 1) throw ConfigError("target_update_steps must be positive");
  if (episodes < 1) throw ConfigError("training budget must be at least one episode");
  if (!(epsilon_floor >= 0.0 && epsilon_floor <= epsilon_start && epsilon_start <= 1.0)) {
    throw ConfigError("exploration schedule out of range");
  }
  if (epsilon_decay < 0.0 || epsilon_decay_every < 1) throw ConfigError("invalid epsilon decay");
  if (buffer_capacity < 1) throw ConfigError("buffer capacity must be positive");
  if (curve_every < 1) throw ConfigError("curve_every must be positive");
}

double TrainingConfig::epsilon(int episode) const {
  const double e = epsilon_start - epsilon_decay * static_cast<double>(episode / epsilon_decay_every);
  return std::max(e, epsilon_floor);
}

TrainingConfig training_profile(const std::string& name, int grid_size, Side learner) {
  TrainingConfig t;
  const bool def = learner == Side::kDefender;
  if (name == "desk") {
    switch (grid_size) {
      case 3:
        t.episodes = 20000;
        t.epsilon_decay_every = 500;
        t.buffer_capacity = def ? 10000 : 8000;
        t.lr = 5e-4;
        break;
      case 5:
        t.episodes = 50000;
        t.epsilon_decay_every = 1500;
        t.buffer_capacity = def ? 50000 : 40000;
        t.lr = 2e-4;
        break;
      case 7:
        t.episodes = 100000;
        t.epsilon_decay_every = 3000;
        t.buffer_capacity = def ? 200000 : 100000;
        t.lr = 1e-4;
        break;
      default: throw ConfigError("no desk profile for grid size " + std::to_string(grid_size));
    }
  } else if (name == "full") {
    switch (grid_size) {
      case 3:
        t.episodes = 100000;
        t.epsilon_decay_every = 5000;
        t.buffer_capacity = def ? 10000 : 8000;
        t.lr = 5e-5;
        break;
      case 5:
        t.episodes = 300000;
        t.epsilon_decay_every = 15000;
        t.buffer_capacity = def ? 50000 : 40000;
        t.lr = def ? 1e-4 : 5e-5;
        break;
      case 7:
        t.episodes = 300000;
        t.epsilon_decay_every = 15000;
        t.buffer_capacity = def ? 200000 : 100000;
        t.lr = def ? 1e-4 : 5e-5;
        break;
      default: throw ConfigError("no full profile for grid size " + std::to_string(grid_size));
    }
  } else {
    throw ConfigError("unknown training profile '" + name + "'");
  }
  t.curve_every = std::max(1, t.episodes / 40);
  return t;
}

nlohmann::json to_json(const TrainingConfig& t) {
  return {{"lr", t.lr},
          {"gamma", t.gamma},
          {"batch", t.batch},
          {"target_update_steps", t.target_update_steps},
          {"episodes", t.episodes},
          {"epsilon_start", t.epsilon_start},
          {"epsilon_decay", t.epsilon_decay},
          {"epsilon_decay_every", t.epsilon_decay_every},
          {"epsilon_floor", t.epsilon_floor},
          {"buffer_capacity", t.buffer_capacity},
          {"variant", to_string(t.variant)},
          {"double_q", t.double_q},
          {"curve_every", t.curve_every},
          {"value_lr", t.value_lr},
          {"seed", t.seed}};
}

TrainingConfig training_from_json(const nlohmann::json& j, TrainingConfig t) {
  try {
    if (j.contains("lr")) t.lr = j.at("lr").get<double>();
    if (j.contains("gamma")) t.gamma = j.at("gamma").get<double>();
    if (j.contains("batch")) t.batch = j.at("batch").get<int>();
    if (j.contains("target_update_steps")) t.target_update_steps = j.at("target_update_steps").get<int>();
    if (j.contains("episodes")) t.episodes = j.at("episodes").get<int>();
    if (j.contains("epsilon_start")) t.epsilon_start = j.at("epsilon_start").get<double>();
    if (j.contains("epsilon_decay")) t.epsilon_decay = j.at("epsilon_decay").get<double>();
    if (j.contains("epsilon_decay_every")) t.epsilon_decay_every = j.at("epsilon_decay_every").get<int>();
    if (j.contains("epsilon_floor")) t.epsilon_floor = j.at("epsilon_floor").get<double>();
    if (j.contains("buffer_capacity")) t.buffer_capacity = j.at("buffer_capacity").get<std::size_t>();
    if (j.contains("variant")) t.variant = parse_variant(j.at("variant").get<std::string>());
    if (j.contains("double_q")) t.double_q = j.at("double_q").get<bool>();
    if (j.contains("curve_every")) t.curve_every = j.at("curve_every").get<int>();
    if (j.contains("value_lr")) t.value_lr = j.at("value_lr").get<double>();
    if (j.contains("seed")) t.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("training config: ") + e.what());
  }
  t.validate();
  return t;
}

// --- training loop -----------------------------------------------------------

namespace {

int greedy(const QNetwork& net, const StateVector& x) {
  const Eigen::VectorXf q = net.predict_one(x);
  Eigen::Index best = 0;
  q.maxCoeff(&best);
  return static_cast<int>(best);
}

int grid_side(const GameConfig& config) {
  if (config.rows != config.cols) throw ConfigError("learning oracles need a square grid");
  return config.rows;
}

class DqnLearner {
 public:
  DqnLearner(const GameConfig& config, Side side, const TrainingConfig& t)
      : t_(t), buffer_(t.buffer_capacity), sample_rng_(t.seed, Stream::kReplay) {
    const auto head = t.variant == Variant::kDuelingDouble ? nn::HeadKind::kDueling : nn::HeadKind::kSingleQ;
    online_ = std::make_shared<QNetwork>(
        nn::build_network<float>(grid_side(config), head, num_actions(side), mix_seed(t.seed, 1)));
    target_ = *online_;
  }

  int act(const StateVector& x, double epsilon, Rng& rng) {
    if (rng.uniform() < epsilon) return rng.uniform_int(online_->spec().num_outputs);
    return greedy(*online_, x);
  }

  void store(Transition tr) {
    buffer_.push(std::move(tr));
    if (buffer_.size() < static_cast<std::size_t>(t_.batch)) return;
    const auto idx = buffer_.sample(static_cast<std::size_t>(t_.batch), sample_rng_);
    std::vector<const Transition*> batch;
    batch.reserve(idx.size());
    for (auto i : idx) batch.push_back(&buffer_.at(i));
    const Eigen::VectorXf y = compute_td_targets(batch, *online_, target_, t_.gamma,
                                                 t_.double_q ? TdRule::kDouble : TdRule::kMax);
    const Matrix q = online_->forward(stack(batch, false));
    Matrix dq = Matrix::Zero(q.rows(), q.cols());
    const float inv_n = 1.0f / static_cast<float>(batch.size());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
      const int a = batch[static_cast<std::size_t>(i)]->a;
      dq(i, a) = (q(i, a) - y(i)) * inv_n;
    }
    nn::apply_gradients(*online_, online_->backward(dq), adam_, t_.lr);
    if (++updates_ % t_.target_update_steps == 0) target_ = *online_;
  }

  std::shared_ptr<QNetwork> network() const { return online_; }
  const QNetwork& target() const { return target_; }
  long long updates() const { return updates_; }

 private:
  TrainingConfig t_;
  ReplayBuffer buffer_;
  Rng sample_rng_;
  std::shared_ptr<QNetwork> online_;
  QNetwork target_;
  nn::AdamState<float> adam_;
  long long updates_ = 0;
};

class ActorCriticLearner {
 public:
  ActorCriticLearner(const GameConfig& config, Side side, const TrainingConfig& t) : t_(t) {
    const int g = grid_side(config);
    policy_ = std::make_shared<QNetwork>(
        nn::build_network<float>(g, nn::HeadKind::kPolicySoftmax, num_actions(side), mix_seed(t.seed, 1)));
    value_ = nn::build_network<float>(g, nn::HeadKind::kScalarValue, 1, mix_seed(t.seed, 2));
  }

  int act(const StateVector& x, Rng& rng) {
    const Eigen::VectorXf p = policy_->predict_one(x);
    std::vector<double> w(p.data(), p.data() + p.size());
    return rng.categorical(w);
  }

  void finish_episode(const std::vector<Transition>& trajectory) {
    if (trajectory.empty()) return;
    actor_critic_update(*policy_, value_, trajectory, t_.gamma, t_.lr,
                        t_.value_lr > 0.0 ? t_.value_lr : t_.lr, state_);
    ++updates_;
  }

  std::shared_ptr<QNetwork> network() const { return policy_; }
  long long updates() const { return updates_; }

 private:
  TrainingConfig t_;
  std::shared_ptr<QNetwork> policy_;
  QNetwork value_;
  ActorCriticState state_;
  long long updates_ = 0;
};

}  // namespace

TrainingResult train_best_response(const GameConfig& config, Side learner, const PolicyMixture& opponent,
                                   const TrainingConfig& t, std::optional<Cell> entry) {
  t.validate();
  config.validate();
  if (opponent.policies.empty()) throw std::invalid_argument("opponent strategy list is empty");
  opponent.validate();
  if (opponent.side() == learner) throw std::invalid_argument("opponent must play the other side");

  const bool ac = t.variant == Variant::kActorCritic;
  std::optional<DqnLearner> dqn;
  std::optional<ActorCriticLearner> pg;
  if (ac) {
    pg.emplace(config, learner, t);
  } else {
    dqn.emplace(config, learner, t);
  }
  auto opp = opponent.make_agent(config);

  TrainingResult result;
  double window_sum = 0.0;
  int window_n = 0;
  std::vector<Transition> trajectory;
  StateVector x(state_tensor_size(config));

  for (int ep = 0; ep < t.episodes; ++ep) {
    Rng explore(t.seed, Stream::kTraining, static_cast<std::uint64_t>(ep));
    Rng triggers(mix_seed(t.seed, static_cast<std::uint64_t>(ep)), Stream::kTriggers);
    Rng opp_rng(t.seed, Stream::kOpponent, static_cast<std::uint64_t>(ep));
    const double eps = t.epsilon(ep);
    const Cell e = entry ? *entry
                         : config.entry_points[static_cast<std::size_t>(
                               explore.uniform_int(static_cast<int>(config.entry_points.size())))];
    GameState state = initial_state(config, e);
    opp->reset(opp_rng);
    trajectory.clear();

    std::optional<Transition> pending;
    double utility = 0.0;
    auto flush = [&](bool terminal, const StateVector* next) {
      if (!pending) return;
      pending->terminal = terminal;
      if (next) pending->s_next = *next;
      if (ac) {
        trajectory.push_back(std::move(*pending));
      } else {
        dqn->store(std::move(*pending));
      }
      pending.reset();
    };

    while (!state.terminal) {
      const bool learner_acts = learner == Side::kDefender || state.attacker_active();
      int learner_action = 0;
      if (learner_acts) {
        encode_state(observe(state, config, learner), config, x);
        flush(false, &x);
        learner_action = ac ? pg->act(x, explore) : dqn->act(x, eps, explore);
      }
      Move d = Move::kStay;
      AttackerAction a;
      if (learner == Side::kDefender) {
        d = static_cast<Move>(learner_action);
        if (state.attacker_active()) {
          a = AttackerAction::decode(opp->act(observe(state, config, Side::kAttacker), opp_rng));
        }
      } else {
        d = static_cast<Move>(opp->act(observe(state, config, Side::kDefender), opp_rng));
        if (learner_acts) a = AttackerAction::decode(learner_action);
      }
      const StepEvents ev = step(state, config, d, a, triggers);
      const double r = learner == Side::kDefender ? ev.defender_reward : -ev.defender_reward;
      utility += r;
      if (learner_acts) {
        pending = Transition{x, learner_action, static_cast<float>(r), StateVector(), false};
      } else if (pending) {
        pending->r += static_cast<float>(r);
      }
    }
    flush(true, nullptr);
    if (ac) pg->finish_episode(trajectory);

    window_sum += utility;
    ++window_n;
    if ((ep + 1) % t.curve_every == 0 || ep + 1 == t.episodes) {
      result.curve.push_back({ep + 1, window_sum / window_n, eps});
      window_sum = 0.0;
      window_n = 0;
    }
    result.env_steps += state.t;
  }
  result.network = ac ? pg->network() : dqn->network();
  result.updates = ac ? pg->updates() : dqn->updates();
  return result;
}

void actor_critic_update(QNetwork& policy, QNetwork& value, const std::vector<Transition>& trajectory,
                         double gamma, double policy_lr, double value_lr, ActorCriticState& state) {
  if (trajectory.empty()) return;
  if (policy.spec().head != nn::HeadKind::kPolicySoftmax || value.spec().head != nn::HeadKind::kScalarValue) {
    throw std::invalid_argument("actor-critic needs a softmax policy and a scalar value network");
  }
  std::vector<const Transition*> ptrs;
  for (const auto& t : trajectory) ptrs.push_back(&t);
  const Matrix s = stack(ptrs, false);
  const Matrix s_next = stack(ptrs, true);
  const Eigen::VectorXf v_next = value.predict(s_next).col(0);
  const auto n = static_cast<Eigen::Index>(trajectory.size());
  const float inv_n = 1.0f / static_cast<float>(n);

  const Matrix v = value.forward(s);
  Eigen::VectorXf adv(n);
  Matrix dv(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Transition& t = trajectory[static_cast<std::size_t>(i)];
    const float y = t.r + (t.terminal ? 0.0f : static_cast<float>(gamma) * v_next(i));
    adv(i) = y - v(i, 0);
    dv(i, 0) = (v(i, 0) - y) * inv_n;
  }
  if (!adv.allFinite()) throw std::domain_error("non-finite advantage");

  const Matrix p = policy.forward(s);
  Matrix dp = Matrix::Zero(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int a = trajectory[static_cast<std::size_t>(i)].a;
    dp(i, a) = -adv(i) / std::max(p(i, a), 1e-12f) * inv_n;
  }
  nn::apply_gradients(policy, policy.backward(dp), state.policy_adam, policy_lr);
  nn::apply_gradients(value, value.backward(dv), state.value_adam, value_lr);
}

PolicyPtr network_policy(std::string id, Side side, std::shared_ptr<const QNetwork> net) {
  return make_policy(std::move(id), side, QNetworkPolicy{std::move(net)});
}

}  // namespace gsgi::rl
