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

#include "gsgi/rl.hpp"

using namespace gsgi;
using namespace gsgi::rl;

namespace {

/// Network on a length-n input with no trunk: outputs = x W + b.
QNetwork linear_net(nn::HeadKind head, int inputs, int outputs) {
  nn::NetworkSpec spec;
  spec.channels = inputs;
  spec.head = head;
  spec.num_outputs = outputs;
  return QNetwork(spec);
}

/// Sets the head bias, leaving all weights zero, so outputs are constant.
void set_bias(QNetwork& net, std::initializer_list<float> values) {
  const auto& b = net.head_blocks()[0];
  int i = 0;
  for (float v : values) net.params()(b.offset + b.rows * b.cols + i++) = v;
}

Transition make_transition(float r, bool terminal, int a = 0, int width = 1) {
  Transition t;
  t.s = StateVector::Ones(width);
  t.s_next = StateVector::Ones(width);
  t.a = a;
  t.r = r;
  t.terminal = terminal;
  return t;
}

}  // namespace

TEST_CASE("td targets") {
  QNetwork online = linear_net(nn::HeadKind::kSingleQ, 1, 2);
  QNetwork target = linear_net(nn::HeadKind::kSingleQ, 1, 2);
  set_bias(online, {1.0f, 3.0f});
  set_bias(target, {5.0f, 2.0f});
  const Transition live = make_transition(1.0f, false);
  const Transition done = make_transition(1.0f, true);
  const std::vector<const Transition*> batch{&live, &done};
  SUBCASE("double and max rules") {
    const auto dbl = compute_td_targets(batch, online, target, 0.9, TdRule::kDouble);
    const auto max = compute_td_targets(batch, online, target, 0.9, TdRule::kMax);
    CHECK(dbl(0) == doctest::Approx(2.8));
    CHECK(max(0) == doctest::Approx(5.5));
    CHECK(dbl(0) <= max(0));
    CHECK(dbl(1) == doctest::Approx(1.0));
    CHECK(max(1) == doctest::Approx(1.0));
  }
  SUBCASE("zero discount") {
    const auto t = compute_td_targets(batch, online, target, 0.0, TdRule::kDouble);
    CHECK(t(0) == doctest::Approx(1.0));
    CHECK(t(1) == doctest::Approx(1.0));
  }
}

TEST_CASE("replay buffer is a FIFO ring") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) buf.push(make_transition(static_cast<float>(i), false));
  CHECK(buf.size() == 3);
  CHECK(buf.total_pushed() == 5);
  for (std::size_t i = 0; i < 3; ++i) CHECK(buf.at(i).r == static_cast<float>(i + 2));
  Rng rng(1);
  for (std::size_t idx : buf.sample(100, rng)) CHECK(idx < 3);
}

TEST_CASE("exploration schedule") {
  TrainingConfig t;
  t.epsilon_decay_every = 100;
  CHECK(t.epsilon(0) == 1.0);
  CHECK(t.epsilon(99) == 1.0);
  CHECK(t.epsilon(100) == doctest::Approx(0.95));
  CHECK(t.epsilon(18 * 100) == 0.1);
  for (int ep = 1800; ep < 5000; ep += 37) CHECK(t.epsilon(ep) == 0.1);
  TrainingConfig bad;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = TrainingConfig{};
  bad.episodes = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("training config json round trip") {
  TrainingConfig t = training_profile("desk", 3, Side::kAttacker);
  t.seed = 77;
  t.variant = Variant::kActorCritic;
  const TrainingConfig back = training_from_json(to_json(t), TrainingConfig{});
  CHECK(back.lr == t.lr);
  CHECK(back.episodes == t.episodes);
  CHECK(back.seed == 77);
  CHECK(back.variant == Variant::kActorCritic);
  CHECK(parse_variant(to_string(Variant::kVanillaDouble)) == Variant::kVanillaDouble);
}

TEST_CASE("training is reproducible") {
  const GameConfig c = standard_small_config();
  const PolicyMixture opponent = PolicyMixture::pure(make_policy("att", Side::kAttacker, HeuristicAttackerPolicy{}));
  TrainingConfig t = training_profile("desk", 3, Side::kDefender);
  t.episodes = 60;
  t.curve_every = 20;
  t.target_update_steps = 25;
  t.seed = 5;
  const auto a = train_best_response(c, Side::kDefender, opponent, t);
  const auto b = train_best_response(c, Side::kDefender, opponent, t);
  CHECK(a.network->params() == b.network->params());
  REQUIRE(a.curve.size() == b.curve.size());
  CHECK(a.curve.size() == 3);
  for (std::size_t i = 0; i < a.curve.size(); ++i) CHECK(a.curve[i].mean_utility == b.curve[i].mean_utility);
  CHECK(a.updates > 0);
  t.seed = 6;
  CHECK(train_best_response(c, Side::kDefender, opponent, t).network->params() != a.network->params());
  CHECK_THROWS(train_best_response(c, Side::kDefender, PolicyMixture{}, t));
  CHECK_THROWS(train_best_response(c, Side::kAttacker, opponent, t));
}

TEST_CASE("actor-critic variant trains and stays reproducible") {
  const GameConfig c = standard_small_config();
  const PolicyMixture opponent = PolicyMixture::pure(make_policy("sweep", Side::kDefender, RandomSweepPolicy{}));
  TrainingConfig t = training_profile("desk", 3, Side::kAttacker);
  t.variant = Variant::kActorCritic;
  t.episodes = 30;
  t.curve_every = 10;
  const auto a = train_best_response(c, Side::kAttacker, opponent, t);
  const auto b = train_best_response(c, Side::kAttacker, opponent, t);
  CHECK(a.network->spec().head == nn::HeadKind::kPolicySoftmax);
  CHECK(a.network->params() == b.network->params());
}

TEST_CASE("actor-critic update") {
  ActorCriticState st;
  SUBCASE("zero advantage leaves the policy unchanged") {
    QNetwork policy = linear_net(nn::HeadKind::kPolicySoftmax, 1, 2);
    policy.initialize(3);
    QNetwork value = linear_net(nn::HeadKind::kScalarValue, 1, 1);
    const auto before = policy.params();
    std::vector<Transition> traj{make_transition(0.0f, false, 1), make_transition(0.0f, true, 0)};
    actor_critic_update(policy, value, traj, 0.9, 1e-2, 1e-2, st);
    CHECK(policy.params() == before);
  }
  SUBCASE("positive advantage raises the chosen action") {
    QNetwork policy = linear_net(nn::HeadKind::kPolicySoftmax, 1, 2);
    QNetwork value = linear_net(nn::HeadKind::kScalarValue, 1, 1);
    const StateVector s = StateVector::Ones(1);
    const float p0 = policy.predict_one(s)(0);
    CHECK(p0 == doctest::Approx(0.5));
    actor_critic_update(policy, value, {make_transition(1.0f, true, 0)}, 0.9, 1e-2, 1e-2, st);
    CHECK(policy.predict_one(s)(0) > p0);
  }
  SUBCASE("exact values are a fixed point of the critic") {
    // Chain s0 -> s1 -> end with rewards 1 and 2, gamma 0.5: V(s1) = 2, V(s0) = 1 + 0.5 * 2 = 2.
    QNetwork policy = linear_net(nn::HeadKind::kPolicySoftmax, 2, 2);
    QNetwork value = linear_net(nn::HeadKind::kScalarValue, 2, 1);
    const auto& w = value.head_blocks()[0];
    value.params()(w.offset) = 2.0f;
    value.params()(w.offset + 1) = 2.0f;
    Transition first, second;
    first.s = StateVector::Unit(2, 0);
    first.s_next = StateVector::Unit(2, 1);
    first.r = 1.0f;
    second.s = StateVector::Unit(2, 1);
    second.s_next = StateVector::Zero(2);
    second.r = 2.0f;
    second.terminal = true;
    const auto before = value.params();
    const auto policy_before = policy.params();
    actor_critic_update(policy, value, {first, second}, 0.5, 1e-2, 1e-2, st);
    CHECK((value.params() - before).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(policy.params() == policy_before);
  }
  SUBCASE("network heads are checked") {
    QNetwork q = linear_net(nn::HeadKind::kSingleQ, 1, 2);
    QNetwork value = linear_net(nn::HeadKind::kScalarValue, 1, 1);
    CHECK_THROWS(actor_critic_update(q, value, {make_transition(1.0f, true)}, 0.9, 1e-2, 1e-2, st));
  }
}
