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

#include "gsgi/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gsgi::exact {

namespace {

bool is_decision(NodeKind k) { return k == NodeKind::kDefender || k == NodeKind::kAttacker; }

Side owner_of(NodeKind k) { return k == NodeKind::kDefender ? Side::kDefender : Side::kAttacker; }

double sign_of(Side side) { return side == Side::kDefender ? 1.0 : -1.0; }

void check_size(const GameTree& tree, const Profile& p) {
  if (p.size() != tree.profile_size()) throw std::invalid_argument("profile size does not match the tree");
}

}  // namespace

Profile uniform_profile(const GameTree& tree) {
  Profile p(tree.profile_size());
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    for (int a = 0; a < info.num_actions; ++a) p[info.offset + static_cast<std::uint32_t>(a)] = 1.0 / info.num_actions;
  }
  return p;
}

void validate_profile(const GameTree& tree, const Profile& profile, std::optional<Side> side) {
  check_size(tree, profile);
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    if (side && info.owner != *side) continue;
    double total = 0.0;
    for (int a = 0; a < info.num_actions; ++a) {
      const double p = profile[info.offset + static_cast<std::uint32_t>(a)];
      if (!(p >= 0.0)) throw std::invalid_argument("negative or non-finite probability in profile");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("profile does not sum to 1 at infoset " + std::to_string(i));
    }
  }
}

double expected_value(const GameTree& tree, const Profile& profile) {
  check_size(tree, profile);
  // Children always follow their parent, so one backward sweep suffices.
  std::vector<double> v(tree.num_nodes(), 0.0);
  for (std::uint32_t n = tree.num_nodes(); n-- > 0;) {
    const NodeKind k = tree.kind(n);
    if (k == NodeKind::kTerminal) {
      v[n] = tree.payoff(n);
      continue;
    }
    double sum = 0.0;
    if (k == NodeKind::kChance) {
      for (int c = 0; c < tree.num_children(n); ++c) sum += tree.chance_prob(n, c) * v[tree.child(n, c)];
    } else {
      const std::uint32_t off = tree.infoset(tree.infoset_of(n)).offset;
      for (int c = 0; c < tree.num_children(n); ++c) sum += profile[off + static_cast<std::uint32_t>(c)] * v[tree.child(n, c)];
    }
    v[n] = sum;
  }
  return v[0];
}

namespace {

class BestResponder {
 public:
  BestResponder(const GameTree& tree, const Profile& opponent, Side side)
      : tree_(tree), opp_(opponent), side_(side), sign_(sign_of(side)),
        reach_(tree.num_nodes(), 0.0), value_(tree.num_nodes(), kUnset),
        best_(tree.num_infosets(), -2) {
    reach_[0] = 1.0;
    for (std::uint32_t n = 0; n < tree.num_nodes(); ++n) {
      const NodeKind k = tree.kind(n);
      if (k == NodeKind::kTerminal) continue;
      const double r = reach_[n];
      for (int c = 0; c < tree.num_children(n); ++c) {
        double w = 1.0;
        if (k == NodeKind::kChance) {
          w = tree.chance_prob(n, c);
        } else if (owner_of(k) != side) {
          w = opp_[tree.infoset(tree.infoset_of(n)).offset + static_cast<std::uint32_t>(c)];
        }
        reach_[tree.child(n, c)] = r * w;
      }
    }
  }

  BestResponse run() {
    BestResponse br;
    br.side = side_;
    br.value = value(0);
    br.actions.assign(tree_.num_infosets(), -1);
    for (std::uint32_t i = 0; i < tree_.num_infosets(); ++i) {
      if (tree_.infoset(i).owner == side_) br.actions[i] = best(i);
    }
    return br;
  }

 private:
  static constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

  double value(std::uint32_t n) {
    if (!std::isnan(value_[n])) return value_[n];
    const NodeKind k = tree_.kind(n);
    double v = 0.0;
    if (k == NodeKind::kTerminal) {
      v = sign_ * tree_.payoff(n);
    } else if (k == NodeKind::kChance) {
      for (int c = 0; c < tree_.num_children(n); ++c) v += tree_.chance_prob(n, c) * value(tree_.child(n, c));
    } else if (owner_of(k) != side_) {
      const std::uint32_t off = tree_.infoset(tree_.infoset_of(n)).offset;
      for (int c = 0; c < tree_.num_children(n); ++c) {
        const double p = opp_[off + static_cast<std::uint32_t>(c)];
        if (p > 0.0) v += p * value(tree_.child(n, c));
      }
    } else {
      v = value(tree_.child(n, best(tree_.infoset_of(n))));
    }
    value_[n] = v;
    return v;
  }

  int best(std::uint32_t set) {
    if (best_[set] >= 0) return best_[set];
    if (best_[set] == -3) throw std::logic_error("infoset depends on itself; the tree lacks perfect recall");
    best_[set] = -3;
    const int actions = tree_.infoset(set).num_actions;
    std::vector<double> q(static_cast<std::size_t>(actions), 0.0);
    for (std::uint32_t m : tree_.members(set)) {
      for (int a = 0; a < actions; ++a) q[static_cast<std::size_t>(a)] += reach_[m] * value(tree_.child(m, a));
    }
    int arg = 0;
    for (int a = 1; a < actions; ++a) {
      if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(arg)]) arg = a;
    }
    best_[set] = arg;
    return arg;
  }

  const GameTree& tree_;
  const Profile& opp_;
  Side side_;
  double sign_;
  std::vector<double> reach_;
  std::vector<double> value_;
  std::vector<int> best_;  // -2 unvisited, -3 in progress
};

}  // namespace

BestResponse exact_best_response(const GameTree& tree, const Profile& opponent, Side side) {
  check_size(tree, opponent);
  return BestResponder(tree, opponent, side).run();
}

Profile apply_pure(const GameTree& tree, Profile base, const BestResponse& br) {
  check_size(tree, base);
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    if (info.owner != br.side) continue;
    for (int a = 0; a < info.num_actions; ++a) {
      base[info.offset + static_cast<std::uint32_t>(a)] = a == br.actions[i] ? 1.0 : 0.0;
    }
  }
  return base;
}

double exploitability(const GameTree& tree, const Profile& profile) {
  validate_profile(tree, profile);
  return exact_best_response(tree, profile, Side::kDefender).value +
         exact_best_response(tree, profile, Side::kAttacker).value;
}

double pure_policy_value(const GameTree& tree, const Profile& opponent, Side side, std::span<const int> actions) {
  check_size(tree, opponent);
  if (actions.size() != tree.num_infosets()) throw std::invalid_argument("one action per infoset expected");
  const double sign = sign_of(side);
  auto rec = [&](auto&& self, std::uint32_t n) -> double {
    const NodeKind k = tree.kind(n);
    if (k == NodeKind::kTerminal) return sign * tree.payoff(n);
    if (k == NodeKind::kChance) {
      double v = 0.0;
      for (int c = 0; c < tree.num_children(n); ++c) v += tree.chance_prob(n, c) * self(self, tree.child(n, c));
      return v;
    }
    const std::uint32_t set = tree.infoset_of(n);
    if (owner_of(k) == side) {
      const int a = actions[set];
      if (a < 0 || a >= tree.num_children(n)) throw std::invalid_argument("pure policy misses a reachable infoset");
      return self(self, tree.child(n, a));
    }
    const std::uint32_t off = tree.infoset(set).offset;
    double v = 0.0;
    for (int c = 0; c < tree.num_children(n); ++c) {
      const double p = opponent[off + static_cast<std::uint32_t>(c)];
      if (p > 0.0) v += p * self(self, tree.child(n, c));
    }
    return v;
  };
  return rec(rec, 0);
}

std::vector<std::vector<int>> enumerate_pure_policies(const GameTree& tree, Side side, std::size_t cap) {
  // Own sequences are profile slots; `root` stands for the empty sequence.
  const std::uint32_t root = tree.profile_size();
  std::vector<std::uint32_t> last(tree.num_nodes(), root);
  std::vector<std::vector<std::uint32_t>> next(root + 1);
  for (std::uint32_t n = 0; n < tree.num_nodes(); ++n) {
    const NodeKind k = tree.kind(n);
    if (k == NodeKind::kTerminal) continue;
    const bool own = is_decision(k) && owner_of(k) == side;
    if (own) {
      const std::uint32_t set = tree.infoset_of(n);
      auto& list = next[last[n]];
      if (std::find(list.begin(), list.end(), set) == list.end()) list.push_back(set);
    }
    for (int c = 0; c < tree.num_children(n); ++c) {
      last[tree.child(n, c)] = own ? tree.infoset(tree.infoset_of(n)).offset + static_cast<std::uint32_t>(c) : last[n];
    }
  }

  std::vector<std::vector<int>> out;
  std::vector<int> actions(tree.num_infosets(), -1);
  std::vector<std::uint32_t> pending(next[root].rbegin(), next[root].rend());
  auto rec = [&](auto&& self) -> void {
    if (pending.empty()) {
      if (out.size() >= cap) {
        throw BudgetError("more than " + std::to_string(cap) + " reduced pure policies", static_cast<double>(cap + 1));
      }
      out.push_back(actions);
      return;
    }
    const std::uint32_t set = pending.back();
    pending.pop_back();
    const auto& info = tree.infoset(set);
    for (int a = 0; a < info.num_actions; ++a) {
      actions[set] = a;
      const auto& follow = next[info.offset + static_cast<std::uint32_t>(a)];
      pending.insert(pending.end(), follow.rbegin(), follow.rend());
      self(self);
      pending.resize(pending.size() - follow.size());
    }
    actions[set] = -1;
    pending.push_back(set);
  };
  rec(rec);
  return out;
}

Profile mix_profiles(const GameTree& tree, Side side, std::span<const Profile> profiles,
                     std::span<const double> weights) {
  if (profiles.empty() || profiles.size() != weights.size()) throw std::invalid_argument("mixture size mismatch");
  Profile mixed(tree.profile_size(), 0.0);
  std::vector<double> denom(tree.num_infosets(), 0.0);
  std::vector<double> reach(tree.num_nodes());
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const Profile& p = profiles[k];
    check_size(tree, p);
    if (weights[k] <= 0.0) continue;
    reach[0] = weights[k];
    std::vector<char> done(tree.num_infosets(), 0);
    for (std::uint32_t n = 0; n < tree.num_nodes(); ++n) {
      const NodeKind kd = tree.kind(n);
      if (kd == NodeKind::kTerminal) continue;
      const bool own = is_decision(kd) && owner_of(kd) == side;
      const double r = reach[n];
      std::uint32_t off = 0;
      if (own) {
        const std::uint32_t set = tree.infoset_of(n);
        off = tree.infoset(set).offset;
        // Perfect recall: every member has the same own reach.
        if (!done[set]) {
          done[set] = 1;
          denom[set] += r;
          for (int c = 0; c < tree.num_children(n); ++c) mixed[off + static_cast<std::uint32_t>(c)] += r * p[off + static_cast<std::uint32_t>(c)];
        }
      }
      for (int c = 0; c < tree.num_children(n); ++c) {
        reach[tree.child(n, c)] = own ? r * p[off + static_cast<std::uint32_t>(c)] : r;
      }
    }
  }
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    if (info.owner != side) continue;
    for (int a = 0; a < info.num_actions; ++a) {
      double& slot = mixed[info.offset + static_cast<std::uint32_t>(a)];
      slot = denom[i] > 0.0 ? slot / denom[i] : 1.0 / info.num_actions;
    }
  }
  return mixed;
}

Profile behavioural_profile(const GameTree& tree, const GameConfig& config, const Agent& agent) {
  auto variants = agent.episode_variants();
  if (variants.size() == 1) return agent_profile(tree, config, *variants[0].agent);
  std::vector<Profile> profiles;
  std::vector<double> weights;
  for (const auto& v : variants) {
    profiles.push_back(agent_profile(tree, config, *v.agent));
    weights.push_back(v.weight);
  }
  return mix_profiles(tree, agent.side(), profiles, weights);
}

std::shared_ptr<const TabularPolicy> tabular_policy(const GameTree& tree, const Profile& profile, Side side) {
  check_size(tree, profile);
  auto policy = std::make_shared<TabularPolicy>();
  policy->side = side;
  for (const auto& [key, set] : tree.key_index()) {
    const auto& info = tree.infoset(set);
    if (info.owner != side) continue;
    policy->table.emplace(key, std::vector<double>(profile.begin() + info.offset,
                                                   profile.begin() + info.offset + info.num_actions));
  }
  return policy;
}

TabularAgent::TabularAgent(std::shared_ptr<const TabularPolicy> policy)
    : Agent(policy->side), policy_(std::move(policy)) {}

void TabularAgent::reset(Rng& rng) {
  (void)rng;
  started_ = false;
  pending_ = -1;
}

InfoSetKey TabularAgent::key_at(const Observation& obs) const {
  if (!started_) {
    if (side() == Side::kDefender) return defender_root_key();
    if (obs.config == nullptr) throw std::invalid_argument("observation without a config");
    return attacker_root_key(*obs.config, obs.entry);
  }
  const std::uint64_t symbol = static_cast<std::uint64_t>(pending_) | (std::uint64_t(obs.current_mask) << 4) |
                               (std::uint64_t(obs.attacker_caught) << 12);
  return key_.extend(symbol);
}

void TabularAgent::distribution(const Observation& obs, std::span<double> probs) const {
  auto it = policy_->table.find(owned_key(side(), key_at(obs)));
  if (it == policy_->table.end() || it->second.size() != probs.size()) {
    std::fill(probs.begin(), probs.end(), 1.0 / static_cast<double>(probs.size()));
    return;
  }
  std::copy(it->second.begin(), it->second.end(), probs.begin());
}

void TabularAgent::commit(const Observation& obs, int action) {
  key_ = key_at(obs);
  started_ = true;
  pending_ = action;
}

}  // namespace gsgi::exact
