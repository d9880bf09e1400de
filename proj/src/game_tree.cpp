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

#include "gsgi/game_tree.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace gsgi::exact {

GameTree::GameTree(TreeBudget budget) : budget_(budget) {}

std::uint32_t GameTree::allocate(int count) {
  const std::uint64_t start = kind_.size();
  if (start + static_cast<std::uint64_t>(count) > budget_.max_nodes) {
    throw BudgetError("game tree exceeds the node budget of " + std::to_string(budget_.max_nodes) + " nodes",
                      static_cast<double>(start + static_cast<std::uint64_t>(count)));
  }
  if ((start & 0xFFFFF) == 0 && memory_bytes() > budget_.max_bytes) {
    throw BudgetError("game tree exceeds the memory budget", static_cast<double>(start));
  }
  kind_.resize(start + static_cast<std::size_t>(count), static_cast<std::uint8_t>(NodeKind::kTerminal));
  count_.resize(kind_.size(), 0);
  first_.resize(kind_.size(), 0);
  aux_.resize(kind_.size(), std::numeric_limits<std::uint32_t>::max());
  return static_cast<std::uint32_t>(start);
}

std::uint32_t GameTree::add_root() {
  if (!kind_.empty()) throw std::logic_error("tree already has a root");
  return allocate(1);
}

void GameTree::make_terminal(std::uint32_t node, double defender_utility) {
  kind_[node] = static_cast<std::uint8_t>(NodeKind::kTerminal);
  count_[node] = 0;
  aux_[node] = static_cast<std::uint32_t>(payoffs_.size());
  payoffs_.push_back(defender_utility);
}

std::uint32_t GameTree::make_chance(std::uint32_t node, std::span<const double> probs) {
  if (probs.empty() || probs.size() > 255) throw std::invalid_argument("chance node arity out of range");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw std::invalid_argument("negative chance probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("chance probabilities must sum to 1");
  const std::uint32_t first = allocate(static_cast<int>(probs.size()));
  kind_[node] = static_cast<std::uint8_t>(NodeKind::kChance);
  count_[node] = static_cast<std::uint8_t>(probs.size());
  first_[node] = first;
  aux_[node] = static_cast<std::uint32_t>(chance_probs_.size());
  chance_probs_.insert(chance_probs_.end(), probs.begin(), probs.end());
  return first;
}

std::uint32_t GameTree::make_decision(std::uint32_t node, std::uint32_t infoset) {
  const InfoSetInfo& info = infosets_.at(infoset);
  const std::uint32_t first = allocate(info.num_actions);
  kind_[node] = static_cast<std::uint8_t>(info.owner == Side::kDefender ? NodeKind::kDefender : NodeKind::kAttacker);
  count_[node] = info.num_actions;
  first_[node] = first;
  aux_[node] = infoset;
  member_offsets_.clear();
  return first;
}

std::uint32_t GameTree::intern_infoset(Side owner, const InfoSetKey& key, int num_actions) {
  if (num_actions < 1 || num_actions > 255) throw std::invalid_argument("infoset arity out of range");
  const InfoSetKey k = owned_key(owner, key);
  auto [it, inserted] = index_.try_emplace(k, static_cast<std::uint32_t>(infosets_.size()));
  if (inserted) {
    infosets_.push_back({owner, static_cast<std::uint8_t>(num_actions), profile_size_});
    profile_size_ += static_cast<std::uint32_t>(num_actions);
  } else if (infosets_[it->second].num_actions != num_actions) {
    throw std::logic_error("nodes of one infoset disagree on their actions");
  }
  return it->second;
}

std::optional<std::uint32_t> GameTree::find_infoset(Side owner, const InfoSetKey& key) const {
  auto it = index_.find(owned_key(owner, key));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void GameTree::finalize() {
  kind_.shrink_to_fit();
  count_.shrink_to_fit();
  first_.shrink_to_fit();
  aux_.shrink_to_fit();
  payoffs_.shrink_to_fit();
  chance_probs_.shrink_to_fit();
}

std::span<const std::uint32_t> GameTree::members(std::uint32_t infoset) const {
  if (member_offsets_.size() != infosets_.size() + 1) {
    member_offsets_.assign(infosets_.size() + 1, 0);
    for (std::uint32_t n = 0; n < num_nodes(); ++n) {
      const NodeKind k = kind(n);
      if (k == NodeKind::kDefender || k == NodeKind::kAttacker) ++member_offsets_[aux_[n] + 1];
    }
    for (std::size_t i = 1; i < member_offsets_.size(); ++i) member_offsets_[i] += member_offsets_[i - 1];
    member_nodes_.assign(member_offsets_.back(), 0);
    std::vector<std::uint32_t> fill(member_offsets_.begin(), member_offsets_.end() - 1);
    for (std::uint32_t n = 0; n < num_nodes(); ++n) {
      const NodeKind k = kind(n);
      if (k == NodeKind::kDefender || k == NodeKind::kAttacker) member_nodes_[fill[aux_[n]]++] = n;
    }
  }
  return {member_nodes_.data() + member_offsets_[infoset], member_offsets_[infoset + 1] - member_offsets_[infoset]};
}

std::uint64_t GameTree::memory_bytes() const {
  return kind_.capacity() * 2 + (first_.capacity() + aux_.capacity()) * 4 +
         (payoffs_.capacity() + chance_probs_.capacity()) * 8 + infosets_.capacity() * sizeof(InfoSetInfo) +
         index_.size() * (sizeof(InfoSetKey) + 24) + (member_offsets_.capacity() + member_nodes_.capacity()) * 4;
}

nlohmann::json GameTree::stats() const {
  std::uint64_t by_kind[4] = {0, 0, 0, 0};
  for (auto k : kind_) ++by_kind[k];
  std::uint64_t def_sets = 0;
  for (const auto& i : infosets_) def_sets += i.owner == Side::kDefender ? 1 : 0;
  return {{"nodes", num_nodes()},
          {"chance_nodes", by_kind[0]},
          {"defender_nodes", by_kind[1]},
          {"attacker_nodes", by_kind[2]},
          {"terminal_nodes", by_kind[3]},
          {"infosets", num_infosets()},
          {"defender_infosets", def_sets},
          {"attacker_infosets", num_infosets() - def_sets},
          {"memory_bytes", memory_bytes()}};
}

// --- GSG-I specifics ------------------------------------------------------------

std::vector<TriggerOutcome> trigger_outcomes(const GameState& state, const GameConfig& config,
                                             const std::vector<int>& armed) {
  std::vector<TriggerOutcome> out{{std::vector<int>(armed.size(), 0), 1.0}};
  for (std::size_t k = 0; k < armed.size(); ++k) {
    const int n = state.deployed[static_cast<std::size_t>(armed[k])];
    const double p = config.trigger_probability(armed[k]);
    std::vector<TriggerOutcome> next;
    for (const auto& partial : out) {
      double binom = 1.0;
      for (int c = 0; c <= n; ++c) {
        if (c > 0) binom = binom * (n - c + 1) / c;
        const double prob = binom * std::pow(p, c) * std::pow(1.0 - p, n - c);
        if (prob <= 0.0) continue;
        TriggerOutcome o = partial;
        o.counts[k] = c;
        o.probability *= prob;
        next.push_back(std::move(o));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::uint64_t defender_symbol(const GameState& after, const GameConfig& config, int action) {
  const std::uint64_t mask = after.footprints_att.mask(config.index(after.defender_pos));
  return static_cast<std::uint64_t>(action) | (mask << 4) | (std::uint64_t(after.attacker_caught) << 12);
}

std::uint64_t attacker_symbol(const GameState& after, const GameConfig& config, int action) {
  const std::uint64_t mask = after.footprints_def.mask(config.index(after.attacker_pos));
  return static_cast<std::uint64_t>(action) | (mask << 4) | (std::uint64_t(after.attacker_caught) << 12);
}

InfoSetKey defender_root_key() { return InfoSetKey{}.extend(0xDEF); }

InfoSetKey attacker_root_key(const GameConfig& config, Cell entry) {
  return InfoSetKey{}.extend(0xA77).extend(static_cast<std::uint64_t>(config.index(entry)));
}

std::vector<StepOutcome> expand_step(const TreeState& state, const GameConfig& config, Move d,
                                     std::optional<AttackerAction> a, bool explicit_triggers) {
  TreeState moved = state;
  const bool placed = apply_moves(moved.s, config, d, a.value_or(AttackerAction{}));
  std::vector<StepOutcome> out;
  if (explicit_triggers) {
    const std::vector<int> armed = armed_cells(moved.s);
    for (auto& o : trigger_outcomes(moved.s, config, armed)) {
      StepOutcome r{o.probability, moved};
      StepEvents ev;
      resolve_step(r.next.s, config, armed, o.counts, ev);
      out.push_back(std::move(r));
    }
    return out;
  }
  auto& expected = moved.expected;
  if (expected.empty()) expected.assign(static_cast<std::size_t>(config.num_cells()), 0.0);
  if (placed) expected[static_cast<std::size_t>(config.index(moved.s.attacker_pos))] += 1.0;
  double reward = 0.0;
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (expected[c] <= 0.0) continue;
    const double p = config.trigger_probability(static_cast<int>(c));
    reward += expected[c] * p * config.rewards.attack_penalty[c];
    expected[c] *= 1.0 - p;
  }
  StepEvents ev;
  resolve_step(moved.s, config, {}, {}, ev);
  const auto dcell = static_cast<std::size_t>(config.index(moved.s.defender_pos));
  reward += (expected[dcell] - ev.removed) * config.rewards.tool_removal[dcell];
  if (ev.removed > 0) expected[dcell] = 0.0;
  moved.s.cumulative_defender_reward += reward;
  out.push_back({1.0, std::move(moved)});
  return out;
}

namespace {

struct Builder {
  const GameConfig& config;
  GameTree& tree;
  bool explicit_triggers;

  void step(std::uint32_t node, const TreeState& st, const InfoSetKey& dkey, const InfoSetKey& akey) {
    const std::uint32_t dset = tree.intern_infoset(Side::kDefender, dkey, kNumMoves);
    const std::uint32_t first = tree.make_decision(node, dset);
    const bool active = st.s.attacker_active();
    std::uint32_t aset = 0;
    if (active) aset = tree.intern_infoset(Side::kAttacker, akey, kNumAttackerActions);
    for (int d = 0; d < kNumMoves; ++d) {
      if (!active) {
        after_moves(first + static_cast<std::uint32_t>(d), st, d, -1, dkey, akey);
        continue;
      }
      const std::uint32_t afirst = tree.make_decision(first + static_cast<std::uint32_t>(d), aset);
      for (int a = 0; a < kNumAttackerActions; ++a) {
        after_moves(afirst + static_cast<std::uint32_t>(a), st, d, a, dkey, akey);
      }
    }
  }

  void after_moves(std::uint32_t node, const TreeState& st, int d, int a, const InfoSetKey& dkey,
                   const InfoSetKey& akey) {
    std::optional<AttackerAction> aa;
    if (a >= 0) aa = AttackerAction::decode(a);
    auto outcomes = expand_step(st, config, static_cast<Move>(d), aa, explicit_triggers);
    if (outcomes.size() == 1) {
      resolve(node, outcomes[0].next, d, a, dkey, akey);
      return;
    }
    std::vector<double> probs;
    probs.reserve(outcomes.size());
    for (const auto& o : outcomes) probs.push_back(o.probability);
    const std::uint32_t first = tree.make_chance(node, probs);
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      resolve(first + static_cast<std::uint32_t>(k), outcomes[k].next, d, a, dkey, akey);
    }
  }

  void resolve(std::uint32_t node, const TreeState& st, int d, int a, const InfoSetKey& dkey,
               const InfoSetKey& akey) {
    if (st.s.terminal) {
      tree.make_terminal(node, st.s.cumulative_defender_reward);
      return;
    }
    const InfoSetKey dnext = dkey.extend(defender_symbol(st.s, config, d));
    const InfoSetKey anext = a >= 0 ? akey.extend(attacker_symbol(st.s, config, a)) : akey;
    step(node, st, dnext, anext);
  }
};

}  // namespace

double estimate_tree_size(const GameConfig& config, int probes, std::uint64_t seed, bool explicit_triggers) {
  config.validate();
  if (probes < 1) throw std::invalid_argument("probes must be positive");
  Rng rng(seed, Stream::kEvaluation, 0x7e3e);
  const auto entries = static_cast<int>(config.entry_points.size());
  double total = 0.0;
  for (int p = 0; p < probes; ++p) {
    double mult = entries, est = 1.0 + entries;
    TreeState st{initial_state(config, config.entry_points[static_cast<std::size_t>(rng.uniform_int(entries))]), {}};
    while (!st.s.terminal) {
      mult *= kNumMoves;
      est += mult;
      const int d = rng.uniform_int(kNumMoves);
      std::optional<AttackerAction> a;
      if (st.s.attacker_active()) {
        mult *= kNumAttackerActions;
        est += mult;
        a = AttackerAction::decode(rng.uniform_int(kNumAttackerActions));
      }
      auto outcomes = expand_step(st, config, static_cast<Move>(d), a, explicit_triggers);
      std::size_t pick = 0;
      if (outcomes.size() > 1) {
        mult *= static_cast<double>(outcomes.size());
        est += mult;
        pick = static_cast<std::size_t>(rng.uniform_int(static_cast<int>(outcomes.size())));
      }
      st = std::move(outcomes[pick].next);
    }
    total += est;
  }
  return total / probes;
}

double estimated_bytes_per_node() {
  // kind + arity + two indices, plus a payoff slot for most leaves
  return 10.0 + 0.9 * 8.0;
}

GameTree build_game_tree(const GameConfig& config, const TreeOptions& options) {
  GameTree tree(options.budget);
  tree.set_explicit_triggers(options.explicit_triggers);
  const std::uint32_t root = tree.add_root();
  if (config.horizon == 0) {
    tree.make_terminal(root, 0.0);
    return tree;
  }
  config.validate();
  if (options.estimate_probes > 0) {
    const double estimate =
        estimate_tree_size(config, options.estimate_probes, config.seed, options.explicit_triggers);
    if (estimate > 1.5 * static_cast<double>(options.budget.max_nodes)) {
      throw BudgetError("estimated game tree size " + std::to_string(static_cast<long long>(estimate)) +
                            " exceeds the node budget",
                        estimate);
    }
    if (estimate * estimated_bytes_per_node() > 1.5 * static_cast<double>(options.budget.max_bytes)) {
      throw BudgetError("estimated game tree memory exceeds the budget", estimate);
    }
  }
  const auto entries = config.entry_points.size();
  std::vector<double> probs(entries, 1.0 / static_cast<double>(entries));
  const std::uint32_t first = tree.make_chance(root, probs);
  Builder b{config, tree, options.explicit_triggers};
  for (std::size_t e = 0; e < entries; ++e) {
    const Cell entry = config.entry_points[e];
    b.step(first + static_cast<std::uint32_t>(e), TreeState{initial_state(config, entry), {}}, defender_root_key(),
           attacker_root_key(config, entry));
  }
  tree.finalize();
  if (tree.memory_bytes() > options.budget.max_bytes) {
    throw BudgetError("game tree exceeds the memory budget", static_cast<double>(tree.num_nodes()));
  }
  return tree;
}

// --- agent profiles ----------------------------------------------------------------

namespace {

struct ProfileWalker {
  const GameTree& tree;
  const GameConfig& config;
  Side side;
  std::vector<double>& profile;
  std::vector<char>& seen;

  void record(std::uint32_t node, const Agent& agent, const Observation& obs, std::span<double> probs) {
    const std::uint32_t id = tree.infoset_of(node);
    const InfoSetInfo& info = tree.infoset(id);
    agent.distribution(obs, probs);
    double* slot = profile.data() + info.offset;
    if (seen[id]) {
      for (int i = 0; i < info.num_actions; ++i) {
        if (std::abs(slot[i] - probs[static_cast<std::size_t>(i)]) > 1e-9) {
          throw std::logic_error("agent is not a behavioural strategy on this tree");
        }
      }
    }
    std::copy(probs.begin(), probs.end(), slot);
    seen[id] = 1;
  }

  void step(std::uint32_t node, const TreeState& st, const Agent& agent) {
    const bool active = st.s.attacker_active();
    Observation dobs, aobs;
    std::array<double, kNumMoves> dprobs{};
    std::array<double, kNumAttackerActions> aprobs{};
    if (side == Side::kDefender) {
      dobs = observe(st.s, config, Side::kDefender);
      record(node, agent, dobs, dprobs);
    }
    if (side == Side::kAttacker && active) {
      aobs = observe(st.s, config, Side::kAttacker);
      record(tree.child(node, 0), agent, aobs, aprobs);
    }
    for (int d = 0; d < kNumMoves; ++d) {
      const std::uint32_t dn = tree.child(node, d);
      std::unique_ptr<Agent> after_d;
      if (side == Side::kDefender) {
        if (dprobs[static_cast<std::size_t>(d)] <= 0.0) continue;
        after_d = agent.clone();
        after_d->commit(dobs, d);
      }
      const Agent& next_d = after_d ? *after_d : agent;
      if (!active) {
        after_moves(dn, st, d, -1, next_d);
        continue;
      }
      for (int a = 0; a < kNumAttackerActions; ++a) {
        if (side == Side::kAttacker) {
          if (aprobs[static_cast<std::size_t>(a)] <= 0.0) continue;
          auto after_a = agent.clone();
          after_a->commit(aobs, a);
          after_moves(tree.child(dn, a), st, d, a, *after_a);
        } else {
          after_moves(tree.child(dn, a), st, d, a, next_d);
        }
      }
    }
  }

  void after_moves(std::uint32_t node, const TreeState& st, int d, int a, const Agent& agent) {
    std::optional<AttackerAction> aa;
    if (a >= 0) aa = AttackerAction::decode(a);
    auto outcomes = expand_step(st, config, static_cast<Move>(d), aa, tree.explicit_triggers());
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
      const std::uint32_t n = outcomes.size() == 1 ? node : tree.child(node, static_cast<int>(k));
      if (!outcomes[k].next.s.terminal) step(n, outcomes[k].next, agent);
    }
  }
};

}  // namespace

std::vector<double> agent_profile(const GameTree& tree, const GameConfig& config, const Agent& agent) {
  auto variants = agent.episode_variants();
  if (variants.size() != 1) throw std::invalid_argument("agent_profile needs an agent without per-episode variants");
  std::vector<double> profile(tree.profile_size(), 0.0);
  std::vector<char> seen(tree.num_infosets(), 0);
  ProfileWalker w{tree, config, agent.side(), profile, seen};
  if (tree.kind(0) == NodeKind::kChance) {
    for (std::size_t e = 0; e < config.entry_points.size(); ++e) {
      w.step(tree.child(0, static_cast<int>(e)), TreeState{initial_state(config, config.entry_points[e]), {}},
             *variants[0].agent);
    }
  }
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const InfoSetInfo& info = tree.infoset(i);
    if (info.owner != agent.side() || seen[i]) continue;
    for (int k = 0; k < info.num_actions; ++k) profile[info.offset + static_cast<std::uint32_t>(k)] = 1.0 / info.num_actions;
  }
  return profile;
}

GameTree matching_pennies_tree() {
  GameTree tree;
  const std::uint32_t root = tree.add_root();
  const std::uint32_t dset = tree.intern_infoset(Side::kDefender, InfoSetKey{}, 2);
  const std::uint32_t aset = tree.intern_infoset(Side::kAttacker, InfoSetKey{}, 2);
  const std::uint32_t first = tree.make_decision(root, dset);
  for (int d = 0; d < 2; ++d) {
    const std::uint32_t af = tree.make_decision(first + static_cast<std::uint32_t>(d), aset);
    for (int a = 0; a < 2; ++a) tree.make_terminal(af + static_cast<std::uint32_t>(a), d == a ? 1.0 : -1.0);
  }
  tree.finalize();
  return tree;
}

}  // namespace gsgi::exact
