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

#include "gsgi/cfr.hpp"

#include <sstream>
#include <stdexcept>

namespace gsgi::exact {

void regret_matching(std::span<const double> regrets, std::span<double> out) {
  double total = 0.0;
  for (double r : regrets) total += r > 0.0 ? r : 0.0;
  for (std::size_t a = 0; a < regrets.size(); ++a) {
    out[a] = total > 0.0 ? (regrets[a] > 0.0 ? regrets[a] / total : 0.0) : 1.0 / static_cast<double>(regrets.size());
  }
}

Profile average_profile(const GameTree& tree, const Profile& strategy_sum) {
  Profile avg(tree.profile_size());
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    double total = 0.0;
    for (int a = 0; a < info.num_actions; ++a) total += strategy_sum[info.offset + static_cast<std::uint32_t>(a)];
    for (int a = 0; a < info.num_actions; ++a) {
      const std::uint32_t k = info.offset + static_cast<std::uint32_t>(a);
      avg[k] = total > 0.0 ? strategy_sum[k] / total : 1.0 / info.num_actions;
    }
  }
  return avg;
}

namespace {

struct Cfr {
  const GameTree& tree;
  Profile regrets;
  Profile strategy_sum;
  Profile sigma;
  Rng rng;
  std::uint64_t touched = 0;

  void refresh() {
    for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
      const auto& info = tree.infoset(i);
      regret_matching(std::span<const double>(regrets.data() + info.offset, info.num_actions),
                      std::span<double>(sigma.data() + info.offset, info.num_actions));
    }
  }

  // Returns the defender's utility; pi_d and pi_a exclude chance.
  double walk(std::uint32_t n, double pi_d, double pi_a) {
    ++touched;
    const NodeKind k = tree.kind(n);
    if (k == NodeKind::kTerminal) return tree.payoff(n);
    if (k == NodeKind::kChance) {
      const int count = tree.num_children(n);
      double u = rng.uniform();
      int pick = count - 1;
      for (int c = 0; c < count; ++c) {
        const double p = tree.chance_prob(n, c);
        if (u < p) {
          pick = c;
          break;
        }
        u -= p;
      }
      return walk(tree.child(n, pick), pi_d, pi_a);
    }
    const bool defender = k == NodeKind::kDefender;
    const auto& info = tree.infoset(tree.infoset_of(n));
    const int count = info.num_actions;
    double child_u[kNumAttackerActions];
    double u = 0.0;
    for (int a = 0; a < count; ++a) {
      const double s = sigma[info.offset + static_cast<std::uint32_t>(a)];
      child_u[a] = defender ? walk(tree.child(n, a), pi_d * s, pi_a) : walk(tree.child(n, a), pi_d, pi_a * s);
      u += s * child_u[a];
    }
    const double own = defender ? pi_d : pi_a;
    const double opp = defender ? pi_a : pi_d;
    const double sign = defender ? 1.0 : -1.0;
    for (int a = 0; a < count; ++a) {
      const std::uint32_t k2 = info.offset + static_cast<std::uint32_t>(a);
      regrets[k2] += opp * sign * (child_u[a] - u);
      strategy_sum[k2] += own * sigma[k2];
    }
    return u;
  }
};

}  // namespace

CfrResult run_cfr(const GameTree& tree, const CfrOptions& options) {
  if (options.iterations < 1) throw std::invalid_argument("CFR needs at least one iteration");
  if (options.trace_every < 0) throw std::invalid_argument("trace_every must be nonnegative");
  Cfr cfr{tree,
          Profile(tree.profile_size(), 0.0),
          Profile(tree.profile_size(), 0.0),
          Profile(tree.profile_size(), 0.0),
          Rng(options.seed, Stream::kTraining, 0xCF4)};
  CfrResult result;
  for (int it = 1; it <= options.iterations; ++it) {
    cfr.refresh();
    cfr.walk(0, 1.0, 1.0);
    const bool last = it == options.iterations;
    if (last || (options.trace_every > 0 && it % options.trace_every == 0)) {
      result.trace.push_back({it, exploitability(tree, average_profile(tree, cfr.strategy_sum))});
    }
  }
  result.average = average_profile(tree, cfr.strategy_sum);
  result.regrets = std::move(cfr.regrets);
  result.nodes_touched = cfr.touched;
  return result;
}

std::string trace_csv(const std::vector<CfrTracePoint>& trace) {
  std::ostringstream out;
  out.precision(12);
  out << "iteration,exploitability\n";
  for (const auto& p : trace) out << p.iteration << ',' << p.exploitability << '\n';
  return out.str();
}

std::string profile_csv(const GameTree& tree, const Profile& profile) {
  std::ostringstream out;
  out.precision(10);
  out << "infoset,owner";
  for (int a = 0; a < kNumAttackerActions; ++a) out << ",p" << a;
  out << '\n';
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    out << i << ',' << to_string(info.owner);
    for (int a = 0; a < kNumAttackerActions; ++a) {
      out << ',';
      if (a < info.num_actions) out << profile[info.offset + static_cast<std::uint32_t>(a)];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gsgi::exact
