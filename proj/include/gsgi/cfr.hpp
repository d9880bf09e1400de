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
#include <span>
#include <string>
#include <vector>

#include "gsgi/exact.hpp"

namespace gsgi::exact {

/// Positive part of the regrets, normalized; uniform when none is positive.
void regret_matching(std::span<const double> regrets, std::span<double> out);

struct CfrOptions {
  int iterations = 1000;
  std::uint64_t seed = 0;
  int trace_every = 0;  // 0 records only the final exploitability
};

struct CfrTracePoint {
  int iteration = 0;
  double exploitability = 0.0;
};

struct CfrResult {
  Profile average;
  Profile regrets;
  std::vector<CfrTracePoint> trace;
  std::uint64_t nodes_touched = 0;
};

/// Chance-sampled CFR with simultaneous updates: each iteration samples one
/// outcome at every chance node and traverses all actions of both players.
CfrResult run_cfr(const GameTree& tree, const CfrOptions& options);

/// Average strategy: accumulated reach-weighted strategies, normalized;
/// uniform where nothing was accumulated.
Profile average_profile(const GameTree& tree, const Profile& strategy_sum);

/// "iteration,exploitability" rows.
std::string trace_csv(const std::vector<CfrTracePoint>& trace);
/// One row per infoset: index, owner, then action probabilities.
std::string profile_csv(const GameTree& tree, const Profile& profile);

}  // namespace gsgi::exact
