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

#include "gsgi/metagame.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace gsgi {

void RestrictedGame::add(PolicyPtr policy) {
  if (!policy) throw std::invalid_argument("null strategy");
  const bool row = policy->side == Side::kDefender;
  auto& list = row ? defenders : attackers;
  for (const auto& p : defenders) {
    if (p->id == policy->id) throw std::invalid_argument("duplicate strategy id " + policy->id);
  }
  for (const auto& p : attackers) {
    if (p->id == policy->id) throw std::invalid_argument("duplicate strategy id " + policy->id);
  }
  list.push_back(std::move(policy));
  const auto rows = static_cast<Eigen::Index>(defenders.size());
  const auto cols = static_cast<Eigen::Index>(attackers.size());
  payoff.conservativeResize(rows, cols);
  std_error.conservativeResize(rows, cols);
  episodes.conservativeResize(rows, cols);
  // conservativeResize leaves new entries uninitialized.
  if (row) {
    payoff.row(rows - 1).setZero();
    std_error.row(rows - 1).setZero();
    episodes.row(rows - 1).setZero();
  } else {
    payoff.col(cols - 1).setZero();
    std_error.col(cols - 1).setZero();
    episodes.col(cols - 1).setZero();
  }
}

void RestrictedGame::check_complete() const {
  if (defenders.empty() || attackers.empty()) throw std::invalid_argument("empty strategy list");
  if (!complete()) throw std::logic_error("payoff matrix has entries that were never estimated");
}

const std::vector<PolicyPtr>& RestrictedGame::strategies(Side side) const {
  return side == Side::kDefender ? defenders : attackers;
}

RestrictedGame make_restricted_game(std::vector<PolicyPtr> defenders, std::vector<PolicyPtr> attackers) {
  RestrictedGame g;
  for (auto& p : defenders) {
    if (p->side != Side::kDefender) throw std::invalid_argument("attacker strategy in defender list");
    g.add(std::move(p));
  }
  for (auto& p : attackers) {
    if (p->side != Side::kAttacker) throw std::invalid_argument("defender strategy in attacker list");
    g.add(std::move(p));
  }
  return g;
}

int worker_count() {
  if (const char* env = std::getenv("GSGI_WORKERS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

void estimate_payoff_matrix(RestrictedGame& game, const GameConfig& config, int episodes_per_entry,
                            std::uint64_t seed, std::optional<Cell> entry) {
  if (episodes_per_entry < 1) throw std::invalid_argument("episodes_per_entry must be at least 1");
  if (game.defenders.empty() || game.attackers.empty()) throw std::invalid_argument("empty strategy list");
  std::vector<std::pair<int, int>> todo;
  for (int i = 0; i < game.num_defenders(); ++i) {
    for (int j = 0; j < game.num_attackers(); ++j) {
      if (game.episodes(i, j) == 0) todo.emplace_back(i, j);
    }
  }
  std::vector<UtilityStats> results(todo.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < todo.size();) {
      const auto [i, j] = todo[k];
      const auto& d = game.defenders[static_cast<std::size_t>(i)];
      const auto& a = game.attackers[static_cast<std::size_t>(j)];
      results[k] = evaluate_matchup(config, PolicyMixture::pure(d), PolicyMixture::pure(a), episodes_per_entry,
                                    mix_seed(seed, hash_string(d->id), hash_string(a->id)), entry);
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(todo.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (std::size_t k = 0; k < todo.size(); ++k) {
    const auto [i, j] = todo[k];
    game.payoff(i, j) = results[k].mean;
    game.std_error(i, j) = results[k].std_error;
    game.episodes(i, j) = results[k].episodes;
  }
}

ZeroSumSolution solve_zero_sum(const Eigen::MatrixXd& G, double tolerance) {
  if (G.size() == 0) throw std::invalid_argument("empty payoff matrix");
  if (!G.allFinite()) throw std::domain_error("payoff matrix has non-finite entries");
  const double shift = 1.0 - G.minCoeff();
  const Eigen::MatrixXd A = G.array() + shift;
  // Column player: max 1'y s.t. A y <= 1; the row duals give the row mixture.
  const auto lp = simplex_max(A, Eigen::VectorXd::Ones(G.rows()), Eigen::VectorXd::Ones(G.cols()));
  if (lp.status != LpStatus::kOptimal || !(lp.objective > 0.0)) {
    throw std::runtime_error("zero-sum LP failed");
  }
  ZeroSumSolution s;
  s.attacker = lp.x / lp.objective;
  s.defender = lp.dual.cwiseMax(0.0);
  s.defender /= s.defender.sum();
  s.value = 1.0 / lp.objective - shift;

  const double guaranteed = (s.defender.transpose() * G).minCoeff();
  const double conceded = (G * s.attacker).maxCoeff();
  if (guaranteed < s.value - tolerance || conceded > s.value + tolerance) {
    throw std::runtime_error("zero-sum solution failed its optimality certificate");
  }
  return s;
}

Eigen::VectorXd mix_strategies(const Eigen::VectorXd& nash, const Eigen::VectorXd& uniform, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in [0, 1]");
  if (nash.size() != uniform.size()) throw std::invalid_argument("mixtures over different strategy sets");
  return (1.0 - alpha) * nash + alpha * uniform;
}

Eigen::VectorXd uniform_strategy(int n) {
  if (n < 1) throw std::invalid_argument("uniform strategy over an empty set");
  return Eigen::VectorXd::Constant(n, 1.0 / n);
}

double expected_utility(const Eigen::VectorXd& sd, const Eigen::VectorXd& sa, const Eigen::MatrixXd& G) {
  if (sd.size() != G.rows() || sa.size() != G.cols()) throw std::invalid_argument("dimension mismatch");
  return sd.dot(G * sa);
}

PolicyMixture to_mixture(const RestrictedGame& game, Side side, const Eigen::VectorXd& probs) {
  const auto& list = game.strategies(side);
  if (static_cast<Eigen::Index>(list.size()) != probs.size()) throw std::invalid_argument("mixture size mismatch");
  PolicyMixture m;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double w = probs(static_cast<Eigen::Index>(i));
    if (w <= 0.0) continue;
    m.policies.push_back(list[i]);
    m.weights.push_back(w);
  }
  const double total = std::accumulate(m.weights.begin(), m.weights.end(), 0.0);
  for (double& w : m.weights) w /= total;
  return m;
}

ExplorationMixture make_exploration_mixture(const Eigen::VectorXd& nash, double alpha) {
  ExplorationMixture e;
  e.nash = nash;
  e.uniform = uniform_strategy(static_cast<int>(nash.size()));
  e.alpha = alpha;
  e.combined = mix_strategies(nash, e.uniform, alpha);
  return e;
}

nlohmann::json to_json(const ZeroSumSolution& s) {
  return {{"defender", std::vector<double>(s.defender.data(), s.defender.data() + s.defender.size())},
          {"attacker", std::vector<double>(s.attacker.data(), s.attacker.data() + s.attacker.size())},
          {"value", s.value}};
}

std::string payoff_csv(const RestrictedGame& game) {
  std::ostringstream out;
  out.precision(10);
  out << "defender\\attacker";
  for (const auto& a : game.attackers) out << ',' << a->id;
  out << '\n';
  for (int i = 0; i < game.num_defenders(); ++i) {
    out << game.defenders[static_cast<std::size_t>(i)]->id;
    for (int j = 0; j < game.num_attackers(); ++j) out << ',' << game.payoff(i, j);
    out << '\n';
  }
  return out.str();
}

}  // namespace gsgi
