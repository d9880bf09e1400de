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

// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance [--only 1,2,...] [--expect-fail 8] [--quick]
//
// Exit status is nonzero when a criterion fails that was not listed in
// --expect-fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "gradcheck.hpp"
#include "gsgi/cfr.hpp"
#include "gsgi/dedol.hpp"
#include "gsgi/exact.hpp"
#include "gsgi/game_tree.hpp"
#include "gsgi/metagame.hpp"
#include "gsgi/rl.hpp"
#include "invariant_suite.hpp"
#include "matrix_oracle.hpp"

using namespace gsgi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

exact::Profile random_profile(const exact::GameTree& tree, Rng& rng) {
  exact::Profile p(tree.profile_size(), 0.0);
  for (std::uint32_t i = 0; i < tree.num_infosets(); ++i) {
    const auto& info = tree.infoset(i);
    double total = 0.0;
    for (int a = 0; a < info.num_actions; ++a) total += p[info.offset + std::uint32_t(a)] = rng.uniform();
    for (int a = 0; a < info.num_actions; ++a) p[info.offset + std::uint32_t(a)] /= total;
  }
  return p;
}

GameConfig random_tiny_config(Rng& rng) {
  GameConfig c;
  c.rows = 2 + rng.uniform_int(2);
  c.cols = 2 + rng.uniform_int(2);
  c.horizon = 1 + rng.uniform_int(2);
  c.num_tools = rng.uniform_int(2);
  c.trigger_scale = rng.uniform(0.2, 1.0);
  c.success_map.resize(static_cast<std::size_t>(c.num_cells()));
  for (double& v : c.success_map) v = rng.uniform();
  c.entry_points = {c.cell(rng.uniform_int(c.num_cells()))};
  if (rng.bernoulli(0.5)) {
    const Cell e = c.cell(rng.uniform_int(c.num_cells()));
    if (e != c.entry_points[0]) c.entry_points.push_back(e);
  }
  c.patrol_post = c.cell(rng.uniform_int(c.num_cells()));
  c.rewards = RewardScheme::constant(c.num_cells(), rng.uniform(1, 3), rng.uniform(4, 10), -rng.uniform(1, 5));
  c.validate();
  return c;
}

Outcome oracle_equivalence() {
  Rng rng(2024);
  int compared = 0, skipped = 0, bad = 0;
  double worst = 0.0;
  while (compared < 20 && compared + skipped < 200) {
    const GameConfig c = random_tiny_config(rng);
    const exact::GameTree t = exact::build_game_tree(c);
    const exact::Profile opp = random_profile(t, rng);
    bool done = true;
    for (Side side : {Side::kDefender, Side::kAttacker}) {
      std::vector<std::vector<int>> pure;
      try {
        pure = exact::enumerate_pure_policies(t, side, 200000);
      } catch (const BudgetError&) {
        done = false;
        break;
      }
      const double br = exact::exact_best_response(t, opp, side).value;
      double best = -1e300;
      for (const auto& p : pure) {
        const double v = exact::pure_policy_value(t, opp, side, p);
        if (v > br + 1e-9) ++bad;
        best = std::max(best, v);
      }
      worst = std::max(worst, std::abs(best - br));
    }
    done ? ++compared : ++skipped;
  }
  std::ostringstream d;
  d << compared << " instances (" << skipped << " too large to enumerate), max |BR - enumerated max| " << worst
    << ", pure policies above BR " << bad;
  return {compared >= 20 && bad == 0 && worst <= 1e-9, d.str()};
}

Outcome solver_certificate() {
  Rng rng(99);
  double worst = 0.0, oracle_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + rng.uniform_int(10), n = 1 + rng.uniform_int(10);
    Eigen::MatrixXd G(m, n);
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = rng.uniform(-10, 10);
    const auto s = solve_zero_sum(G);
    worst = std::max(worst, s.value - (s.defender.transpose() * G).minCoeff());
    worst = std::max(worst, (G * s.attacker).maxCoeff() - s.value);
    if (m <= 5 && n <= 5) {
      if (const auto v = testing::support_enumeration_value(G)) oracle_gap = std::max(oracle_gap, std::abs(*v - s.value));
    }
  }
  Eigen::MatrixXd G(2, 2);
  G << 3, -1, -2, 2;
  const auto s = solve_zero_sum(G);
  const double exact_err =
      std::max({std::abs(s.value - 0.5), std::abs(s.attacker(0) - 0.375), std::abs(s.attacker(1) - 0.625)});
  std::ostringstream d;
  d << "max certificate violation " << worst << ", 2x2 error " << exact_err << ", support-enumeration gap "
    << oracle_gap;
  return {worst <= 1e-6 && exact_err <= 1e-9 && oracle_gap <= 1e-6, d.str()};
}

Outcome gradient_checks() {
  double worst = 0.0;
  bool small = true;
  std::uint64_t seed = 1;
  for (const auto& [name, spec] : testing::gradient_check_specs()) {
    small = small && testing::Net(spec).num_params() < 500;
    worst = std::max(worst, testing::gradient_error(spec, seed++));
  }
  return {small && worst <= 1e-4, "max relative error " + fmt("%.3g", worst)};
}

Outcome cfr_sanity() {
  const exact::GameTree mp = exact::matching_pennies_tree();
  exact::CfrOptions o;
  o.iterations = 10000;
  const auto r = exact::run_cfr(mp, o);
  double dev = 0.0;
  for (double p : r.average) dev = std::max(dev, std::abs(p - 0.5));

  const GameConfig c = make_square_config(3, MapKind::kUniform, 2, 3, 1);
  const exact::GameTree t = exact::build_game_tree(c);
  o.iterations = 5000;
  const auto g = exact::run_cfr(t, o);
  const double e_cfr = exact::exploitability(t, g.average);
  const double e_uni = exact::exploitability(t, exact::uniform_profile(t));
  std::ostringstream d;
  d << "pennies max deviation " << dev << "; 3x3/T=2 exploitability " << e_cfr << " vs uniform " << e_uni;
  return {dev <= 0.05 && e_cfr < e_uni, d.str()};
}

bool separated(const UtilityStats& hi, const UtilityStats& lo) {
  return hi.mean - lo.mean > 2.0 * std::hypot(hi.std_error, lo.std_error);
}

Outcome dqn_ordering(bool quick) {
  const GameConfig c = standard_small_config();
  const auto attacker = PolicyMixture::pure(make_policy("heuristic-attacker", Side::kAttacker, HeuristicAttackerPolicy{}));
  rl::TrainingConfig t = rl::training_profile("desk", 3, Side::kDefender);
  t.variant = rl::Variant::kDuelingDouble;
  t.seed = 7;
  if (quick) t.episodes = 4000;
  const auto trained = rl::train_best_response(c, Side::kDefender, attacker, t);
  auto untrained_net =
      std::make_shared<nn::QNetwork>(nn::build_network<float>(3, nn::HeadKind::kDueling, num_actions(Side::kDefender), 7));
  const int n = 10000;
  const UtilityStats dqn =
      evaluate_matchup(c, PolicyMixture::pure(rl::network_policy("dqn", Side::kDefender, trained.network)), attacker, n, 12345);
  const UtilityStats sweep =
      evaluate_matchup(c, PolicyMixture::pure(make_policy("sweep", Side::kDefender, RandomSweepPolicy{})), attacker, n, 12345);
  const UtilityStats raw = evaluate_matchup(
      c, PolicyMixture::pure(rl::network_policy("untrained", Side::kDefender, untrained_net)), attacker, n, 12345);
  std::ostringstream d;
  d << "EU dqn " << dqn.mean << " (se " << dqn.std_error << "), sweep " << sweep.mean << " (se " << sweep.std_error
    << "), untrained " << raw.mean << " (se " << raw.std_error << "), " << t.episodes << " training episodes";
  return {separated(dqn, sweep) && separated(sweep, raw), d.str()};
}

struct DedolRun {
  dedol::DedolReport report;
  bool ran = false;
};

DedolRun& dedol_run(bool quick) {
  static DedolRun run;
  if (run.ran) return run;
  const GameConfig c = standard_small_config();
  dedol::DedolConfig d = dedol::default_dedol_config(3, "desk");
  d.plan = dedol::Plan::kPureGlobal;
  d.max_iterations = 3;
  d.eu_method = dedol::EuMethod::kExact;
  d.seed = 11;
  if (quick) {
    d.defender_training.episodes = d.attacker_training.episodes = 2000;
    d.episodes_per_entry = 50;
  }
  run.report = dedol::run_dedol(c, d, [](const std::string& phase, const dedol::IterationRecord& r) {
    std::cerr << "  [dedol] " << phase << " iteration " << r.iteration << " EU " << r.defender_eu << " strategies "
              << r.defenders.size() << "x" << r.attackers.size() << "\n";
  });
  run.ran = true;
  return run;
}

Outcome dedol_improvement(bool quick) {
  const auto& rep = dedol_run(quick).report;
  std::vector<dedol::IterationRecord> global;
  for (const auto& [phase, r] : rep.records) {
    if (phase == "global") global.push_back(r);
  }
  if (global.empty()) return {false, "no records"};
  const auto sel = dedol::select_final_strategy(global);
  bool monotone = true, margins = true;
  for (std::size_t i = 1; i < global.size(); ++i) {
    monotone = monotone && global[i].defenders.size() >= global[i - 1].defenders.size() &&
               global[i].attackers.size() >= global[i - 1].attackers.size();
  }
  for (const auto& r : global) {
    for (const dedol::Validation* v : {&r.validation, r.retrain_validation ? &*r.retrain_validation : nullptr}) {
      if (!v) continue;
      if (v->defender_added) margins = margins && v->defender_margin >= v->delta && v->defender_margin > 0.0;
      if (v->attacker_added) margins = margins && v->attacker_margin >= v->delta && v->attacker_margin > 0.0;
    }
  }
  std::ostringstream d;
  d << "selected EU " << sel.eu << " (record " << sel.record << (sel.retrained_candidate ? ", retrained" : "")
    << ") vs iteration-0 EU " << global[0].defender_eu << ", " << global.size() - 1 << " iterations, lists "
    << global.back().defenders.size() << "x" << global.back().attackers.size() << ", EU by "
    << global[0].eu_method;
  return {sel.eu >= global[0].defender_eu && monotone && margins && global[0].eu_method == "exact", d.str()};
}

Outcome exploration_mixing(bool quick) {
  double worst = 0.0;
  Rng rng(5);
  for (int n = 1; n <= 20; ++n) {
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i) p(i) = rng.uniform() * (rng.bernoulli(0.3) ? 0.0 : 1.0) + 1e-300;
    p /= p.sum();
    worst = std::max(worst, std::abs(make_exploration_mixture(p, 0.15).uniform_mass() - 0.15));
  }
  int used = 0;
  for (const auto& [phase, r] : dedol_run(quick).report.records) {
    if (r.iteration == 0) continue;
    ++used;
    worst = std::max({worst, std::abs(r.uniform_mass_defender - 0.15), std::abs(r.uniform_mass_attacker - 0.15)});
  }
  return {worst <= 1e-12 && used > 0,
          "max |uniform mass - 0.15| " + fmt("%.3g", worst) + " over 20 synthetic and " + std::to_string(used) +
              " training-time mixtures"};
}

Outcome tree_scale() {
  const GameConfig c = standard_small_config();
  exact::TreeOptions o;
  const exact::GameTree t = exact::build_game_tree(c, o);
  const double nodes = static_cast<double>(t.num_nodes());
  const double bytes = static_cast<double>(t.memory_bytes());
  const double explicit_estimate = exact::estimate_tree_size(c, 2000, 1, true);
  const bool in_range = nodes >= 4.5e7 / 2 && nodes <= 4.5e7 * 2;
  const bool in_budget = bytes <= static_cast<double>(o.budget.max_bytes);
  std::ostringstream d;
  d << "nodes " << nodes << " (target window [2.25e7, 9e7]), memory " << bytes / (1 << 20) << " MiB of "
    << o.budget.max_bytes / (1 << 20) << " MiB; explicit-trigger tree estimated at " << explicit_estimate << " nodes";
  return {in_range && in_budget, d.str()};
}

Outcome invariants() {
  const auto r = testing::run_invariant_suite(100000, 20260101);
  std::ostringstream d;
  d << r.steps << " steps in " << r.episodes << " episodes, " << r.failures.size() << " violations";
  if (!r.failures.empty()) d << "; first: " << r.failures.front();
  return {r.ok() && r.steps >= 100000, d.str()};
}

std::set<int> parse_list(const std::string& s) {
  std::set<int> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string only, expect_fail;
  bool quick = false;
  app.add_option("--only", only, "comma-separated criteria to run");
  app.add_option("--expect-fail", expect_fail, "criteria whose failure does not fail the run");
  app.add_flag("--quick", quick, "smaller training budgets (not the pinned settings)");
  CLI11_PARSE(app, argc, argv);
  const std::set<int> selected = parse_list(only), tolerated = parse_list(expect_fail);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence", oracle_equivalence},
      {"solver certificate", solver_certificate},
      {"gradient checks", gradient_checks},
      {"CFR sanity", cfr_sanity},
      {"DQN ordering", [&] { return dqn_ordering(quick); }},
      {"DeDOL improvement", [&] { return dedol_improvement(quick); }},
      {"exploration mixing", [&] { return exploration_mixing(quick); }},
      {"tree scale", tree_scale},
      {"simulator invariants", invariants},
  };

  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << criteria[i].first << ": " << o.detail << " ["
              << fmt("%.1f", secs) << " s]" << (!o.pass && tolerated.count(id) ? " (expected)" : "") << std::endl;
    if (!o.pass && !tolerated.count(id)) ++unexpected;
  }
  return unexpected == 0 ? 0 : 1;
}
