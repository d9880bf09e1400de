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

#include "gsgi/dedol.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "gsgi/exact.hpp"
#include "gsgi/nn/checkpoint.hpp"

namespace gsgi::dedol {

namespace fs = std::filesystem;

Plan parse_plan(const std::string& name) {
  if (name == "pure-global") return Plan::kPureGlobal;
  if (name == "local-then-global") return Plan::kLocalThenGlobal;
  if (name == "pure-local") return Plan::kPureLocal;
  throw ConfigError("unknown plan '" + name + "'");
}

std::string to_string(Plan plan) {
  switch (plan) {
    case Plan::kPureGlobal: return "pure-global";
    case Plan::kLocalThenGlobal: return "local-then-global";
    case Plan::kPureLocal: return "pure-local";
  }
  return "?";
}

EuMethod parse_eu_method(const std::string& name) {
  if (name == "auto") return EuMethod::kAuto;
  if (name == "exact") return EuMethod::kExact;
  if (name == "trained") return EuMethod::kTrained;
  if (name == "heuristic") return EuMethod::kHeuristic;
  throw ConfigError("unknown EU method '" + name + "'");
}

std::string to_string(EuMethod m) {
  switch (m) {
    case EuMethod::kAuto: return "auto";
    case EuMethod::kExact: return "exact";
    case EuMethod::kTrained: return "trained";
    case EuMethod::kHeuristic: return "heuristic";
  }
  return "?";
}

void DedolConfig::validate(const GameConfig& game) const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (max_iterations < 0 || local_iterations < 0) throw ConfigError("iteration counts must be nonnegative");
  if (episodes_per_entry < 1) throw ConfigError("episodes_per_entry must be positive");
  if (eval_episodes < 1) throw ConfigError("eval_episodes must be positive");
  if (defender_training.episodes < 1 || attacker_training.episodes < 1) {
    throw ConfigError("training budget must be positive");
  }
  defender_training.validate();
  attacker_training.validate();
  for (const Cell& e : local_entries) {
    if (std::find(game.entry_points.begin(), game.entry_points.end(), e) == game.entry_points.end()) {
      throw ConfigError("local entry is not an entry point of the game");
    }
  }
  if (plan != Plan::kPureGlobal && local_entries.empty() && game.entry_points.empty()) {
    throw ConfigError("local plan without entry points");
  }
}

DedolConfig default_dedol_config(int grid_size, const std::string& profile) {
  DedolConfig d;
  d.defender_training = rl::training_profile(profile, grid_size, Side::kDefender);
  d.attacker_training = rl::training_profile(profile, grid_size, Side::kAttacker);
  d.eval_training = d.attacker_training;
  d.eval_training.episodes *= 2;
  return d;
}

nlohmann::json to_json(const DedolConfig& d) {
  nlohmann::json entries = nlohmann::json::array();
  for (const Cell& c : d.local_entries) entries.push_back(c);
  return {{"alpha", d.alpha},
          {"max_iterations", d.max_iterations},
          {"local_iterations", d.local_iterations},
          {"plan", to_string(d.plan)},
          {"local_entries", entries},
          {"delta", d.delta},
          {"episodes_per_entry", d.episodes_per_entry},
          {"defender_training", rl::to_json(d.defender_training)},
          {"attacker_training", rl::to_json(d.attacker_training)},
          {"eu_method", to_string(d.eu_method)},
          {"eval_training", rl::to_json(d.eval_training)},
          {"eval_episodes", d.eval_episodes},
          {"vanilla_psro", d.vanilla_psro},
          {"seed", d.seed}};
}

DedolConfig dedol_from_json(const nlohmann::json& j, DedolConfig d) {
  try {
    if (j.contains("alpha")) d.alpha = j.at("alpha").get<double>();
    if (j.contains("max_iterations")) d.max_iterations = j.at("max_iterations").get<int>();
    if (j.contains("local_iterations")) d.local_iterations = j.at("local_iterations").get<int>();
    if (j.contains("plan")) d.plan = parse_plan(j.at("plan").get<std::string>());
    if (j.contains("local_entries")) d.local_entries = j.at("local_entries").get<std::vector<Cell>>();
    if (j.contains("delta")) d.delta = j.at("delta").get<double>();
    if (j.contains("episodes_per_entry")) d.episodes_per_entry = j.at("episodes_per_entry").get<int>();
    if (j.contains("defender_training")) d.defender_training = rl::training_from_json(j.at("defender_training"), d.defender_training);
    if (j.contains("attacker_training")) d.attacker_training = rl::training_from_json(j.at("attacker_training"), d.attacker_training);
    if (j.contains("eu_method")) d.eu_method = parse_eu_method(j.at("eu_method").get<std::string>());
    if (j.contains("eval_training")) d.eval_training = rl::training_from_json(j.at("eval_training"), d.eval_training);
    if (j.contains("eval_episodes")) d.eval_episodes = j.at("eval_episodes").get<int>();
    if (j.contains("vanilla_psro")) d.vanilla_psro = j.at("vanilla_psro").get<bool>();
    if (j.contains("seed")) d.seed = j.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad dedol config: ") + e.what());
  }
  return d;
}

// --- VALID ---------------------------------------------------------------------------

Validation validate_best_responses(RestrictedGame& game, const ZeroSumSolution& ne, PolicyPtr defender_candidate,
                                   PolicyPtr attacker_candidate, const GameConfig& config, int episodes_per_entry,
                                   std::uint64_t seed, double delta, std::optional<Cell> entry) {
  game.check_complete();
  if (ne.defender.size() != game.num_defenders() || ne.attacker.size() != game.num_attackers()) {
    throw std::invalid_argument("equilibrium does not match the restricted game");
  }
  RestrictedGame trial = game;
  trial.add(defender_candidate);
  trial.add(attacker_candidate);
  estimate_payoff_matrix(trial, config, episodes_per_entry, seed, entry);

  const int nd = game.num_defenders(), na = game.num_attackers();
  const Eigen::RowVectorXd cand_row = trial.payoff.row(nd).head(na);
  const Eigen::VectorXd cand_col = trial.payoff.col(na).head(nd);

  Validation v;
  const Eigen::VectorXd rows_vs_ne = game.payoff * ne.attacker;
  const Eigen::RowVectorXd cols_vs_ne = ne.defender.transpose() * game.payoff;
  v.defender_margin = cand_row.dot(ne.attacker) - rows_vs_ne.maxCoeff();
  v.attacker_margin = cols_vs_ne.minCoeff() - ne.defender.dot(cand_col);
  v.delta = delta >= 0.0 ? delta
                         : 3.0 * std::max({trial.std_error.row(nd).head(na).maxCoeff(),
                                           trial.std_error.col(na).head(nd).maxCoeff(), game.std_error.maxCoeff()});
  v.defender_added = v.defender_margin > 0.0 && v.defender_margin >= v.delta;
  v.attacker_added = v.attacker_margin > 0.0 && v.attacker_margin >= v.delta;

  if (v.defender_added) {
    game.add(defender_candidate);
    game.payoff.row(nd) = trial.payoff.row(nd).head(na);
    game.std_error.row(nd) = trial.std_error.row(nd).head(na);
    game.episodes.row(nd) = trial.episodes.row(nd).head(na);
  }
  if (v.attacker_added) {
    game.add(attacker_candidate);
    const int rows = game.num_defenders();
    game.payoff.col(na).head(nd) = trial.payoff.col(na).head(nd);
    game.std_error.col(na).head(nd) = trial.std_error.col(na).head(nd);
    game.episodes.col(na).head(nd) = trial.episodes.col(na).head(nd);
    if (rows > nd) {
      game.payoff(nd, na) = trial.payoff(nd, na);
      game.std_error(nd, na) = trial.std_error(nd, na);
      game.episodes(nd, na) = trial.episodes(nd, na);
    }
  }
  return v;
}

// --- records -------------------------------------------------------------------------

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json to_json(const Validation& v) {
  return {{"defender_added", v.defender_added},
          {"attacker_added", v.attacker_added},
          {"defender_margin", v.defender_margin},
          {"attacker_margin", v.attacker_margin},
          {"delta", v.delta}};
}

}  // namespace

nlohmann::json to_json(const IterationRecord& r) {
  nlohmann::json j = {{"iteration", r.iteration},
                      {"defenders", r.defenders},
                      {"attackers", r.attackers},
                      {"nash_defender", to_vec(r.nash_defender)},
                      {"nash_attacker", to_vec(r.nash_attacker)},
                      {"game_value", r.game_value},
                      {"uniform_mass_defender", r.uniform_mass_defender},
                      {"uniform_mass_attacker", r.uniform_mass_attacker},
                      {"trained_defender", r.trained_defender},
                      {"trained_attacker", r.trained_attacker},
                      {"validation", to_json(r.validation)},
                      {"retrained", r.retrained},
                      {"terminate", r.terminate},
                      {"defender_eu", r.defender_eu},
                      {"eu_method", r.eu_method},
                      {"seconds", r.seconds},
                      {"final_ids", r.final_ids},
                      {"final_weights", r.final_weights}};
  if (r.retrained) {
    j["retrained_defender"] = r.retrained_defender;
    j["retrained_attacker"] = r.retrained_attacker;
    if (r.retrain_validation) j["retrain_validation"] = to_json(*r.retrain_validation);
    if (r.retrained_defender_eu) j["retrained_defender_eu"] = *r.retrained_defender_eu;
  }
  return j;
}

Selection select_final_strategy(const std::vector<IterationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("no iteration records");
  Selection best{0, false, records[0].defender_eu};
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (r.defender_eu >= best.eu) best = {i, false, r.defender_eu};
    if (r.retrained_defender_eu && *r.retrained_defender_eu >= best.eu) best = {i, true, *r.retrained_defender_eu};
  }
  return best;
}

// --- EU evaluation -------------------------------------------------------------------

struct EuEvaluator::Exact {
  exact::GameTree tree;
  std::unordered_map<std::string, exact::Profile> cache;
};

EuEvaluator::EuEvaluator(const GameConfig& config, EuMethod method, rl::TrainingConfig training, int episodes,
                         std::uint64_t seed)
    : config_(config), method_(method), training_(std::move(training)), episodes_(episodes), seed_(seed) {
  if (method_ == EuMethod::kAuto) {
    const double estimate = exact::estimate_tree_size(config_, 500, seed_);
    method_ = estimate <= 3e7 ? EuMethod::kExact : EuMethod::kTrained;
  }
  if (method_ == EuMethod::kExact) {
    exact::TreeOptions options;
    exact_ = std::make_unique<Exact>(Exact{exact::build_game_tree(config_, options), {}});
  }
}

EuEvaluator::~EuEvaluator() = default;

double EuEvaluator::evaluate(const PolicyMixture& defender) {
  defender.validate();
  ++calls_;
  if (method_ == EuMethod::kExact) {
    std::vector<exact::Profile> profiles;
    for (const auto& p : defender.policies) {
      auto it = exact_->cache.find(p->id);
      if (it == exact_->cache.end()) {
        auto agent = make_agent(*p, config_);
        it = exact_->cache.emplace(p->id, exact::behavioural_profile(exact_->tree, config_, *agent)).first;
      }
      profiles.push_back(it->second);
    }
    const auto mixed = exact::mix_profiles(exact_->tree, Side::kDefender, profiles, defender.weights);
    return -exact::exact_best_response(exact_->tree, mixed, Side::kAttacker).value;
  }
  const std::uint64_t s = mix_seed(seed_, 0xE7, static_cast<std::uint64_t>(calls_));
  const auto heuristic = PolicyMixture::pure(make_policy("heuristic-attacker", Side::kAttacker, HeuristicAttackerPolicy{}));
  double eu = evaluate_matchup(config_, defender, heuristic, episodes_, s).mean;
  if (method_ == EuMethod::kTrained) {
    rl::TrainingConfig t = training_;
    t.seed = mix_seed(s, 1);
    auto br = rl::train_best_response(config_, Side::kAttacker, defender, t);
    auto policy = rl::network_policy("eval-br", Side::kAttacker, br.network);
    eu = std::min(eu, evaluate_matchup(config_, defender, PolicyMixture::pure(policy), episodes_, mix_seed(s, 2)).mean);
  }
  return eu;
}

// --- DeDOL-S -------------------------------------------------------------------------

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void describe_game(IterationRecord& r, const RestrictedGame& game, const ZeroSumSolution& ne) {
  r.defenders.clear();
  r.attackers.clear();
  for (const auto& p : game.defenders) r.defenders.push_back(p->id);
  for (const auto& p : game.attackers) r.attackers.push_back(p->id);
  r.nash_defender = ne.defender;
  r.nash_attacker = ne.attacker;
  r.game_value = ne.value;
  const PolicyMixture m = to_mixture(game, Side::kDefender, ne.defender);
  r.final_ids.clear();
  for (const auto& p : m.policies) r.final_ids.push_back(p->id);
  r.final_weights = m.weights;
}

PolicyPtr train_oracle(const GameConfig& config, Side side, const PolicyMixture& opponent,
                       rl::TrainingConfig training, std::uint64_t seed, const std::string& id) {
  training.seed = seed;
  auto result = rl::train_best_response(config, side, opponent, training);
  return rl::network_policy(id, side, result.network);
}

}  // namespace

DedolResult run_dedol_s(RestrictedGame initial, const GameConfig& config, const DedolConfig& dedol, int iterations,
                        EuEvaluator& eu, const std::string& phase, std::optional<Cell> entry,
                        const RecordSink& sink) {
  dedol.validate(config);
  if (initial.defenders.empty() || initial.attackers.empty()) {
    throw std::invalid_argument("initial restricted game needs a strategy per side");
  }
  const std::uint64_t matrix_seed = mix_seed(dedol.seed, hash_string(phase));
  DedolResult out;
  out.game = std::move(initial);
  std::vector<PolicyPtr> candidates;
  RestrictedGame& game = out.game;

  auto t0 = std::chrono::steady_clock::now();
  estimate_payoff_matrix(game, config, dedol.episodes_per_entry, matrix_seed, entry);
  ZeroSumSolution ne = solve_zero_sum(game.payoff);
  {
    IterationRecord r;
    describe_game(r, game, ne);
    r.defender_eu = eu.evaluate(to_mixture(game, Side::kDefender, ne.defender));
    r.eu_method = to_string(eu.method());
    r.seconds = seconds_since(t0);
    out.records.push_back(r);
    if (sink) sink(phase, r);
  }

  for (int t = 1; t <= iterations; ++t) {
    t0 = std::chrono::steady_clock::now();
    IterationRecord r;
    r.iteration = t;
    const ExplorationMixture ex_d = make_exploration_mixture(ne.defender, dedol.alpha);
    const ExplorationMixture ex_a = make_exploration_mixture(ne.attacker, dedol.alpha);
    r.uniform_mass_defender = ex_d.uniform_mass();
    r.uniform_mass_attacker = ex_a.uniform_mass();
    const std::uint64_t iter_seed = mix_seed(dedol.seed, hash_string(phase), static_cast<std::uint64_t>(t));
    const std::string tag = phase + "-" + std::to_string(t);

    GameConfig local = config;
    if (entry) local = config.with_single_entry(*entry);
    PolicyPtr fd = train_oracle(local, Side::kDefender, to_mixture(game, Side::kAttacker, ex_a.combined),
                                dedol.defender_training, mix_seed(iter_seed, 1), tag + "-def");
    PolicyPtr fa = train_oracle(local, Side::kAttacker, to_mixture(game, Side::kDefender, ex_d.combined),
                                dedol.attacker_training, mix_seed(iter_seed, 2), tag + "-att");
    r.trained_defender = fd->id;
    r.trained_attacker = fa->id;
    r.validation = validate_best_responses(game, ne, fd, fa, config, dedol.episodes_per_entry, matrix_seed,
                                           dedol.delta, entry);

    if (!r.validation.defender_added && !r.validation.attacker_added) {
      r.retrained = true;
      PolicyPtr rd = train_oracle(local, Side::kDefender, to_mixture(game, Side::kAttacker, ne.attacker),
                                  dedol.defender_training, mix_seed(iter_seed, 3), tag + "-def-pure");
      PolicyPtr ra = train_oracle(local, Side::kAttacker, to_mixture(game, Side::kDefender, ne.defender),
                                  dedol.attacker_training, mix_seed(iter_seed, 4), tag + "-att-pure");
      r.retrained_defender = rd->id;
      r.retrained_attacker = ra->id;
      r.retrain_validation = validate_best_responses(game, ne, rd, ra, config, dedol.episodes_per_entry,
                                                     matrix_seed, dedol.delta, entry);
      r.retrained_defender_eu = eu.evaluate(PolicyMixture::pure(rd));
      candidates.push_back(rd);
      r.terminate = !r.retrain_validation->defender_added && !r.retrain_validation->attacker_added;
    }

    estimate_payoff_matrix(game, config, dedol.episodes_per_entry, matrix_seed, entry);
    ne = solve_zero_sum(game.payoff);
    describe_game(r, game, ne);
    r.defender_eu = eu.evaluate(to_mixture(game, Side::kDefender, ne.defender));
    r.eu_method = to_string(eu.method());
    r.seconds = seconds_since(t0);
    out.records.push_back(r);
    if (sink) sink(phase, r);
    if (r.terminate) break;
  }

  out.selection = select_final_strategy(out.records);
  const IterationRecord& chosen = out.records[out.selection.record];
  if (out.selection.retrained_candidate) {
    for (const auto& p : candidates) {
      if (p->id == chosen.retrained_defender) out.final_defender = PolicyMixture::pure(p);
    }
  } else {
    for (std::size_t i = 0; i < chosen.final_ids.size(); ++i) {
      for (const auto& p : game.defenders) {
        if (p->id == chosen.final_ids[i]) {
          out.final_defender.policies.push_back(p);
          out.final_defender.weights.push_back(chosen.final_weights[i]);
        }
      }
    }
  }
  return out;
}

RestrictedGame initial_game(const GameConfig& config, const DedolConfig& dedol) {
  if (!dedol.vanilla_psro) {
    return make_restricted_game({make_policy("random-sweep", Side::kDefender, RandomSweepPolicy{})},
                                {make_policy("heuristic-attacker", Side::kAttacker, HeuristicAttackerPolicy{})});
  }
  const int g = std::max(config.rows, config.cols);
  auto untrained = [&](Side side, const rl::TrainingConfig& t, std::uint64_t salt) {
    const auto head = t.variant == rl::Variant::kDuelingDouble ? nn::HeadKind::kDueling : nn::HeadKind::kSingleQ;
    auto net = std::make_shared<nn::QNetwork>(
        nn::build_network<float>(g, head, num_actions(side), mix_seed(dedol.seed, 0x1A17, salt)));
    return rl::network_policy(std::string("init-") + to_string(side), side, std::move(net));
  };
  return make_restricted_game({untrained(Side::kDefender, dedol.defender_training, 1)},
                              {untrained(Side::kAttacker, dedol.attacker_training, 2)});
}

DedolReport run_dedol(const GameConfig& config, const DedolConfig& dedol, const RecordSink& sink) {
  config.validate();
  dedol.validate(config);
  DedolReport report;
  std::mutex sink_mutex;
  RecordSink locked = [&](const std::string& phase, const IterationRecord& r) {
    std::lock_guard<std::mutex> lock(sink_mutex);
    report.records.emplace_back(phase, r);
    if (sink) sink(phase, r);
  };

  EuEvaluator global_eu(config, dedol.eu_method, dedol.eval_training, dedol.eval_episodes,
                        mix_seed(dedol.seed, 0xE0));
  if (dedol.plan == Plan::kPureGlobal) {
    auto result = run_dedol_s(initial_game(config, dedol), config, dedol, dedol.max_iterations, global_eu, "global",
                              std::nullopt, locked);
    report.final_defender = result.final_defender;
    report.game = std::move(result.game);
    return report;
  }

  const std::vector<Cell> entries = dedol.local_entries.empty() ? config.entry_points : dedol.local_entries;
  if (entries.empty()) throw ConfigError("local plan without entry points");
  std::vector<DedolResult> local_results(entries.size());
  std::vector<std::exception_ptr> errors(entries.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < entries.size();) {
      try {
        const GameConfig local = config.with_single_entry(entries[k]);
        const std::string phase =
            "local-r" + std::to_string(entries[k].row) + "c" + std::to_string(entries[k].col);
        EuEvaluator eu(local, dedol.eu_method, dedol.eval_training, dedol.eval_episodes,
                       mix_seed(dedol.seed, 0xE1, k));
        local_results[k] = run_dedol_s(initial_game(local, dedol), local, dedol, dedol.local_iterations, eu, phase,
                                       std::nullopt, locked);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int workers = std::min<int>(worker_count(), static_cast<int>(entries.size()));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Union of all local pools, re-estimated in the global game.
  RestrictedGame unioned;
  auto known = [&](const std::string& id) {
    for (const auto& p : unioned.defenders) if (p->id == id) return true;
    for (const auto& p : unioned.attackers) if (p->id == id) return true;
    return false;
  };
  for (std::size_t k = 0; k < entries.size(); ++k) {
    const DedolResult& r = local_results[k];
    for (const auto& p : r.game.defenders) if (!known(p->id)) unioned.add(p);
    for (const auto& p : r.game.attackers) if (!known(p->id)) unioned.add(p);
    report.cross_mode.push_back({{"entry", entries[k]},
                                 {"local_eu", r.selection.eu},
                                 {"global_eu", global_eu.evaluate(r.final_defender)}});
  }
  const int global_iterations = dedol.plan == Plan::kPureLocal ? 0 : dedol.max_iterations;
  auto result = run_dedol_s(std::move(unioned), config, dedol, global_iterations, global_eu, "global", std::nullopt,
                            locked);
  report.final_defender = result.final_defender;
  report.game = std::move(result.game);
  return report;
}

// --- strategy bundles ----------------------------------------------------------------

namespace {

std::string file_stem(const std::string& id) {
  std::string s;
  for (char c : id) s += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  return s;
}

}  // namespace

void save_bundle(const std::string& dir, const PolicyMixture& mixture, const nlohmann::json& provenance) {
  mixture.validate();
  fs::create_directories(dir);
  nlohmann::json strategies = nlohmann::json::array();
  for (std::size_t i = 0; i < mixture.policies.size(); ++i) {
    const PurePolicy& p = *mixture.policies[i];
    nlohmann::json entry = describe(p);
    entry["weight"] = mixture.weights[i];
    if (const auto* q = std::get_if<QNetworkPolicy>(&p.kind)) {
      const std::string file = file_stem(p.id) + ".qnet";
      nn::save_checkpoint(*q->network, (fs::path(dir) / file).string());
      entry["checkpoint"] = file;
    }
    strategies.push_back(entry);
  }
  nlohmann::json manifest = provenance;
  manifest["side"] = to_string(mixture.side());
  manifest["strategies"] = strategies;
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw std::runtime_error("cannot write bundle manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

PolicyMixture load_bundle(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + dir);
  nlohmann::json manifest;
  try {
    in >> manifest;
    PolicyMixture m;
    for (const auto& s : manifest.at("strategies")) {
      const std::string id = s.at("id").get<std::string>();
      const Side side = s.at("side").get<std::string>() == "attacker" ? Side::kAttacker : Side::kDefender;
      const std::string kind = s.at("kind").get<std::string>();
      PolicyKind pk;
      if (kind == "heuristic-attacker") {
        HeuristicAttackerParams hp;
        const auto& j = s.at("params");
        hp.w_p = j.at("w_p");
        hp.w_i = j.at("w_i");
        hp.w_o = j.at("w_o");
        hp.tau = j.at("tau");
        pk = HeuristicAttackerPolicy{hp};
      } else if (kind == "heuristic-defender") {
        HeuristicDefenderParams hp;
        const auto& j = s.at("params");
        hp.w_p = j.at("w_p");
        hp.w_i = j.at("w_i");
        hp.w_o = j.at("w_o");
        pk = HeuristicDefenderPolicy{hp};
      } else if (kind == "random-sweep") {
        pk = RandomSweepPolicy{};
      } else if (kind == "uniform-random") {
        pk = UniformRandomPolicy{};
      } else if (kind == "q-network") {
        auto net = std::make_shared<nn::QNetwork>(
            nn::load_checkpoint<float>((fs::path(dir) / s.at("checkpoint").get<std::string>()).string()));
        pk = QNetworkPolicy{std::move(net)};
      } else {
        throw ConfigError("unknown strategy kind '" + kind + "'");
      }
      m.policies.push_back(make_policy(id, side, std::move(pk)));
      m.weights.push_back(s.at("weight").get<double>());
    }
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed bundle manifest: " + std::string(e.what()));
  }
}

}  // namespace gsgi::dedol
