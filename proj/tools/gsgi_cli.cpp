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

// Command-line front end: simulate, train-br, dedol, cfr, eval, exact-br, genmap.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gsgi/cfr.hpp"
#include "gsgi/config.hpp"
#include "gsgi/dedol.hpp"
#include "gsgi/exact.hpp"
#include "gsgi/metagame.hpp"
#include "gsgi/nn/checkpoint.hpp"
#include "gsgi/policies.hpp"
#include "gsgi/rl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gsgi;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

std::string g_command_line;

struct GameOptions {
  std::string config_path;
  int grid = 3;
  int horizon = -1;
  int tools = -1;
  std::string map = "uniform";
  std::uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "game config JSON (overrides --grid/--map)");
    app->add_option("--grid", grid, "square grid size");
    app->add_option("--horizon", horizon, "time horizon (default depends on grid)");
    app->add_option("--tools", tools, "attack tools (default depends on grid)");
    app->add_option("--map", map, "map kind: uniform or gaussian");
    app->add_option("--seed", seed, "root seed");
  }

  GameConfig build() const {
    if (!config_path.empty()) {
      GameConfig c = load_config(config_path);
      if (horizon >= 0) c.horizon = horizon;
      if (tools >= 0) c.num_tools = tools;
      c.validate();
      return c;
    }
    if (grid < 2) throw ConfigError("grid must be at least 2");
    const int h = horizon >= 0 ? horizon : (grid == 3 || grid == 5 || grid == 7 ? default_horizon(grid) : 2 * grid);
    const int k = tools >= 0 ? tools : (grid == 3 || grid == 5 || grid == 7 ? default_tools(grid) : grid);
    return make_square_config(grid, parse_map_kind(map), h, k, seed);
  }
};

json provenance(const GameConfig* config, std::uint64_t seed) {
  json j = {{"command", g_command_line}, {"seed", seed}, {"version", kVersion}};
  if (config) {
    std::ostringstream hash;
    hash << std::hex << config_hash(*config);
    j["config_hash"] = hash.str();
  }
  return j;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

/// Writes `path` plus `path.manifest.json`.
void write_artifact(const fs::path& path, const std::string& text, const json& prov) {
  write_text(path, text);
  write_text(fs::path(path.string() + ".manifest.json"), prov.dump(2) + "\n");
}

Side parse_side(const std::string& s) {
  if (s == "defender") return Side::kDefender;
  if (s == "attacker") return Side::kAttacker;
  throw ConfigError("side must be defender or attacker");
}

/// random-sweep | heuristic-defender | heuristic-attacker | uniform | qnet:FILE | bundle:DIR
PolicyMixture parse_policy(const std::string& spec, Side side) {
  auto check = [&](Side expected) {
    if (expected != side) throw ConfigError("policy '" + spec + "' plays the other side");
  };
  if (spec == "random-sweep") {
    check(Side::kDefender);
    return PolicyMixture::pure(make_policy(spec, side, RandomSweepPolicy{}));
  }
  if (spec == "heuristic-defender") {
    check(Side::kDefender);
    return PolicyMixture::pure(make_policy(spec, side, HeuristicDefenderPolicy{}));
  }
  if (spec == "heuristic-attacker") {
    check(Side::kAttacker);
    return PolicyMixture::pure(make_policy(spec, side, HeuristicAttackerPolicy{}));
  }
  if (spec == "uniform") return PolicyMixture::pure(make_policy(spec, side, UniformRandomPolicy{}));
  if (spec.rfind("qnet:", 0) == 0) {
    const std::string file = spec.substr(5);
    if (!fs::exists(file)) throw ConfigError("no checkpoint " + file);
    auto net = std::make_shared<nn::QNetwork>(nn::load_checkpoint<float>(file));
    return PolicyMixture::pure(rl::network_policy(fs::path(file).stem().string(), side, std::move(net)));
  }
  if (spec.rfind("bundle:", 0) == 0) {
    PolicyMixture m = dedol::load_bundle(spec.substr(7));
    if (m.side() != side) throw ConfigError("bundle plays the other side");
    return m;
  }
  throw ConfigError("unknown policy '" + spec + "'");
}

void print_stats(const std::string& label, const UtilityStats& s) {
  std::cout << label << " mean " << s.mean << " se " << s.std_error << " ci95 [" << s.mean - s.ci95() << ", "
            << s.mean + s.ci95() << "] episodes " << s.episodes << "\n";
}

json stats_json(const UtilityStats& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"std_error", s.std_error}, {"ci95_low", s.mean - s.ci95()},
          {"ci95_high", s.mean + s.ci95()}, {"episodes", s.episodes}};
}

// --- subcommands ---------------------------------------------------------------------

int cmd_genmap(const std::string& kind, int size, std::uint64_t seed, int clip, const std::string& out) {
  if (size < 2) throw ConfigError("size must be at least 2");
  const auto entries = corner_cells(size, size);
  const auto map = generate_map(parse_map_kind(kind), size, size, entries, seed, clip);
  json j = {{"rows", size}, {"cols", size}, {"kind", to_string(parse_map_kind(kind))}, {"seed", seed},
            {"entry_points", entries}, {"success_map", map}};
  const fs::path path = out.empty() ? fs::path("map.json") : fs::path(out);
  write_artifact(path, j.dump(2) + "\n", provenance(nullptr, seed));
  std::cout << "wrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_simulate(const GameOptions& g, const std::string& def_spec, const std::string& att_spec, int episodes,
                 int replays, const std::string& out) {
  if (episodes < 1) throw ConfigError("episodes must be positive");
  const GameConfig config = g.build();
  const PolicyMixture dm = parse_policy(def_spec, Side::kDefender);
  const PolicyMixture am = parse_policy(att_spec, Side::kAttacker);
  auto d = dm.make_agent(config);
  auto a = am.make_agent(config);
  std::ostringstream csv, jsonl;
  csv.precision(12);
  csv << "episode,entry_row,entry_col,defender_utility\n";
  std::vector<double> utilities;
  for (int i = 0; i < episodes; ++i) {
    const bool record = i < replays;
    auto r = rollout_episode(config, *d, *a, mix_seed(g.seed, static_cast<std::uint64_t>(i)), std::nullopt, record);
    utilities.push_back(r.defender_utility);
    csv << i << ',' << r.entry.row << ',' << r.entry.col << ',' << r.defender_utility << '\n';
    if (record) {
      json steps = json::array();
      for (const auto& s : r.replay) steps.push_back(to_json(s));
      jsonl << json{{"episode", i}, {"entry", r.entry}, {"defender_utility", r.defender_utility}, {"steps", steps}}.dump()
            << '\n';
    }
  }
  const UtilityStats s = summarize(utilities);
  print_stats("defender utility", s);
  const json prov = provenance(&config, g.seed);
  write_artifact(fs::path(out) / "utilities.csv", csv.str(), prov);
  if (replays > 0) write_artifact(fs::path(out) / "replays.jsonl", jsonl.str(), prov);
  json summary = stats_json(s);
  summary["provenance"] = prov;
  write_text(fs::path(out) / "summary.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_train_br(const GameOptions& g, const std::string& side_name, const std::string& opponent,
                 const std::string& profile, int episodes, const std::string& variant, const std::string& out) {
  const GameConfig config = g.build();
  const Side side = parse_side(side_name);
  rl::TrainingConfig t = rl::training_profile(profile, config.rows, side);
  if (episodes > 0) t.episodes = episodes;
  if (!variant.empty()) t.variant = rl::parse_variant(variant);
  t.seed = g.seed;
  t.validate();
  const PolicyMixture opp = parse_policy(opponent, other(side));
  auto result = rl::train_best_response(config, side, opp, t);
  const json prov = provenance(&config, g.seed);
  fs::create_directories(out);
  nn::save_checkpoint(*result.network, (fs::path(out) / "br.qnet").string());
  json manifest = prov;
  manifest["training"] = rl::to_json(t);
  manifest["side"] = to_string(side);
  manifest["opponent"] = opponent;
  write_text(fs::path(out) / "br.qnet.manifest.json", manifest.dump(2) + "\n");
  std::ostringstream csv;
  csv << "episode,mean_utility,epsilon\n";
  for (const auto& c : result.curve) csv << c.episode << ',' << c.mean_utility << ',' << c.epsilon << '\n';
  write_artifact(fs::path(out) / "curve.csv", csv.str(), prov);
  auto self = rl::network_policy("br", side, result.network);
  const auto stats = side == Side::kDefender
                         ? evaluate_matchup(config, PolicyMixture::pure(self), opp, 2000, mix_seed(g.seed, 0xEE))
                         : evaluate_matchup(config, opp, PolicyMixture::pure(self), 2000, mix_seed(g.seed, 0xEE));
  print_stats("defender utility of trained response", stats);
  std::cout << "env steps " << result.env_steps << " updates " << result.updates << "\n";
  return kExitOk;
}

int cmd_dedol(const GameOptions& g, const std::string& plan, int iters, int local_iters, double alpha,
              const std::string& profile, int episodes, int matrix_episodes, const std::string& eu_method,
              bool vanilla, const std::string& out) {
  const GameConfig config = g.build();
  dedol::DedolConfig d = dedol::default_dedol_config(config.rows, profile);
  d.plan = dedol::parse_plan(plan);
  d.max_iterations = iters;
  d.local_iterations = local_iters;
  d.alpha = alpha;
  d.seed = g.seed;
  d.vanilla_psro = vanilla;
  d.eu_method = dedol::parse_eu_method(eu_method);
  if (episodes > 0) {
    d.defender_training.episodes = episodes;
    d.attacker_training.episodes = episodes;
    d.eval_training.episodes = 2 * episodes;
  }
  if (matrix_episodes > 0) d.episodes_per_entry = matrix_episodes;
  d.validate(config);
  const json prov = provenance(&config, g.seed);
  fs::create_directories(out);
  std::ofstream report(fs::path(out) / "report.jsonl");
  report << json{{"type", "header"}, {"provenance", prov}, {"dedol", dedol::to_json(d)}, {"game", config_to_json(config)}}.dump()
         << '\n';
  auto sink = [&](const std::string& phase, const dedol::IterationRecord& r) {
    json j = to_json(r);
    j["type"] = "iteration";
    j["phase"] = phase;
    report << j.dump() << '\n';
    report.flush();
    std::cout << phase << " iteration " << r.iteration << " defender EU " << r.defender_eu << " strategies "
              << r.defenders.size() << "x" << r.attackers.size() << (r.terminate ? " TERMINATE" : "") << "\n";
  };
  auto result = dedol::run_dedol(config, d, sink);
  const auto& global = result.records;
  std::vector<dedol::IterationRecord> global_records;
  for (const auto& [phase, r] : global) {
    if (phase == "global") global_records.push_back(r);
  }
  const auto sel = dedol::select_final_strategy(global_records);
  report << json{{"type", "final"}, {"record", sel.record}, {"retrained_candidate", sel.retrained_candidate},
                 {"defender_eu", sel.eu}}.dump()
         << '\n';
  if (!result.cross_mode.empty()) report << json{{"type", "cross_mode"}, {"modes", result.cross_mode}}.dump() << '\n';
  dedol::save_bundle((fs::path(out) / "bundle").string(), result.final_defender, prov);
  write_artifact(fs::path(out) / "payoff.csv", payoff_csv(result.game), prov);
  write_text(fs::path(out) / "report.jsonl.manifest.json", prov.dump(2) + "\n");
  std::cout << "final defender EU " << sel.eu << " (iteration " << global_records[sel.record].iteration << ")\n";
  return kExitOk;
}

exact::TreeOptions tree_options(std::uint64_t max_nodes, bool explicit_triggers) {
  exact::TreeOptions o;
  if (max_nodes > 0) o.budget.max_nodes = max_nodes;
  o.explicit_triggers = explicit_triggers;
  return o;
}

int cmd_cfr(const GameOptions& g, int iterations, int trace_every, std::uint64_t max_nodes, bool explicit_triggers,
            const std::string& out) {
  if (iterations < 1) throw ConfigError("iterations must be positive");
  const GameConfig config = g.build();
  const auto tree = exact::build_game_tree(config, tree_options(max_nodes, explicit_triggers));
  std::cout << "tree " << tree.stats().dump() << "\n";
  exact::CfrOptions opt;
  opt.iterations = iterations;
  opt.seed = g.seed;
  opt.trace_every = trace_every;
  const auto result = exact::run_cfr(tree, opt);
  const json prov = provenance(&config, g.seed);
  write_artifact(fs::path(out) / "strategies.csv", exact::profile_csv(tree, result.average), prov);
  write_artifact(fs::path(out) / "exploitability.csv", exact::trace_csv(result.trace), prov);
  json stats = tree.stats();
  stats["provenance"] = prov;
  stats["nodes_touched"] = result.nodes_touched;
  stats["nodes_per_iteration"] = static_cast<double>(result.nodes_touched) / iterations;
  write_text(fs::path(out) / "tree.json", stats.dump(2) + "\n");
  std::cout << "exploitability " << result.trace.back().exploitability << "\n";
  return kExitOk;
}

int cmd_exact_br(const GameOptions& g, const std::string& side_name, const std::string& opponent,
                 std::uint64_t max_nodes, const std::string& out) {
  const GameConfig config = g.build();
  const Side side = parse_side(side_name);
  const auto tree = exact::build_game_tree(config, tree_options(max_nodes, false));
  const PolicyMixture opp = parse_policy(opponent, other(side));
  const auto agent = opp.make_agent(config);
  const auto profile = exact::behavioural_profile(tree, config, *agent);
  const auto br = exact::exact_best_response(tree, profile, side);
  std::cout << "best response value (" << to_string(side) << " utility) " << br.value << "\n";
  const json prov = provenance(&config, g.seed);
  const auto pure = exact::apply_pure(tree, exact::uniform_profile(tree), br);
  write_artifact(fs::path(out) / "policy.csv", exact::profile_csv(tree, pure), prov);
  json summary = {{"value", br.value}, {"side", to_string(side)}, {"opponent", opponent}, {"tree", tree.stats()},
                  {"provenance", prov}};
  write_text(fs::path(out) / "value.json", summary.dump(2) + "\n");
  return kExitOk;
}

int cmd_eval(const GameOptions& g, const std::string& bundle, const std::string& opponent, bool train_br,
             const std::string& profile, int train_episodes, int episodes, const std::string& out) {
  if (episodes < 1) throw ConfigError("episodes must be positive");
  const GameConfig config = g.build();
  const PolicyMixture def = dedol::load_bundle(bundle);
  if (def.side() != Side::kDefender) throw ConfigError("eval expects a defender bundle");
  PolicyMixture att;
  if (train_br) {
    rl::TrainingConfig t = rl::training_profile(profile, config.rows, Side::kAttacker);
    if (train_episodes > 0) t.episodes = train_episodes;
    t.seed = mix_seed(g.seed, 0xB2);
    auto r = rl::train_best_response(config, Side::kAttacker, def, t);
    att = PolicyMixture::pure(rl::network_policy("trained-br", Side::kAttacker, r.network));
  } else {
    att = parse_policy(opponent, Side::kAttacker);
  }
  const UtilityStats s = evaluate_matchup(config, def, att, episodes, g.seed);
  print_stats("defender utility", s);
  json j = stats_json(s);
  j["opponent"] = train_br ? std::string("trained-br") : opponent;
  j["bundle"] = bundle;
  j["provenance"] = provenance(&config, g.seed);
  if (!out.empty()) write_text(fs::path(out), j.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  for (int i = 0; i < argc; ++i) g_command_line += (i ? " " : "") + std::string(argv[i]);

  CLI::App app{"GSG-I laboratory"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  // genmap
  std::string map_kind = "uniform", map_out;
  int map_size = 3, map_clip = -1;
  std::uint64_t map_seed = 1;
  auto* genmap = app.add_subcommand("genmap", "generate a success-probability map");
  genmap->add_option("--kind", map_kind, "uniform or gaussian");
  genmap->add_option("--size", map_size, "grid side");
  genmap->add_option("--seed", map_seed, "seed");
  genmap->add_option("--clip-radius", map_clip, "entry clip radius (default by size)");
  genmap->add_option("--out", map_out, "output file (default map.json)");

  // simulate
  GameOptions sim_game;
  std::string sim_def = "random-sweep", sim_att = "heuristic-attacker", sim_out = "simulate-out";
  int sim_episodes = 1000, sim_replays = 10;
  auto* simulate = app.add_subcommand("simulate", "play policies against each other");
  sim_game.attach(simulate);
  simulate->add_option("--defender", sim_def, "defender policy");
  simulate->add_option("--attacker", sim_att, "attacker policy");
  simulate->add_option("--episodes", sim_episodes, "episodes");
  simulate->add_option("--replays", sim_replays, "episodes to record in replays.jsonl");
  simulate->add_option("--out", sim_out, "output directory");

  // train-br
  GameOptions br_game;
  std::string br_side = "defender", br_opp = "heuristic-attacker", br_profile = "desk", br_variant, br_out = "train-out";
  int br_episodes = 0;
  auto* train = app.add_subcommand("train-br", "train a DQN best response");
  br_game.attach(train);
  train->add_option("--side", br_side, "learner side");
  train->add_option("--opponent", br_opp, "opponent policy");
  train->add_option("--profile", br_profile, "training profile: desk or full");
  train->add_option("--episodes", br_episodes, "override training episodes");
  train->add_option("--variant", br_variant, "vanilla-double, dueling-double or actor-critic");
  train->add_option("--out", br_out, "output directory");

  // dedol
  GameOptions dd_game;
  std::string dd_plan = "pure-global", dd_profile = "desk", dd_eu = "auto", dd_out = "dedol-out";
  int dd_iters = 3, dd_local = 2, dd_episodes = 0, dd_matrix = 0;
  double dd_alpha = 0.15;
  bool dd_vanilla = false;
  auto* dd = app.add_subcommand("dedol", "run DeDOL");
  dd_game.attach(dd);
  dd->add_option("--plan", dd_plan, "pure-global, local-then-global or pure-local");
  dd->add_option("--iters", dd_iters, "global iterations");
  dd->add_option("--local-iters", dd_local, "iterations per local mode");
  dd->add_option("--alpha", dd_alpha, "exploration rate");
  dd->add_option("--profile", dd_profile, "training profile");
  dd->add_option("--train-episodes", dd_episodes, "override oracle training episodes");
  dd->add_option("--matrix-episodes", dd_matrix, "episodes per payoff entry");
  dd->add_option("--eu", dd_eu, "defender EU method: auto, exact, trained, heuristic");
  dd->add_flag("--vanilla-psro", dd_vanilla, "start from untrained networks instead of heuristics");
  dd->add_option("--out", dd_out, "output directory");

  // cfr
  GameOptions cfr_game;
  int cfr_iters = 1000, cfr_trace = 0;
  std::uint64_t cfr_nodes = 0;
  bool cfr_explicit = false;
  std::string cfr_out = "cfr-out";
  auto* cfr = app.add_subcommand("cfr", "solve a small game with chance-sampled CFR");
  cfr_game.attach(cfr);
  cfr->add_option("--iterations", cfr_iters, "CFR iterations");
  cfr->add_option("--trace-every", cfr_trace, "exploitability trace interval");
  cfr->add_option("--max-nodes", cfr_nodes, "node budget");
  cfr->add_flag("--explicit-triggers", cfr_explicit, "chance nodes for snare triggers");
  cfr->add_option("--out", cfr_out, "output directory");

  // eval
  GameOptions ev_game;
  std::string ev_bundle, ev_opp = "heuristic-attacker", ev_profile = "desk", ev_out;
  bool ev_train = false;
  int ev_train_episodes = 0, ev_episodes = 10000;
  auto* ev = app.add_subcommand("eval", "evaluate a defender strategy bundle");
  ev_game.attach(ev);
  ev->add_option("--bundle", ev_bundle, "bundle directory")->required();
  ev->add_option("--opponent", ev_opp, "attacker policy");
  ev->add_flag("--train-br", ev_train, "train a fresh attacker best response");
  ev->add_option("--profile", ev_profile, "training profile for --train-br");
  ev->add_option("--train-episodes", ev_train_episodes, "override training episodes");
  ev->add_option("--episodes", ev_episodes, "evaluation episodes");
  ev->add_option("--out", ev_out, "result JSON");

  // exact-br
  GameOptions ex_game;
  std::string ex_side = "attacker", ex_opp = "random-sweep", ex_out = "exact-br-out";
  std::uint64_t ex_nodes = 0;
  auto* ex = app.add_subcommand("exact-br", "exact best response on the game tree");
  ex_game.attach(ex);
  ex->add_option("--side", ex_side, "searching side");
  ex->add_option("--opponent", ex_opp, "opponent policy");
  ex->add_option("--max-nodes", ex_nodes, "node budget");
  ex->add_option("--out", ex_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*genmap) return cmd_genmap(map_kind, map_size, map_seed, map_clip, map_out);
    if (*simulate) return cmd_simulate(sim_game, sim_def, sim_att, sim_episodes, sim_replays, sim_out);
    if (*train) return cmd_train_br(br_game, br_side, br_opp, br_profile, br_episodes, br_variant, br_out);
    if (*dd) {
      return cmd_dedol(dd_game, dd_plan, dd_iters, dd_local, dd_alpha, dd_profile, dd_episodes, dd_matrix, dd_eu,
                       dd_vanilla, dd_out);
    }
    if (*cfr) return cmd_cfr(cfr_game, cfr_iters, cfr_trace, cfr_nodes, cfr_explicit, cfr_out);
    if (*ev) return cmd_eval(ev_game, ev_bundle, ev_opp, ev_train, ev_profile, ev_train_episodes, ev_episodes, ev_out);
    if (*ex) return cmd_exact_br(ex_game, ex_side, ex_opp, ex_nodes, ex_out);
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << " (estimate " << e.estimate() << " nodes)\n";
    return kExitBudget;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
