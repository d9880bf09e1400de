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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* path = std::getenv("GSGI_CLI");
  return path ? path : "./gsgi";
}

/// Runs the CLI with `args`, discarding output; returns the exit code.
int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("gsgi_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& leaf) const { return (path / leaf).string(); }
};

}  // namespace

TEST_CASE("binary is available") {
  REQUIRE(fs::exists(cli()));
  CHECK(run("--help") == 0);
}

TEST_CASE("genmap is deterministic") {
  TempDir t("genmap");
  REQUIRE(run("genmap --kind gaussian --size 5 --seed 9 --out " + (t / "a.json")) == 0);
  REQUIRE(run("genmap --kind gaussian --size 5 --seed 9 --out " + (t / "b.json")) == 0);
  const auto a = nlohmann::json::parse(slurp(t / "a.json"));
  const auto b = nlohmann::json::parse(slurp(t / "b.json"));
  CHECK(a.dump().size() > 10);
  nlohmann::json a2 = a, b2 = b;
  for (auto* j : {&a2, &b2}) {
    if (j->is_object()) j->erase("provenance");
  }
  CHECK(a2 == b2);
  REQUIRE(run("genmap --kind gaussian --size 5 --seed 10 --out " + (t / "c.json")) == 0);
  nlohmann::json c2 = nlohmann::json::parse(slurp(t / "c.json"));
  if (c2.is_object()) c2.erase("provenance");
  CHECK(c2 != a2);
}

TEST_CASE("simulate writes utilities") {
  TempDir t("simulate");
  REQUIRE(run("simulate --grid 3 --defender random-sweep --attacker heuristic-attacker --episodes 25 --replays 2 --seed 4 --out " +
              t.path.string()) == 0);
  const std::string csv = slurp(t / "utilities.csv");
  CHECK(csv.rfind("episode,entry_row,entry_col,defender_utility\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 26);
  CHECK(fs::exists(t / "replays.jsonl"));
  CHECK(fs::exists(t / "summary.json"));
  const std::string again = (t.path / "again").string();
  REQUIRE(run("simulate --grid 3 --defender random-sweep --attacker heuristic-attacker --episodes 25 --seed 4 --out " +
              again) == 0);
  CHECK(slurp(fs::path(again) / "utilities.csv") == csv);
}

TEST_CASE("dedol records iterations and evaluates its bundle") {
  TempDir t("dedol");
  REQUIRE(run("dedol --grid 3 --iters 2 --train-episodes 30 --matrix-episodes 10 --eu heuristic --seed 2 --out " +
              t.path.string()) == 0);
  std::ifstream in(t / "report.jsonl");
  int iterations = 0, finals = 0;
  for (std::string line; std::getline(in, line);) {
    const auto j = nlohmann::json::parse(line);
    if (j["type"] == "iteration" && j["iteration"].get<int>() > 0) ++iterations;
    if (j["type"] == "final") ++finals;
  }
  CHECK(iterations >= 1);
  CHECK(iterations <= 2);
  CHECK(finals == 1);
  REQUIRE(fs::exists(fs::path(t / "bundle") / "manifest.json"));

  const std::string args = "eval --grid 3 --bundle " + (t / "bundle") + " --opponent heuristic-attacker --episodes 200 --seed 6 --out ";
  REQUIRE(run(args + (t / "e1.json")) == 0);
  REQUIRE(run(args + (t / "e2.json")) == 0);
  const auto e1 = nlohmann::json::parse(slurp(t / "e1.json"));
  const auto e2 = nlohmann::json::parse(slurp(t / "e2.json"));
  CHECK(e1["mean"] == e2["mean"]);
  CHECK(e1["std_error"] == e2["std_error"]);
}

TEST_CASE("cfr and exact best response on a tiny game") {
  TempDir t("cfr");
  REQUIRE(run("cfr --grid 3 --horizon 2 --tools 1 --iterations 200 --trace-every 100 --out " + t.path.string()) == 0);
  CHECK(fs::exists(t / "strategies.csv"));
  CHECK(slurp(t / "exploitability.csv").rfind("iteration,exploitability\n", 0) == 0);
  REQUIRE(run("exact-br --grid 3 --horizon 2 --tools 1 --side defender --opponent heuristic-attacker --out " +
              (t / "br")) == 0);
  CHECK(fs::exists(fs::path(t / "br") / "value.json"));
}

TEST_CASE("exit codes") {
  TempDir t("codes");
  CHECK(run("simulate --episodes 3 --no-such-flag") == 2);
  CHECK(run("simulate --grid 0 --episodes 3 --out " + (t / "s")) == 2);
  CHECK(run("simulate --grid 3 --defender heuristic-attacker --episodes 3 --out " + (t / "s")) == 2);
  {
    std::ofstream bad(t / "bad.json");
    bad << "{\"rows\": 3, \"cols\": 3, \"horizon\": -1}";
  }
  CHECK(run("simulate --config " + (t / "bad.json") + " --episodes 3 --out " + (t / "s")) == 2);
  CHECK(run("cfr --grid 3 --iterations 10 --max-nodes 1000 --out " + (t / "c")) == 3);
  CHECK(run("exact-br --grid 3 --side attacker --opponent random-sweep --max-nodes 1000 --out " + (t / "x")) == 3);
}
