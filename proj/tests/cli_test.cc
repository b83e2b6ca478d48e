// Copyright 2026 The peerlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "peerlab/cli.h"

namespace peerlab {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

fs::path Scratch() {
  const fs::path dir = fs::temp_directory_path() / "peerlab_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string WriteConfig(const std::string& name, const std::string& body) {
  const fs::path path = Scratch() / (name + ".json");
  std::ofstream(path) << body;
  return path.string();
}

Run Invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "peerlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

const char* kFour = R"({
  "prior": 0.6,
  "assignment": {"m": 4, "n": 4, "D": 2, "T": 2, "scheme": "full_dminus1"},
  "agents": {"proficiency": 0.8},
  "profile": {"preset": "PRESET"},
  "seed": 11,
  "trials": 2000
})";

std::string Four(const std::string& preset) {
  std::string s = kFour;
  s.replace(s.find("PRESET"), 6, preset);
  return s;
}

TEST_SUITE("cli") {

TEST_CASE("assign prints one row per report and passes validation") {
  const Run r = Invoke({"assign", "--config", WriteConfig("four", Four("all_truth"))});
  CHECK(r.code == kExitOk);
  const auto lines = Lines(r.out);
  REQUIRE(lines.size() > 10);
  CHECK(lines[0].rfind("# config_hash=", 0) == 0);
  CHECK(lines[0].find("seed=11") != std::string::npos);
  CHECK(lines[1] == "agent,block,task,ref_rater,s_own,s_ref");
  int rows = 0;
  for (std::size_t k = 2; k < lines.size() && !lines[k].empty(); ++k) ++rows;
  CHECK(rows == 8);
  CHECK(r.out.find("violations=0") != std::string::npos);
}

TEST_CASE("infeasible block sizes exit with the validation code") {
  const Run r = Invoke({"assign", "--config", WriteConfig("bad", R"({
    "assignment": {"m": 4, "n": 4, "D": 3, "T": 3}})")});
  CHECK(r.code == kExitValidation);
  CHECK(r.err.find("m/D not integral") != std::string::npos);
  const Run full = Invoke({"assign", "--config", WriteConfig("small_full", R"({
    "assignment": {"m": 6, "n": 4, "D": 3, "T": 2, "scheme": "full_dminus1"}})")});
  CHECK(full.code == kExitValidation);
}

TEST_CASE("simulate blind profile pays zero") {
  const Run r =
      Invoke({"simulate", "--config", WriteConfig("blind", Four("blind_h"))});
  REQUIRE(r.code == kExitOk);
  const auto lines = Lines(r.out);
  CHECK(lines[1] == "agent,trials,mean_R,stderr,beta,payment");
  for (std::size_t k = 2; k < 6; ++k) {
    CHECK(lines[k].find(",2000,0,0,1,0") != std::string::npos);
  }
}

TEST_CASE("simulate output is reproducible and seed-sensitive") {
  const std::string cfg = WriteConfig("repro", Four("all_truth"));
  const Run a = Invoke({"simulate", "--config", cfg});
  const Run b = Invoke({"simulate", "--config", cfg});
  CHECK(a.out == b.out);
  const Run c = Invoke({"simulate", "--config", cfg, "--seed", "12"});
  CHECK(c.out != a.out);
  CHECK(c.out.find("seed=12") != std::string::npos);
}

TEST_CASE("equilibrium verdicts") {
  const Run truth = Invoke(
      {"equilibrium", "--config", WriteConfig("eq_truth", Four("all_truth"))});
  REQUIRE(truth.code == kExitOk);
  CHECK(truth.out.find("verdict=NASH") != std::string::npos);

  const Run trusted = Invoke({"equilibrium", "--config", WriteConfig("eq_coin", R"({
    "prior": 0.6,
    "assignment": {"m": 4, "n": 4, "D": 2, "T": 2},
    "agents": {"proficiency": 0.8},
    "profile": {"preset": "coin", "r": 0.3},
    "trusted": {"mass": 0.1, "proficiency": 0.9}})")});
  REQUIRE(trusted.code == kExitOk);
  CHECK(trusted.out.find("verdict=NOT-NASH") != std::string::npos);
  CHECK(trusted.out.find(",NOT-NASH,") != std::string::npos);
}

TEST_CASE("grid scan lists the tied maxima first") {
  const Run r = Invoke({"equilibrium", "--config", WriteConfig("grid", R"({
    "prior": 0.6, "grid_scan": {"proficiency": 0.8, "step": 0.25}})")});
  REQUIRE(r.code == kExitOk);
  const auto lines = Lines(r.out);
  CHECK(lines[1] == "rank,effort,x,y,value");
  CHECK(lines[2].rfind("1,1,1,1,0.1728", 0) == 0);
  CHECK(lines[3].rfind("2,1,0,0,0.1728", 0) == 0);
}

TEST_CASE("oversized enumeration exits with the budget code") {
  const Run r = Invoke({"simulate", "--config", WriteConfig("budget", R"({
    "assignment": {"m": 100, "n": 20, "D": 10, "T": 2},
    "agents": {"proficiency": 0.8},
    "estimator": "enumerate"})")});
  CHECK(r.code == kExitBudget);
  CHECK(r.err.find("refused") != std::string::npos);
}

TEST_CASE("config problems exit with the config code") {
  const Run unknown = Invoke({"simulate", "--config", WriteConfig("unknown", R"({
    "assignment": {"m": 4, "n": 4, "D": 2, "T": 2}, "trails": 10})")});
  CHECK(unknown.code == kExitConfig);
  CHECK(unknown.err.find("trails") != std::string::npos);
  const Run missing = Invoke(
      {"simulate", "--config", (Scratch() / "does_not_exist.json").string()});
  CHECK(missing.code == kExitConfig);
  const Run no_flag = Invoke({"simulate"});
  CHECK(no_flag.code == kExitConfig);
  const Run no_sub = Invoke({});
  CHECK(no_sub.code == kExitConfig);
}

TEST_CASE("analytic values") {
  const Run r = Invoke({"analytic", "--config", WriteConfig("analytic", R"({
    "prior": 0.6, "analytic": {"p": 0.8, "D": 10}})")});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.find("\nf1,0.1728") != std::string::npos);
  CHECK(r.out.find("\ntruth,1.728") != std::string::npos);
  CHECK(r.out.find("\ninvert,-1.728") != std::string::npos);
  CHECK(r.out.find("\nrandom,0\n") != std::string::npos);
}

TEST_CASE("json output and output directories") {
  const fs::path dir = Scratch() / "out";
  fs::remove_all(dir);
  const Run r = Invoke({"simulate", "--config",
                        WriteConfig("json", Four("all_truth")), "--format",
                        "json", "--out", dir.string(), "--trials", "300"});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.empty());
  std::ifstream in(dir / "rewards.json");
  const auto doc = nlohmann::json::parse(in);
  CHECK(doc.at("rows").size() == 4);
  CHECK(doc.at("rows")[0].at("trials") == 300);
}

}  // TEST_SUITE

}  // namespace
}  // namespace peerlab
