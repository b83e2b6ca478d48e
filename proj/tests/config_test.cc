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
#include <string>

#include "doctest.h"
#include "peerlab/config.h"
#include "peerlab/errors.h"

namespace peerlab {
namespace {

const char* kBlock = R"({
  "prior": 0.6,
  "assignment": {"m": 4, "n": 4, "D": 2, "T": 2, "scheme": "full_dminus1"},
  "agents": {"proficiency": 0.8},
  "profile": {"preset": "all_truth"},
  "seed": 7,
  "trials": 500
})";

TEST_SUITE("config") {

TEST_CASE("a block configuration parses") {
  const ExperimentConfig c = ParseConfig(kBlock);
  CHECK(c.prior.p_h() == 0.6);
  REQUIRE(c.assignment.block.has_value());
  CHECK(*c.assignment.block == BlockSpec{4, 4, 2, 2});
  CHECK(c.assignment.scheme == StatScheme::kFull);
  CHECK(c.seed == 7);
  CHECK(c.trials == 500);
  const Scenario s = BuildScenario(c);
  CHECK(s.agents.size() == 4);
  CHECK(s.agents[3].max_proficiency() == 0.8);
  CHECK(s.assignment.d == 1);
  CHECK(std::get<TaskStrategy>(s.profile.At(AgentId{2}, 1)) ==
        TaskStrategy::Truthful());
}

TEST_CASE("unknown keys are rejected with their path") {
  CHECK_THROWS_WITH_AS(ParseConfig(R"({"prior": 0.6, "seeds": 1})"),
                       doctest::Contains("seeds"), ConfigError);
  CHECK_THROWS_WITH_AS(
      ParseConfig(R"({"assignment": {"m": 4, "n": 4, "D": 2, "T": 2, "t": 1}})"),
      doctest::Contains("assignment.t"), ConfigError);
}

TEST_CASE("syntax errors report a position") {
  CHECK_THROWS_WITH_AS(ParseConfig("{\n  \"prior\": 0.6,\n  oops\n}"),
                       doctest::Contains("line 3"), ConfigError);
}

TEST_CASE("bad values name their field") {
  CHECK_THROWS_WITH_AS(ParseConfig(R"({"prior": {"p_h": 0.6, "p_l": 0.3}})"),
                       doctest::Contains("prior"), ConfigError);
  CHECK_THROWS_WITH_AS(ParseConfig(R"({"profile": {"preset": "coin"}})"),
                       doctest::Contains("profile"), ConfigError);
  CHECK_THROWS_WITH_AS(ParseConfig(R"({"profile": {"preset": "lazy"}})"),
                       doctest::Contains("unknown preset"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"trials": 0})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"beta": -1})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"output": {"format": "xml"}})"),
                  ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"estimator": "exact"})"), ConfigError);
  CHECK_THROWS_AS(ParseConfig(R"({"prior": "high"})"), ConfigError);
}

TEST_CASE("roster length must fit the assignment") {
  ExperimentConfig c = ParseConfig(kBlock);
  c.proficiency = {0.8, 0.9};
  CHECK_THROWS_WITH_AS(BuildScenario(c), doctest::Contains("proficiency"),
                       ConfigError);
  c.proficiency = {0.8, 0.9, 0.7, 0.4};
  CHECK_THROWS_AS(BuildScenario(c), ConfigError);
}

TEST_CASE("missing assignment is reported when needed") {
  const ExperimentConfig c = ParseConfig(R"({"prior": 0.6})");
  CHECK_THROWS_WITH_AS(BuildAssignment(c), doctest::Contains("assignment"),
                       ConfigError);
}

TEST_CASE("explicit assignments and per-slot tables") {
  const ExperimentConfig c = ParseConfig(R"({
    "prior": {"p_h": 0.6, "p_l": 0.4},
    "assignment": {"num_tasks": 3, "tasks_of": [[0, 1, 2], [0, 1, 2]],
                   "ref_rater": [[1, 1, 1], [0, 0, 0]], "scheme": "ring_d1"},
    "agents": {"proficiency": [0.7, 0.9], "cost": [0.01, 0.02]},
    "profile": {"preset": "table", "table": [
      [{"effort": 1, "x": 1, "y": 1}, {"delta": 0.5, "r": 0.2},
       {"effort": 0, "x": 0.3, "y": 0.7}],
      [{"effort": 1, "x": 0, "y": 0}, {"effort": 1, "x": 1, "y": 1},
       {"delta": 1}]]}
  })");
  const Scenario s = BuildScenario(c);
  CHECK(s.agents[1].effort_cost() == 0.02);
  CHECK(s.assignment.stat_sets[0][2].own.size() == 1);
  CHECK(std::get<MixedStrategy>(s.profile.At(AgentId{0}, 1)) ==
        MixedStrategy{0.5, 0.2});
  CHECK(std::get<TaskStrategy>(s.profile.At(AgentId{1}, 0)) ==
        TaskStrategy::Inverted());
  ExperimentConfig short_table = c;
  short_table.profile_table[1].pop_back();
  CHECK_THROWS_AS(BuildScenario(short_table), ConfigError);
}

TEST_CASE("custom statistic sets") {
  const std::string base = R"({
    "assignment": {"num_tasks": 3, "tasks_of": [[0, 1, 2], [0, 1, 2]],
                   "ref_rater": [[1, 1, 1], [0, 0, 0]], "scheme": "custom",
                   "stat_sets": [
                     [{"own": [1], "ref": [2]}, {"own": [2], "ref": [0]},
                      {"own": [0], "ref": [1]}],
                     [{"own": [1], "ref": [2]}, {"own": [2], "ref": [0]},
                      {"own": [0], "ref": [OWN]}]]}
  })";
  std::string good = base;
  good.replace(good.find("OWN"), 3, "1");
  CHECK(BuildAssignment(ParseConfig(good)).scheme == StatScheme::kCustom);
  std::string bad = base;
  bad.replace(bad.find("OWN"), 3, "0");
  CHECK_THROWS_AS(BuildAssignment(ParseConfig(bad)), ConstructionError);
}

TEST_CASE("resampled references need a permutation") {
  const ExperimentConfig c = ParseConfig(R"({
    "assignment": {"m": 4, "n": 4, "D": 2, "T": 2, "permute": false,
                   "references": "resampled"}
  })");
  CHECK_THROWS_AS(BuildScenario(c), ConfigError);
}

TEST_CASE("config hash") {
  const ExperimentConfig a = ParseConfig(kBlock);
  const ExperimentConfig reordered = ParseConfig(R"({
    "trials": 500, "seed": 7, "profile": {"preset": "all_truth"},
    "agents": {"proficiency": 0.8},
    "assignment": {"scheme": "full_dminus1", "T": 2, "D": 2, "n": 4, "m": 4},
    "prior": 0.6})");
  CHECK(ConfigHash(a) == ConfigHash(reordered));
  ExperimentConfig seeded = a;
  seeded.seed = 8;
  CHECK(ConfigHash(seeded) != ConfigHash(a));
  ExperimentConfig longer = a;
  longer.trials = 501;
  CHECK(ConfigHash(longer) != ConfigHash(a));
}

TEST_CASE("assignment seed defaults to the experiment seed") {
  ExperimentConfig c = ParseConfig(R"({
    "assignment": {"m": 9, "n": 9, "D": 3, "T": 3}, "seed": 3})");
  const Assignment first = BuildAssignment(c);
  c.seed = 4;
  CHECK(BuildAssignment(c).tasks_of != first.tasks_of);
  c.assignment.seed = 3;
  CHECK(BuildAssignment(c).tasks_of == first.tasks_of);
}

TEST_CASE("shipped configurations load") {
  int loaded = 0;
  for (const auto& entry :
       std::filesystem::directory_iterator(PEERLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    INFO(entry.path().string());
    const ExperimentConfig c = LoadConfig(entry.path().string());
    if (c.assignment.block) CHECK_NOTHROW(BuildScenario(c));
    ++loaded;
  }
  CHECK(loaded >= 5);
}

}  // TEST_SUITE

}  // namespace
}  // namespace peerlab
