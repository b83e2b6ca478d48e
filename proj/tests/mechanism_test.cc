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

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "peerlab/errors.h"
#include "peerlab/mechanism.h"

namespace peerlab {
namespace {

std::vector<TaskId> Tasks(std::initializer_list<int> ids) {
  std::vector<TaskId> out;
  for (int j : ids) out.push_back(TaskId{j});
  return out;
}

void FillRandom(ReportSet& reports, const Assignment& a, std::mt19937_64& rng) {
  for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
    for (std::size_t k = 0; k < a.tasks_of[i].size(); ++k) {
      reports.SetSlot(AgentId{static_cast<int>(i)}, k,
                      static_cast<Bit>(rng() & 1));
    }
  }
}

TEST_SUITE("mechanism") {

TEST_CASE("ring statistic sets use the next task") {
  const Assignment a = fixtures::TwoAgentRing(3);
  CHECK(a.d == 1);
  CHECK(a.stat_sets[0][0].own == Tasks({1}));
  CHECK(a.stat_sets[0][1].own == Tasks({2}));
  CHECK(a.stat_sets[0][2].own == Tasks({0}));
  const InducedSets induced = ComputeInducedSets(a);
  CHECK(induced.t_of[0][0] == Tasks({2}));
  CHECK(induced.t_of[0][1] == Tasks({0}));
  CHECK(induced.t_of[0][2] == Tasks({1}));
  for (int d : induced.d_of[0]) CHECK(d == 1);
}

TEST_CASE("full statistic sets with two tasks coincide with the ring") {
  const Assignment full = fixtures::Block(4, 4, 2, 2, StatScheme::kFull);
  const Assignment ring = fixtures::Block(4, 4, 2, 2, StatScheme::kRing);
  CHECK(full.d == 1);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      CHECK(full.stat_sets[i][k].own == ring.stat_sets[i][k].own);
      CHECK(full.stat_sets[i][k].own.front() == full.tasks_of[i][1 - k]);
    }
  }
}

TEST_CASE("full statistic sets reject references sharing two tasks") {
  Assignment a = MakeAssignment(
      4, {Tasks({0, 1, 2}), Tasks({0, 1, 3})});
  a.ref_rater = {{AgentId{1}, AgentId{1}, AgentId{1}},
                 {AgentId{0}, AgentId{0}, AgentId{0}}};
  CHECK_THROWS_AS(BuildStatisticSets(a, StatScheme::kFull), ConstructionError);
  try {
    BuildStatisticSets(a, StatScheme::kFull);
  } catch (const ConstructionError& e) {
    CHECK(std::string(e.what()).find("overlap") != std::string::npos);
  }
}

TEST_CASE("induced sets of the full scheme and double counting") {
  const Assignment a = fixtures::Block(9, 9, 3, 3, StatScheme::kFull);
  const InducedSets induced = ComputeInducedSets(a);
  for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
    int sum = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      std::vector<TaskId> expected;
      for (TaskId t : a.tasks_of[i]) {
        if (t != a.tasks_of[i][k]) expected.push_back(t);
      }
      auto got = induced.t_of[i][k];
      std::sort(got.begin(), got.end());
      std::sort(expected.begin(), expected.end());
      CHECK(got == expected);
      CHECK(induced.d_of[i][k] == 2);
      sum += induced.d_of[i][k];
    }
    CHECK(sum == 3 * a.d);
  }
}

TEST_CASE("everyone reporting H earns exactly zero") {
  for (StatScheme scheme : {StatScheme::kRing, StatScheme::kFull}) {
    const Assignment a = fixtures::Block(9, 9, 3, 3, scheme);
    ReportSet reports(a);
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        reports.SetSlot(AgentId{static_cast<int>(i)}, k, kH);
      }
    }
    const RewardBreakdown r = ComputeRewards(a, reports);
    for (std::size_t i = 0; i < 9; ++i) {
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(r.a[i][k] == 1);
        CHECK(r.b[i][k] == 1.0);
        CHECK(r.r[i][k] == 0.0);
      }
      CHECK(r.total[i] == 0.0);
    }
  }
}

TEST_CASE("hand-evaluated rewards with d = 2") {
  // Agent 3 rates {0, 3, 6} and is compared with agent 0, who rates
  // {0, 1, 2}.
  const Assignment a = fixtures::Block(9, 9, 3, 3, StatScheme::kFull);
  REQUIRE(a.tasks_of[3] == Tasks({0, 3, 6}));
  REQUIRE(a.ref_rater[3][0] == AgentId{0});
  ReportSet reports(a);
  std::mt19937_64 rng(5);
  FillRandom(reports, a, rng);
  reports.Set(AgentId{3}, TaskId{0}, 1);
  reports.Set(AgentId{3}, TaskId{3}, 1);
  reports.Set(AgentId{3}, TaskId{6}, 0);
  reports.Set(AgentId{0}, TaskId{0}, 1);
  reports.Set(AgentId{0}, TaskId{1}, 1);
  reports.Set(AgentId{0}, TaskId{2}, 1);
  RewardBreakdown r = ComputeRewards(a, reports);
  CHECK(r.a[3][0] == 1);
  CHECK(r.b[3][0] == 0.5);
  CHECK(r.r[3][0] == 0.5);

  reports.Set(AgentId{0}, TaskId{0}, 0);
  reports.Set(AgentId{0}, TaskId{2}, 0);
  r = ComputeRewards(a, reports);
  CHECK(r.a[3][0] == 0);
  CHECK(r.b[3][0] == 0.5);
  CHECK(r.r[3][0] == -0.5);
}

TEST_CASE("pair terms are exact rationals") {
  CHECK(EvaluatePair(1, 1, 1, 2, 2).statistic == 0.5);
  CHECK(EvaluatePair(1, 0, 1, 1, 2).reward() == -0.5);
  CHECK(EvaluatePair(0, 0, 0, 0, 3).statistic == 1.0);
  CHECK(EvaluatePair(1, 1, 1, 2, 3).statistic == 4.0 / 9.0);
}

TEST_CASE("missing reports are errors") {
  const Assignment a = fixtures::Block(4, 4, 2, 2, StatScheme::kRing);
  ReportSet reports(a);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t k = 0; k < 2; ++k) {
      reports.SetSlot(AgentId{static_cast<int>(i)}, k, kH);
    }
  }
  CHECK(reports.complete());
  ReportSet partial(a);
  partial.SetSlot(AgentId{0}, 0, kH);
  CHECK_FALSE(partial.complete());
  CHECK_THROWS_AS(ComputeRewards(a, partial), InputError);
  CHECK_THROWS_AS(reports.Set(AgentId{0}, TaskId{3}, kH), InputError);
}

TEST_CASE("scaled payments") {
  RewardBreakdown b;
  b.r = {{0.25, 0.25}};
  b.total = {0.5};
  CHECK(ScaledPayment(b, 2.0, PaymentShift::kNone).payment[0] == 1.0);
  RewardBreakdown worst;
  worst.r = {{-1.0, -1.0, -1.0}};
  worst.total = {-3.0};
  CHECK(ScaledPayment(worst, 1.0, PaymentShift::kPlusOnePerTask).payment[0] ==
        0.0);
  CHECK_THROWS_AS(ScaledPayment(b, -1.0, PaymentShift::kNone), DomainError);

  const Assignment a = fixtures::Block(9, 9, 3, 3, StatScheme::kFull);
  ReportSet reports(a);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      reports.SetSlot(AgentId{static_cast<int>(i)}, k, kH);
    }
  }
  const auto paid = ScaledPayment(ComputeRewards(a, reports), 1.5,
                                  PaymentShift::kPlusOnePerTask);
  for (double p : paid.payment) CHECK(p == 1.5 * 3);
}

TEST_CASE("reward bounds hold on random reports") {
  std::mt19937_64 rng(11);
  for (StatScheme scheme : {StatScheme::kRing, StatScheme::kFull}) {
    const Assignment a = fixtures::Block(25, 10, 5, 2, scheme, 3);
    ReportSet reports(a);
    for (int rep = 0; rep < 200; ++rep) {
      FillRandom(reports, a, rng);
      const RewardBreakdown r = ComputeRewards(a, reports);
      for (std::size_t i = 0; i < r.r.size(); ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < r.r[i].size(); ++k) {
          CHECK((r.a[i][k] == 0 || r.a[i][k] == 1));
          CHECK(r.b[i][k] >= 0.0);
          CHECK(r.b[i][k] <= 1.0);
          CHECK(r.r[i][k] == r.a[i][k] - r.b[i][k]);
          sum += r.r[i][k];
        }
        CHECK(r.total[i] == doctest::Approx(sum).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("relabeling agents and tasks permutes rewards") {
  const Assignment a = fixtures::Block(9, 9, 3, 3, StatScheme::kFull, 4);
  std::vector<int> agent_perm(9), task_perm(9);
  std::iota(agent_perm.begin(), agent_perm.end(), 0);
  std::iota(task_perm.begin(), task_perm.end(), 0);
  std::mt19937_64 rng(2);
  std::shuffle(agent_perm.begin(), agent_perm.end(), rng);
  std::shuffle(task_perm.begin(), task_perm.end(), rng);

  std::vector<std::vector<TaskId>> tasks_of(9);
  for (std::size_t i = 0; i < 9; ++i) {
    for (TaskId t : a.tasks_of[i]) {
      tasks_of[agent_perm[i]].push_back(TaskId{task_perm[Index(t)]});
    }
  }
  Assignment b = MakeAssignment(9, tasks_of);
  b.ref_rater.resize(9);
  std::vector<std::vector<StatisticSets>> sets(9);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      b.ref_rater[agent_perm[i]].push_back(
          AgentId{agent_perm[Index(a.ref_rater[i][k])]});
      StatisticSets s;
      for (TaskId t : a.stat_sets[i][k].own) s.own.push_back(TaskId{task_perm[Index(t)]});
      for (TaskId t : a.stat_sets[i][k].ref) s.ref.push_back(TaskId{task_perm[Index(t)]});
      sets[agent_perm[i]].push_back(s);
    }
  }
  b = SetCustomStatisticSets(std::move(b), sets);

  ReportSet ra(a), rb(b);
  for (std::size_t i = 0; i < 9; ++i) {
    for (std::size_t k = 0; k < 3; ++k) {
      const Bit v = static_cast<Bit>(rng() & 1);
      ra.SetSlot(AgentId{static_cast<int>(i)}, k, v);
      rb.Set(AgentId{agent_perm[i]}, TaskId{task_perm[Index(a.tasks_of[i][k])]},
             v);
    }
  }
  const RewardBreakdown x = ComputeRewards(a, ra);
  const RewardBreakdown y = ComputeRewards(b, rb);
  for (std::size_t i = 0; i < 9; ++i) {
    CHECK(x.total[i] == y.total[agent_perm[i]]);
  }
}

TEST_CASE("custom statistic sets are validated") {
  Assignment a = fixtures::Block(9, 9, 3, 3, StatScheme::kFull);
  auto sets = a.stat_sets;
  sets[3][0].ref = sets[3][0].own;  // overlap with the agent's own set
  CHECK_THROWS_AS(SetCustomStatisticSets(a, sets), ConstructionError);
}

TEST_CASE("scheme names") {
  CHECK(ParseScheme("ring_d1") == StatScheme::kRing);
  CHECK(ParseScheme("full_dminus1") == StatScheme::kFull);
  CHECK(SchemeName(StatScheme::kFull) == "full_dminus1");
  CHECK_THROWS_AS(ParseScheme("half"), InputError);
  CHECK(ParseShift("plus_one_per_task") == PaymentShift::kPlusOnePerTask);
}

}  // TEST_SUITE

}  // namespace
}  // namespace peerlab
