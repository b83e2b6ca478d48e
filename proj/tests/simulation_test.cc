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

#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "oracles.h"
#include "peerlab/errors.h"
#include "peerlab/rng.h"
#include "peerlab/simulation.h"

namespace peerlab {
namespace {

constexpr double kF1 = 0.1728;  // F1(0.8, 0.8) at P[H] = 0.6

Scenario FourAgentBlock(const SlotPlan& plan, std::uint64_t seed = 1) {
  return fixtures::Homogeneous(fixtures::Block(4, 4, 2, 2, StatScheme::kFull),
                               0.8, 0.6, plan, seed);
}

TEST_SUITE("simulation") {

TEST_CASE("accumulator merge matches a single pass") {
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) xs.push_back(std::sin(i * 0.37) * i);
  MeanAccumulator whole;
  for (double x : xs) whole.Add(x);
  MeanAccumulator left, right;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    (i < 313 ? left : right).Add(xs[i]);
  }
  left.Merge(right);
  CHECK(left.n == whole.n);
  CHECK(left.mean == doctest::Approx(whole.mean).epsilon(1e-12));
  CHECK(left.m2 == doctest::Approx(whole.m2).epsilon(1e-12));
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / 1000.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const McEstimate e = whole.Estimate();
  CHECK(e.mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(e.std_error ==
        doctest::Approx(std::sqrt(ss / 999.0 / 1000.0)).epsilon(1e-9));
}

TEST_CASE("run trials is independent of thread count") {
  auto factory = [] {
    return TrialFn([](std::uint64_t t, std::span<double> out) {
      out[0] = UniformDraw(3, t, 0, 0, Stream::kTruth);
      out[1] = out[0] * out[0];
    });
  };
  const auto one = RunTrials(10000, 2, factory, 1);
  const auto four = RunTrials(10000, 2, factory, 4);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(one[k].mean == four[k].mean);
    CHECK(one[k].std_error == four[k].std_error);
    CHECK(one[k].trials == 10000);
  }
  CHECK(one[0].mean == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("worlds are reproducible per (seed, trial)") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful(), 9);
  CHECK(SampleWorld(s, 5) == SampleWorld(s, 5));
  int differ = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    differ += SampleWorld(s, t) != SampleWorld(s, t + 1);
  }
  CHECK(differ > 10);
  Scenario other = s;
  other.seed = 10;
  int differ_seed = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    differ_seed += SampleWorld(s, t) != SampleWorld(other, t);
  }
  CHECK(differ_seed > 10);
}

TEST_CASE("sampled frequencies follow the model") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful(), 4);
  const int trials = 40000;
  int truth_h = 0, correct = 0, sites = 0;
  for (int t = 0; t < trials; ++t) {
    const auto world = SampleWorld(s, static_cast<std::uint64_t>(t));
    std::vector<Bit> obs;
    const ReportSet reports = SampleReports(world, s, s.assignment,
                                            static_cast<std::uint64_t>(t), &obs);
    truth_h += world[0];
    std::size_t k = 0;
    for (int i = 0; i < 4; ++i) {
      for (TaskId task : s.assignment.tasks_of[static_cast<std::size_t>(i)]) {
        correct += obs[k] == world[static_cast<std::size_t>(ToInt(task))];
        CHECK(reports.Get(AgentId{i}, task) == obs[k]);
        ++sites;
        ++k;
      }
    }
  }
  const double ph = static_cast<double>(truth_h) / trials;
  CHECK(std::abs(ph - 0.6) < 4 * std::sqrt(0.24 / trials));
  const double acc = static_cast<double>(correct) / sites;
  CHECK(std::abs(acc - 0.8) < 4 * std::sqrt(0.16 / sites));
}

TEST_CASE("coin reports ignore observations") {
  const Scenario s = FourAgentBlock(TaskStrategy::Coin(0.3), 2);
  const int trials = 20000;
  int h = 0, agree_obs = 0, sites = 0;
  for (int t = 0; t < trials; ++t) {
    const auto world = SampleWorld(s, static_cast<std::uint64_t>(t));
    std::vector<Bit> obs;
    const ReportSet r = SampleReports(world, s, s.assignment,
                                      static_cast<std::uint64_t>(t), &obs);
    for (std::size_t k = 0; k < r.raw().size(); ++k) {
      h += r.raw()[k] == kH;
      agree_obs += r.raw()[k] == world[static_cast<std::size_t>(
                                     ToInt(s.assignment.tasks_of[k / 2][k % 2]))];
      ++sites;
    }
  }
  CHECK(std::abs(static_cast<double>(h) / sites - 0.3) <
        4 * std::sqrt(0.21 / sites));
  // P[report = truth] = 0.3 * 0.6 + 0.7 * 0.4 = 0.46.
  CHECK(std::abs(static_cast<double>(agree_obs) / sites - 0.46) <
        4 * std::sqrt(0.25 / sites));
}

TEST_CASE("uninformative profiles pay exactly zero") {
  for (const SlotPlan& plan :
       {SlotPlan{TaskStrategy{Effort::kFull, ReportingMatrix::AlwaysH()}},
        SlotPlan{TaskStrategy{Effort::kZero, ReportingMatrix::AlwaysL()}}}) {
    const Scenario s = FourAgentBlock(plan);
    const auto mc = McExpectedRewards(s, 5000, 2);
    for (const McEstimate& e : mc) {
      CHECK(e.mean == 0.0);
      CHECK(e.std_error == 0.0);
    }
    for (double v : EnumerateExpectedRewards(s)) CHECK(v == 0.0);
  }
}

TEST_CASE("mc expectations are thread-count invariant") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful(), 12);
  const auto a = McExpectedRewards(s, 5000, 1);
  const auto b = McExpectedRewards(s, 5000, 3);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].mean == b[i].mean);
    CHECK(a[i].std_error == b[i].std_error);
  }
}

TEST_CASE("enumeration of the four-agent block") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful());
  for (double v : EnumerateExpectedRewards(s)) {
    CHECK(v == doctest::Approx(2 * kF1).epsilon(1e-12));
  }
  // Everyone inverting is indistinguishable from everyone truthful.
  const Scenario inv = FourAgentBlock(TaskStrategy::Inverted());
  for (double v : EnumerateExpectedRewards(inv)) {
    CHECK(v == doctest::Approx(2 * kF1).epsilon(1e-12));
  }
}

TEST_CASE("coin players earn nothing in expectation") {
  for (double r : {0.0, 0.2, 0.5, 0.9}) {
    const Scenario s = FourAgentBlock(TaskStrategy::Coin(r));
    for (double v : EnumerateExpectedRewards(s)) {
      CHECK(std::abs(v) < 1e-12);
    }
    // A truthful agent among coin players earns nothing either.
    Scenario dev = s;
    dev.profile.SetAgent(AgentId{0}, TaskStrategy::Truthful());
    CHECK(std::abs(EnumerateExpectedReward(dev, AgentId{0})) < 1e-12);
  }
}

TEST_CASE("two-agent ring enumeration matches the oracle") {
  const double v = EnumerateExpectedReward(
      fixtures::Homogeneous(fixtures::TwoAgentRing(3), 0.8, 0.6,
                            TaskStrategy::Truthful()),
      AgentId{0});
  CHECK(v == doctest::Approx(3 * oracle::F1(0.8, 0.8, 0.6)).epsilon(1e-12));
}

TEST_CASE("enumeration refuses oversized instances") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful());
  const std::uint64_t need = EnumerationBranches(s, AgentId{0});
  CHECK(need > 1);
  CHECK_THROWS_AS(EnumerateExpectedReward(s, AgentId{0}, need - 1),
                  BudgetExceeded);
  CHECK_NOTHROW(EnumerateExpectedReward(s, AgentId{0}, need));
  CHECK_THROWS_AS(EnumerateExpectedRewards(s, need), BudgetExceeded);
  const Scenario big = fixtures::Homogeneous(
      fixtures::Block(100, 20, 10, 2, StatScheme::kFull), 0.8, 0.6,
      TaskStrategy::Truthful());
  CHECK_THROWS_AS(EnumerateExpectedReward(big, AgentId{0}), BudgetExceeded);
}

TEST_CASE("enumeration rejects resampled references") {
  const Scenario s = fixtures::Resampled({4, 4, 2, 2}, StatScheme::kFull,
                                         {0.8, 0.8, 0.8, 0.8}, 0.6,
                                         TaskStrategy::Truthful());
  CHECK_THROWS_AS(EnumerateExpectedReward(s, AgentId{0}), InputError);
}

TEST_CASE("reward is affine in the reporting matrix") {
  const Scenario base = fixtures::MakeScenario(
      fixtures::Block(4, 4, 2, 2, StatScheme::kRing), {0.6, 0.7, 0.8, 0.95},
      0.55, TaskStrategy::Truthful());
  const ReportingMatrix mixed(0.7, 0.4);
  const BasisWeights w = DecomposeReportingMatrix(mixed);
  auto value = [&](const ReportingMatrix& m) {
    Scenario s = base;
    s.profile.SetAgent(AgentId{1}, TaskStrategy{Effort::kFull, m});
    return EnumerateExpectedReward(s, AgentId{1});
  };
  const double combined = w.truth() * value(ReportingMatrix::Truthful()) +
                          w.invert() * value(ReportingMatrix::Inverted()) +
                          w.always_h() * value(ReportingMatrix::AlwaysH()) +
                          w.always_l() * value(ReportingMatrix::AlwaysL());
  CHECK(value(mixed) == doctest::Approx(combined).epsilon(1e-12));
}

TEST_CASE("mc agrees with enumeration") {
  Scenario s = fixtures::MakeScenario(
      fixtures::Block(4, 4, 2, 2, StatScheme::kFull), {0.6, 0.7, 0.8, 0.95},
      0.6, TaskStrategy::Truthful(), 21);
  s.profile.SetSlot(AgentId{2}, 1, MixedStrategy{0.4, 0.7});
  s.trusted = {0.2, 0.9};
  const auto exact = EnumerateExpectedRewards(s);
  const auto mc = McExpectedRewards(s, 100000);
  for (std::size_t i = 0; i < exact.size(); ++i) {
    INFO("agent " << i);
    CHECK(std::abs(mc[i].mean - exact[i]) < 4 * mc[i].std_error);
  }
}

TEST_CASE("paired deviation gains share random numbers") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful(), 5);
  const std::vector<Deviation> devs = {
      {std::nullopt, TaskStrategy::Truthful()},
      {std::nullopt, TaskStrategy::Inverted()},
      {0, TaskStrategy::Coin(0.5)}};
  const McDeviationResult r = McDeviationGains(s, AgentId{0}, devs, 20000, 2);
  CHECK(r.gain[0].mean == 0.0);
  CHECK(r.gain[0].std_error == 0.0);
  CHECK(std::abs(r.gain[1].mean + 4 * kF1) < 4 * r.gain[1].std_error);
  CHECK(std::abs(r.gain[2].mean + kF1) < 4 * r.gain[2].std_error);
  CHECK(r.value[0].mean == r.baseline.mean);
}

TEST_CASE("trial dumps list every report") {
  const Scenario s = FourAgentBlock(TaskStrategy::Truthful(), 3);
  const auto rows = DumpTrials(s, 3);
  CHECK(rows.size() == 3 * 8);
  for (const TrialRecord& r : rows) {
    CHECK(r.report == r.observation);
    CHECK(r.trial < 3);
  }
}

}  // TEST_SUITE

}  // namespace
}  // namespace peerlab
