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

#ifndef PEERLAB_TESTS_FIXTURES_H_
#define PEERLAB_TESTS_FIXTURES_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "peerlab/assignment.h"
#include "peerlab/mechanism.h"
#include "peerlab/scenario.h"

namespace peerlab::fixtures {

inline std::vector<AgentParams> Roster(const std::vector<double>& p) {
  std::vector<AgentParams> out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    out.emplace_back(AgentId{static_cast<int>(i)}, p[i]);
  }
  return out;
}

// Block construction with the identity permutation.
inline Assignment Block(int m, int n, int d, int t, StatScheme scheme,
                        std::optional<std::uint64_t> seed = std::nullopt) {
  return BuildMechanismAssignment(BlockSpec{m, n, d, t}, scheme, seed);
}

// Two agents rating the same D tasks and referencing each other, ring
// statistic sets. Needs D >= 3.
inline Assignment TwoAgentRing(int d) {
  std::vector<TaskId> tasks;
  for (int j = 0; j < d; ++j) tasks.push_back(TaskId{j});
  Assignment a = MakeAssignment(d, {tasks, tasks});
  a.ref_rater = {std::vector<AgentId>(d, AgentId{1}),
                 std::vector<AgentId>(d, AgentId{0})};
  return BuildStatisticSets(std::move(a), StatScheme::kRing);
}

inline Scenario MakeScenario(Assignment assignment,
                             const std::vector<double>& p, double p_h,
                             const SlotPlan& plan, std::uint64_t seed = 1) {
  Scenario s;
  s.prior = Prior(p_h);
  s.agents = Roster(p);
  s.profile = StrategyProfile::Uniform(assignment, plan);
  s.assignment = std::move(assignment);
  s.seed = seed;
  s.scheme = s.assignment.scheme;
  return s;
}

inline Scenario Homogeneous(Assignment assignment, double p, double p_h,
                            const SlotPlan& plan, std::uint64_t seed = 1) {
  const std::size_t n = assignment.tasks_of.size();
  return MakeScenario(std::move(assignment), std::vector<double>(n, p), p_h,
                      plan, seed);
}

// Resampled references over a block construction.
inline Scenario Resampled(const BlockSpec& spec, StatScheme scheme,
                          const std::vector<double>& p, double p_h,
                          const SlotPlan& plan, std::uint64_t seed = 1) {
  Scenario s = MakeScenario(BuildMechanismAssignment(spec, scheme, seed), p,
                            p_h, plan, seed);
  s.references = ReferenceMode::kResampled;
  s.block = spec;
  s.scheme = scheme;
  return s;
}

}  // namespace peerlab::fixtures

#endif  // PEERLAB_TESTS_FIXTURES_H_
