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

#ifndef PEERLAB_SCENARIO_H_
#define PEERLAB_SCENARIO_H_

// Everything needed to evaluate rewards in expectation: model parameters,
// assignment, strategy profile, and optional trusted raters.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "peerlab/mechanism.h"
#include "peerlab/model.h"

namespace peerlab {

// With probability delta play (1,X), otherwise (0,r). Resolved
// independently per task.
struct MixedStrategy {
  double delta = 1.0;
  double r = 0.5;

  bool operator==(const MixedStrategy&) const = default;
};

using SlotPlan = std::variant<TaskStrategy, MixedStrategy>;

std::string Describe(const SlotPlan& plan);
// Throws DomainError for an invalid mixture.
void CheckSlotPlan(const SlotPlan& plan);

// Pr[report = H | truth] for one slot plan.
double ReportProbH(const SlotPlan& plan, const AgentParams& params, Bit truth);
// Expected effort in {0..1}.
double ExpectedEffort(const SlotPlan& plan);

// One plan per (agent, slot), where slot indexes the agent's task list.
struct StrategyProfile {
  std::vector<std::vector<SlotPlan>> plans;

  // Same plan for every slot of every agent.
  static StrategyProfile Uniform(const Assignment& assignment,
                                 const SlotPlan& plan);

  const SlotPlan& At(AgentId agent, std::size_t slot) const {
    return plans[Index(agent)][slot];
  }
  void SetSlot(AgentId agent, std::size_t slot, SlotPlan plan);
  void SetAgent(AgentId agent, const SlotPlan& plan);
  // True when every slot of the agent carries the same plan.
  bool SlotConstant(AgentId agent) const;
};

// With probability `mass`, independently per (agent, task), the reference
// rater is replaced by a trusted agent who exerts effort and reports
// truthfully with proficiency `proficiency`. Her statistic-term reports come
// from d fresh tasks of her own.
struct TrustedRaters {
  double mass = 0.0;
  double proficiency = 1.0;
};

// Fixed: the scenario's assignment is used in every trial. Resampled: each
// trial draws a fresh permutation for the block construction, so reference
// raters vary from trial to trial.
enum class ReferenceMode { kFixed, kResampled };

std::string ReferenceModeName(ReferenceMode mode);
ReferenceMode ParseReferenceMode(const std::string& name);

struct Scenario {
  Prior prior{0.5};
  std::vector<AgentParams> agents;
  Assignment assignment;
  StrategyProfile profile;
  TrustedRaters trusted;
  double beta = 1.0;
  std::uint64_t seed = 0;
  ReferenceMode references = ReferenceMode::kFixed;
  // Needed for kResampled.
  std::optional<BlockSpec> block;
  StatScheme scheme = StatScheme::kCustom;
};

// Throws InputError (or DomainError for bad numbers) unless the scenario is
// complete and consistent.
void ValidateScenario(const Scenario& scenario);

// The assignment used by a given trial.
Assignment TrialAssignment(const Scenario& scenario, std::uint64_t trial);

// A change to one agent's plan on one slot or, with no slot, on all slots.
struct Deviation {
  std::optional<std::size_t> slot;
  SlotPlan plan;
};

Scenario WithDeviation(const Scenario& scenario, AgentId agent,
                       const Deviation& deviation);

}  // namespace peerlab

#endif  // PEERLAB_SCENARIO_H_
