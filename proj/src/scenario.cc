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

#include "peerlab/scenario.h"

#include <sstream>
#include <string>
#include <utility>

#include "peerlab/assignment.h"
#include "peerlab/errors.h"
#include "peerlab/rng.h"

namespace peerlab {

std::string Describe(const SlotPlan& plan) {
  if (const auto* s = std::get_if<TaskStrategy>(&plan)) return Describe(*s);
  const auto& m = std::get<MixedStrategy>(plan);
  std::ostringstream out;
  out << "mix(delta=" << m.delta << ",r=" << m.r << ")";
  return out.str();
}

void CheckSlotPlan(const SlotPlan& plan) {
  if (const auto* m = std::get_if<MixedStrategy>(&plan)) {
    CheckProbability(m->delta, "delta");
    CheckProbability(m->r, "r");
  }
}

double ReportProbH(const SlotPlan& plan, const AgentParams& params,
                   Bit truth) {
  if (const auto* s = std::get_if<TaskStrategy>(&plan)) {
    return ReportDistribution(*s, params, truth);
  }
  const auto& m = std::get<MixedStrategy>(plan);
  return m.delta * ReportDistribution(TaskStrategy::Truthful(), params, truth) +
         (1.0 - m.delta) * m.r;
}

double ExpectedEffort(const SlotPlan& plan) {
  if (const auto* s = std::get_if<TaskStrategy>(&plan)) {
    return s->effort == Effort::kFull ? 1.0 : 0.0;
  }
  return std::get<MixedStrategy>(plan).delta;
}

StrategyProfile StrategyProfile::Uniform(const Assignment& assignment,
                                         const SlotPlan& plan) {
  CheckSlotPlan(plan);
  StrategyProfile profile;
  profile.plans.resize(assignment.tasks_of.size());
  for (std::size_t i = 0; i < assignment.tasks_of.size(); ++i) {
    profile.plans[i].assign(assignment.tasks_of[i].size(), plan);
  }
  return profile;
}

void StrategyProfile::SetSlot(AgentId agent, std::size_t slot, SlotPlan plan) {
  CheckSlotPlan(plan);
  if (Index(agent) >= plans.size() || slot >= plans[Index(agent)].size()) {
    throw InputError("no slot " + std::to_string(slot) + " for agent " +
                     std::to_string(ToInt(agent)));
  }
  plans[Index(agent)][slot] = std::move(plan);
}

void StrategyProfile::SetAgent(AgentId agent, const SlotPlan& plan) {
  CheckSlotPlan(plan);
  if (Index(agent) >= plans.size()) {
    throw InputError("no agent " + std::to_string(ToInt(agent)));
  }
  for (auto& p : plans[Index(agent)]) p = plan;
}

bool StrategyProfile::SlotConstant(AgentId agent) const {
  const auto& row = plans[Index(agent)];
  for (const auto& p : row) {
    if (!(p == row.front())) return false;
  }
  return true;
}

std::string ReferenceModeName(ReferenceMode mode) {
  return mode == ReferenceMode::kFixed ? "fixed" : "resampled";
}

ReferenceMode ParseReferenceMode(const std::string& name) {
  if (name == "fixed") return ReferenceMode::kFixed;
  if (name == "resampled") return ReferenceMode::kResampled;
  throw InputError("unknown reference mode '" + name +
                   "' (expected fixed or resampled)");
}

void ValidateScenario(const Scenario& s) {
  const Assignment& a = s.assignment;
  if (static_cast<int>(s.agents.size()) != a.num_agents()) {
    throw InputError("agent roster has " + std::to_string(s.agents.size()) +
                     " entries but the assignment has " +
                     std::to_string(a.num_agents()) + " agents");
  }
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    if (Index(s.agents[i].id()) != i) {
      throw InputError("agent roster out of order at position " +
                       std::to_string(i));
    }
  }
  if (!a.has_references() || !a.has_stat_sets()) {
    throw InputError("assignment lacks reference raters or statistic sets");
  }
  if (s.profile.plans.size() != a.tasks_of.size()) {
    throw InputError("strategy profile does not cover every agent");
  }
  for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
    if (s.profile.plans[i].size() != a.tasks_of[i].size()) {
      throw InputError("strategy profile for agent " + std::to_string(i) +
                       " does not cover every task");
    }
    for (const auto& plan : s.profile.plans[i]) CheckSlotPlan(plan);
  }
  CheckProbability(s.trusted.mass, "trusted mass");
  CheckProbability(s.trusted.proficiency, "trusted proficiency");
  if (s.trusted.proficiency < 0.5) {
    throw DomainError("trusted proficiency must be at least 1/2");
  }
  if (!(s.beta >= 0.0)) throw DomainError("beta must be nonnegative");
  if (s.references == ReferenceMode::kResampled) {
    if (!s.block) {
      throw InputError("resampled references need block sizes");
    }
    if (s.scheme == StatScheme::kCustom) {
      throw InputError("resampled references need the ring or full scheme");
    }
    if (s.block->n != a.num_agents() || s.block->d_tasks !=
        static_cast<int>(a.tasks_of.front().size())) {
      throw InputError("block sizes do not match the assignment");
    }
  }
}

Assignment TrialAssignment(const Scenario& s, std::uint64_t trial) {
  if (s.references == ReferenceMode::kFixed) return s.assignment;
  return BuildMechanismAssignment(
      *s.block, s.scheme, StreamKey(s.seed, trial, 0, 0, Stream::kAssignment));
}

Scenario WithDeviation(const Scenario& scenario, AgentId agent,
                       const Deviation& deviation) {
  Scenario out = scenario;
  if (deviation.slot) {
    out.profile.SetSlot(agent, *deviation.slot, deviation.plan);
  } else {
    out.profile.SetAgent(agent, deviation.plan);
  }
  return out;
}

}  // namespace peerlab
