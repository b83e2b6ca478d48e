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

#include "peerlab/assignment.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peerlab/errors.h"
#include "peerlab/rng.h"

namespace peerlab {
namespace {

std::string SpecText(const BlockSpec& s) {
  std::ostringstream out;
  out << "m=" << s.m << ", n=" << s.n << ", D=" << s.d_tasks
      << ", T=" << s.raters;
  return out.str();
}

// Tasks for a block position, in ascending order.
std::vector<TaskId> TasksAtPosition(const BlockSpec& spec, int position) {
  const int per_block = spec.m / spec.d_tasks;
  const int block = position / per_block;
  const int b = position % per_block;
  std::vector<TaskId> tasks;
  tasks.reserve(static_cast<std::size_t>(spec.d_tasks));
  for (int k = 0; k < spec.d_tasks; ++k) {
    tasks.push_back(TaskId{block == 0 ? b * spec.d_tasks + k
                                      : b + per_block * k});
  }
  return tasks;
}

// True when ring statistic sets exist for (agent, task) against ref.
bool RingFeasible(const Assignment& a, AgentId agent, std::size_t slot,
                  AgentId ref) {
  const auto& own = a.tasks_of[Index(agent)];
  const TaskId task = own[slot];
  const TaskId successor = own[(slot + 1) % own.size()];
  for (TaskId t : a.tasks_of[Index(ref)]) {
    if (t != task && t != successor) return true;
  }
  return false;
}

}  // namespace

void CheckBlockSpec(const BlockSpec& spec) {
  if (spec.m < 1 || spec.n < 1 || spec.d_tasks < 1 || spec.raters < 1) {
    throw ConstructionError("block sizes must be positive (" + SpecText(spec) +
                            ")");
  }
  if (spec.m % spec.d_tasks != 0) {
    throw ConstructionError("m/D not integral (" + SpecText(spec) + ")");
  }
  if (spec.n % spec.raters != 0) {
    throw ConstructionError("n/T not integral (" + SpecText(spec) + ")");
  }
  if (static_cast<long long>(spec.m) * spec.raters !=
      static_cast<long long>(spec.n) * spec.d_tasks) {
    throw ConstructionError("capacity mismatch: need m*T == n*D (" +
                            SpecText(spec) + ")");
  }
}

BlockPlan MakeBlockPlan(const BlockSpec& spec,
                        std::optional<std::uint64_t> permutation_seed) {
  CheckBlockSpec(spec);
  BlockPlan plan;
  plan.spec = spec;
  plan.agent_at.resize(static_cast<std::size_t>(spec.n));
  for (int p = 0; p < spec.n; ++p) plan.agent_at[p] = AgentId{p};
  if (permutation_seed) {
    SplitMix64 rng(Mix64(*permutation_seed ^ 0x243f6a8885a308d3ULL));
    // Fisher-Yates, spelled out so the result does not depend on the
    // standard library's shuffle.
    for (std::size_t p = plan.agent_at.size(); p > 1; --p) {
      const std::size_t q = rng.Below(p);
      std::swap(plan.agent_at[p - 1], plan.agent_at[q]);
    }
  }
  plan.position_of.resize(static_cast<std::size_t>(spec.n));
  for (int p = 0; p < spec.n; ++p) {
    plan.position_of[Index(plan.agent_at[p])] = p;
  }
  return plan;
}

Assignment BuildBlockAssignment(const BlockSpec& spec,
                                std::optional<std::uint64_t> permutation_seed) {
  BlockPlan plan = MakeBlockPlan(spec, permutation_seed);
  std::vector<std::vector<TaskId>> tasks_of(static_cast<std::size_t>(spec.n));
  for (int p = 0; p < spec.n; ++p) {
    tasks_of[Index(plan.agent_at[p])] = TasksAtPosition(spec, p);
  }
  Assignment out = MakeAssignment(spec.m, std::move(tasks_of));
  out.layout = std::move(plan);
  return out;
}

Assignment ChooseReferenceRaters(Assignment assignment, StatScheme scheme,
                                 std::uint64_t seed) {
  if (!assignment.layout) {
    throw ConstructionError("reference selection needs a block layout");
  }
  const BlockPlan& plan = *assignment.layout;
  const BlockSpec& spec = plan.spec;
  if (spec.raters < 2) {
    throw ConstructionError(
        "T=1: every task needs a second rater to act as reference");
  }
  if (scheme == StatScheme::kFull &&
      spec.m < spec.d_tasks * spec.d_tasks) {
    throw ConstructionError(
        "full_dminus1 needs m >= D^2 so that every agent shares exactly one "
        "task with each reference rater (" + SpecText(spec) + ")");
  }
  if (scheme == StatScheme::kCustom) {
    throw ConstructionError("custom schemes carry their own reference raters");
  }
  const int per_block = plan.agents_per_block();
  assignment.ref_rater.assign(assignment.tasks_of.size(), {});
  for (std::size_t i = 0; i < assignment.tasks_of.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    const auto& tasks = assignment.tasks_of[i];
    auto& refs = assignment.ref_rater[i];
    refs.resize(tasks.size());
    const int block = plan.BlockOf(agent);
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const int task = ToInt(tasks[k]);
      if (block > 0) {
        refs[k] = plan.agent_at[static_cast<std::size_t>(task / spec.d_tasks)];
        continue;
      }
      std::vector<AgentId> candidates;
      for (int a = 1; a < spec.raters; ++a) {
        candidates.push_back(plan.agent_at[static_cast<std::size_t>(
            a * per_block + task % per_block)]);
      }
      if (scheme == StatScheme::kFull) {
        refs[k] = candidates.front();
        continue;
      }
      std::erase_if(candidates, [&](AgentId c) {
        return !RingFeasible(assignment, agent, k, c);
      });
      if (candidates.empty()) {
        throw ConstructionError("no feasible reference rater for agent " +
                                std::to_string(i) + " on task " +
                                std::to_string(task));
      }
      SplitMix64 rng(StreamKey(seed, 0, static_cast<std::uint32_t>(i),
                               static_cast<std::uint32_t>(task),
                               Stream::kAssignment));
      refs[k] = candidates[rng.Below(candidates.size())];
    }
  }
  return assignment;
}

Assignment BuildMechanismAssignment(const BlockSpec& spec, StatScheme scheme,
                                    std::optional<std::uint64_t> seed) {
  Assignment a = BuildBlockAssignment(spec, seed);
  a = ChooseReferenceRaters(std::move(a), scheme,
                            Mix64(seed.value_or(0) ^ 0x13198a2e03707344ULL));
  return BuildStatisticSets(std::move(a), scheme);
}

std::string ViolationName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kCapacity:
      return "capacity";
    case ViolationKind::kReferenceMembership:
      return "reference_membership";
    case ViolationKind::kStatisticSets:
      return "statistic_sets";
    case ViolationKind::kOverlap:
      return "overlap";
    case ViolationKind::kInducedCount:
      return "induced_count";
    case ViolationKind::kRingSchedule:
      return "ring_schedule";
  }
  return "unknown";
}

std::size_t ValidationReport::Count(ViolationKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(violations.begin(), violations.end(),
                    [&](const Violation& v) { return v.kind == kind; }));
}

ValidationReport ValidateAssignment(const Assignment& a, StatScheme scheme) {
  ValidationReport report;
  auto add = [&](ViolationKind kind, int agent, int task, std::string msg) {
    report.violations.push_back({kind, agent, task, std::move(msg)});
  };
  const int n = a.num_agents();
  if (n == 0 || a.num_tasks == 0) {
    add(ViolationKind::kCapacity, -1, -1, "empty assignment");
    return report;
  }

  // Capacities: every agent D tasks, every task T agents.
  std::size_t big_d = a.tasks_of.front().size();
  std::size_t big_t = a.agents_of.empty() ? 0 : a.agents_of.front().size();
  if (a.layout) {
    big_d = static_cast<std::size_t>(a.layout->spec.d_tasks);
    big_t = static_cast<std::size_t>(a.layout->spec.raters);
  }
  std::vector<std::size_t> count(static_cast<std::size_t>(a.num_tasks), 0);
  bool ids_ok = true;
  for (int i = 0; i < n; ++i) {
    const auto& tasks = a.tasks_of[static_cast<std::size_t>(i)];
    if (tasks.size() != big_d) {
      add(ViolationKind::kCapacity, i, -1,
          "agent " + std::to_string(i) + " has " + std::to_string(tasks.size()) +
              " tasks, expected " + std::to_string(big_d));
    }
    for (TaskId t : tasks) {
      if (ToInt(t) < 0 || ToInt(t) >= a.num_tasks) {
        ids_ok = false;
        add(ViolationKind::kCapacity, i, ToInt(t), "task id out of range");
        continue;
      }
      ++count[Index(t)];
    }
  }
  for (int j = 0; j < a.num_tasks; ++j) {
    const std::size_t listed =
        static_cast<std::size_t>(j) < a.agents_of.size()
            ? a.agents_of[static_cast<std::size_t>(j)].size()
            : 0;
    if (count[static_cast<std::size_t>(j)] != big_t || listed != big_t) {
      add(ViolationKind::kCapacity, -1, j,
          "task " + std::to_string(j) + " has " +
              std::to_string(count[static_cast<std::size_t>(j)]) +
              " raters, expected " + std::to_string(big_t));
    }
  }
  if (!ids_ok || !a.has_references()) {
    if (!a.has_references()) {
      add(ViolationKind::kReferenceMembership, -1, -1,
          "reference raters not chosen");
    }
    return report;
  }

  // Reference membership.
  bool refs_ok = true;
  for (int i = 0; i < n; ++i) {
    const auto& tasks = a.tasks_of[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const AgentId ref = a.ref_rater[static_cast<std::size_t>(i)][k];
      const int task = ToInt(tasks[k]);
      if (ToInt(ref) < 0 || ToInt(ref) >= n || ToInt(ref) == i ||
          !a.FindSlot(ref, tasks[k])) {
        refs_ok = false;
        add(ViolationKind::kReferenceMembership, i, task,
            "reference " + std::to_string(ToInt(ref)) +
                " does not rate task " + std::to_string(task) +
                " or is the agent herself");
      }
    }
  }
  if (!refs_ok || !a.has_stat_sets()) {
    if (!a.has_stat_sets()) {
      add(ViolationKind::kStatisticSets, -1, -1, "statistic sets not built");
    }
    return report;
  }

  if (a.d < 1 || static_cast<std::size_t>(a.d) > big_d - 1) {
    add(ViolationKind::kStatisticSets, -1, -1,
        "d=" + std::to_string(a.d) + " outside [1, D-1]");
  }
  if (scheme == StatScheme::kRing && a.d != 1) {
    add(ViolationKind::kRingSchedule, -1, -1, "ring schedule needs d=1");
  }
  if (scheme == StatScheme::kFull && a.d != static_cast<int>(big_d) - 1) {
    add(ViolationKind::kStatisticSets, -1, -1, "full scheme needs d=D-1");
  }

  for (int i = 0; i < n; ++i) {
    const AgentId agent{i};
    const auto& tasks = a.tasks_of[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const int task = ToInt(tasks[k]);
      if (auto problem = CheckStatisticSets(a, agent, k)) {
        add(ViolationKind::kStatisticSets, i, task, *problem);
      }
      if (scheme == StatScheme::kFull) {
        const AgentId ref = a.ref_rater[static_cast<std::size_t>(i)][k];
        int shared = 0;
        for (TaskId t : a.tasks_of[Index(ref)]) {
          if (a.FindSlot(agent, t)) ++shared;
        }
        if (shared != 1) {
          add(ViolationKind::kOverlap, i, task,
              "agent " + std::to_string(i) + " and reference " +
                  std::to_string(ToInt(ref)) + " share " +
                  std::to_string(shared) + " tasks, expected only task " +
                  std::to_string(task));
        }
      }
      if (scheme == StatScheme::kRing &&
          a.stat_sets[static_cast<std::size_t>(i)][k].own.size() != 1) {
        add(ViolationKind::kRingSchedule, i, task,
            "ring schedule uses exactly one statistic task");
      }
    }
  }

  const InducedSets induced = ComputeInducedSets(a);
  for (int i = 0; i < n; ++i) {
    const auto& tasks = a.tasks_of[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const int dij = induced.d_of[static_cast<std::size_t>(i)][k];
      if (dij != a.d) {
        add(ViolationKind::kInducedCount, i, ToInt(tasks[k]),
            "report feeds " + std::to_string(dij) +
                " statistic terms, expected d=" + std::to_string(a.d));
      }
    }
  }
  return report;
}

SymmetryReport ReferenceSymmetryCheck(const AssignmentBuilder& builder,
                                      std::span<const double> proficiency,
                                      std::span<const std::uint64_t> seeds,
                                      double sigmas) {
  SymmetryReport report;
  if (seeds.empty()) return report;
  std::vector<std::vector<double>> sum;
  std::vector<std::vector<double>> sum_sq;
  for (std::uint64_t seed : seeds) {
    const Assignment a = builder(seed);
    if (static_cast<std::size_t>(a.num_agents()) != proficiency.size()) {
      throw InputError("proficiency vector does not match the agent count");
    }
    if (sum.empty()) {
      sum.resize(a.tasks_of.size());
      sum_sq.resize(a.tasks_of.size());
      for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
        sum[i].assign(a.tasks_of[i].size(), 0.0);
        sum_sq[i].assign(a.tasks_of[i].size(), 0.0);
      }
    }
    for (std::size_t i = 0; i < a.ref_rater.size(); ++i) {
      for (std::size_t k = 0; k < a.ref_rater[i].size(); ++k) {
        const double p = proficiency[Index(a.ref_rater[i][k])];
        sum[i][k] += p;
        sum_sq[i][k] += p * p;
      }
    }
  }
  const double count = static_cast<double>(seeds.size());
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const double agent_mean =
        std::accumulate(sum[i].begin(), sum[i].end(), 0.0) /
        (count * static_cast<double>(sum[i].size()));
    for (std::size_t k = 0; k < sum[i].size(); ++k) {
      SlotSymmetry s;
      s.agent = static_cast<int>(i);
      s.slot = static_cast<int>(k);
      s.mean = sum[i][k] / count;
      s.agent_mean = agent_mean;
      const double var =
          count > 1 ? std::max(0.0, (sum_sq[i][k] - count * s.mean * s.mean) /
                                        (count - 1))
                    : 0.0;
      s.std_error = std::sqrt(var / count);
      s.flagged = std::abs(s.mean - agent_mean) > sigmas * s.std_error + 1e-12;
      report.flagged += s.flagged ? 1 : 0;
      report.slots.push_back(s);
    }
  }
  return report;
}

}  // namespace peerlab
