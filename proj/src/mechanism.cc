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

#include "peerlab/mechanism.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peerlab/errors.h"

namespace peerlab {
namespace {

std::string PairName(AgentId agent, TaskId task) {
  std::ostringstream out;
  out << "(agent " << ToInt(agent) << ", task " << ToInt(task) << ")";
  return out.str();
}

bool Contains(const std::vector<TaskId>& set, TaskId task) {
  return std::find(set.begin(), set.end(), task) != set.end();
}

int UniformTaskCount(const Assignment& assignment) {
  if (assignment.tasks_of.empty()) {
    throw ConstructionError("assignment has no agents");
  }
  const std::size_t count = assignment.tasks_of.front().size();
  for (const auto& tasks : assignment.tasks_of) {
    if (tasks.size() != count) {
      throw ConstructionError(
          "statistic schemes need the same number of tasks per agent");
    }
  }
  return static_cast<int>(count);
}

}  // namespace

std::string SchemeName(StatScheme scheme) {
  switch (scheme) {
    case StatScheme::kRing:
      return "ring_d1";
    case StatScheme::kFull:
      return "full_dminus1";
    case StatScheme::kCustom:
      return "custom";
  }
  return "custom";
}

StatScheme ParseScheme(const std::string& name) {
  if (name == "ring_d1") return StatScheme::kRing;
  if (name == "full_dminus1") return StatScheme::kFull;
  if (name == "custom") return StatScheme::kCustom;
  throw InputError("unknown statistic scheme '" + name +
                   "' (expected ring_d1, full_dminus1 or custom)");
}

std::optional<std::size_t> Assignment::FindSlot(AgentId agent,
                                                TaskId task) const {
  const auto& tasks = tasks_of[Index(agent)];
  const auto it = std::find(tasks.begin(), tasks.end(), task);
  if (it == tasks.end()) return std::nullopt;
  return static_cast<std::size_t>(it - tasks.begin());
}

std::size_t Assignment::SlotOf(AgentId agent, TaskId task) const {
  if (Index(agent) >= tasks_of.size()) {
    throw InputError("unknown agent " + std::to_string(ToInt(agent)));
  }
  const auto slot = FindSlot(agent, task);
  if (!slot) {
    throw InputError(PairName(agent, task) + " is not part of the assignment");
  }
  return *slot;
}

Assignment MakeAssignment(int num_tasks,
                          std::vector<std::vector<TaskId>> tasks_of) {
  Assignment out;
  out.num_tasks = num_tasks;
  out.agents_of.assign(static_cast<std::size_t>(num_tasks), {});
  for (std::size_t i = 0; i < tasks_of.size(); ++i) {
    const auto& tasks = tasks_of[i];
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const int t = ToInt(tasks[k]);
      if (t < 0 || t >= num_tasks) {
        throw InputError("task id " + std::to_string(t) + " out of range");
      }
      if (std::find(tasks.begin(), tasks.begin() + k, tasks[k]) !=
          tasks.begin() + k) {
        throw InputError("agent " + std::to_string(i) + " lists task " +
                         std::to_string(t) + " twice");
      }
      out.agents_of[static_cast<std::size_t>(t)].push_back(
          AgentId{static_cast<int>(i)});
    }
  }
  out.tasks_of = std::move(tasks_of);
  return out;
}

std::optional<std::string> CheckStatisticSets(const Assignment& assignment,
                                              AgentId agent,
                                              std::size_t slot) {
  const auto& own_tasks = assignment.tasks_of[Index(agent)];
  const TaskId task = own_tasks[slot];
  const AgentId ref = assignment.ref_rater[Index(agent)][slot];
  const auto& ref_tasks = assignment.tasks_of[Index(ref)];
  const StatisticSets& sets = assignment.stat_sets[Index(agent)][slot];
  const std::size_t d = static_cast<std::size_t>(assignment.d);
  const std::string where = PairName(agent, task);

  if (sets.own.size() != d || sets.ref.size() != d) {
    return where + ": statistic sets must both have size d=" +
           std::to_string(d);
  }
  for (std::size_t k = 0; k < sets.own.size(); ++k) {
    const TaskId t = sets.own[k];
    if (t == task || !Contains(own_tasks, t)) {
      return where + ": own statistic task " + std::to_string(ToInt(t)) +
             " is not another task of the agent";
    }
    if (std::find(sets.own.begin(), sets.own.begin() + k, t) !=
        sets.own.begin() + k) {
      return where + ": own statistic set repeats task " +
             std::to_string(ToInt(t));
    }
  }
  for (std::size_t k = 0; k < sets.ref.size(); ++k) {
    const TaskId t = sets.ref[k];
    if (t == task || !Contains(ref_tasks, t)) {
      return where + ": reference statistic task " +
             std::to_string(ToInt(t)) + " is not another task of agent " +
             std::to_string(ToInt(ref));
    }
    if (std::find(sets.ref.begin(), sets.ref.begin() + k, t) !=
        sets.ref.begin() + k) {
      return where + ": reference statistic set repeats task " +
             std::to_string(ToInt(t));
    }
    if (Contains(sets.own, t)) {
      return where + ": statistic sets of the agent and reference " +
             std::to_string(ToInt(ref)) + " overlap on task " +
             std::to_string(ToInt(t));
    }
  }
  return std::nullopt;
}

Assignment BuildStatisticSets(Assignment assignment, StatScheme scheme) {
  if (!assignment.has_references()) {
    throw ConstructionError("reference raters must be chosen first");
  }
  if (scheme == StatScheme::kCustom) {
    throw ConstructionError("custom statistic sets must be supplied explicitly");
  }
  const int big_d = UniformTaskCount(assignment);
  if (big_d < 2) {
    throw ConstructionError("statistic sets need at least 2 tasks per agent");
  }
  const int n = assignment.num_agents();
  assignment.stat_sets.assign(static_cast<std::size_t>(n), {});
  assignment.d = scheme == StatScheme::kRing ? 1 : big_d - 1;
  assignment.scheme = scheme;

  for (int i = 0; i < n; ++i) {
    const AgentId agent{i};
    const auto& tasks = assignment.tasks_of[Index(agent)];
    auto& row = assignment.stat_sets[Index(agent)];
    row.resize(tasks.size());
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const TaskId task = tasks[k];
      const AgentId ref = assignment.ref_rater[Index(agent)][k];
      const auto& ref_tasks = assignment.tasks_of[Index(ref)];
      StatisticSets sets;
      if (scheme == StatScheme::kRing) {
        sets.own.push_back(tasks[(k + 1) % tasks.size()]);
        // The reference's ring successor of j, skipping a collision with S_ij.
        const std::size_t ref_slot = assignment.SlotOf(ref, task);
        for (std::size_t o = 1; o < ref_tasks.size(); ++o) {
          const TaskId cand = ref_tasks[(ref_slot + o) % ref_tasks.size()];
          if (!Contains(sets.own, cand)) {
            sets.ref.push_back(cand);
            break;
          }
        }
        if (sets.ref.empty()) {
          throw ConstructionError(
              PairName(agent, task) + ": reference " +
              std::to_string(ToInt(ref)) +
              " has no task outside the agent's statistic set");
        }
      } else {
        for (TaskId t : tasks) {
          if (t != task) sets.own.push_back(t);
        }
        for (TaskId t : ref_tasks) {
          if (t != task) sets.ref.push_back(t);
        }
      }
      row[k] = std::move(sets);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < assignment.tasks_of[static_cast<std::size_t>(i)].size(); ++k) {
      if (auto problem = CheckStatisticSets(assignment, AgentId{i}, k)) {
        throw ConstructionError(*problem);
      }
    }
  }
  return assignment;
}

Assignment SetCustomStatisticSets(
    Assignment assignment, std::vector<std::vector<StatisticSets>> sets) {
  if (!assignment.has_references()) {
    throw ConstructionError("reference raters must be chosen first");
  }
  if (sets.size() != assignment.tasks_of.size()) {
    throw ConstructionError("statistic table must cover every agent");
  }
  int d = -1;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    if (sets[i].size() != assignment.tasks_of[i].size()) {
      throw ConstructionError("statistic table must cover every task of agent " +
                              std::to_string(i));
    }
    for (const auto& s : sets[i]) {
      if (d < 0) d = static_cast<int>(s.own.size());
    }
  }
  const int big_d = UniformTaskCount(assignment);
  if (d < 1 || d > big_d - 1) {
    throw ConstructionError("statistic set size d must satisfy 1 <= d <= D-1");
  }
  assignment.stat_sets = std::move(sets);
  assignment.d = d;
  assignment.scheme = StatScheme::kCustom;
  for (int i = 0; i < assignment.num_agents(); ++i) {
    for (std::size_t k = 0; k < assignment.tasks_of[static_cast<std::size_t>(i)].size(); ++k) {
      if (auto problem = CheckStatisticSets(assignment, AgentId{i}, k)) {
        throw ConstructionError(*problem);
      }
    }
  }
  return assignment;
}

InducedSets ComputeInducedSets(const Assignment& assignment) {
  InducedSets out;
  const std::size_t n = assignment.tasks_of.size();
  out.t_of.resize(n);
  out.d_of.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& tasks = assignment.tasks_of[i];
    out.t_of[i].assign(tasks.size(), {});
    out.d_of[i].assign(tasks.size(), 0);
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      // Task tasks[k] feeds S_ij' for each j' listed here.
      for (std::size_t other = 0; other < tasks.size(); ++other) {
        if (Contains(assignment.stat_sets[i][other].own, tasks[k])) {
          out.t_of[i][k].push_back(tasks[other]);
        }
      }
      out.d_of[i][k] = static_cast<int>(out.t_of[i][k].size());
    }
  }
  return out;
}

ReportSet::ReportSet(const Assignment& assignment)
    : tasks_of_(assignment.tasks_of) {
  offset_.reserve(tasks_of_.size() + 1);
  std::size_t total = 0;
  for (const auto& tasks : tasks_of_) {
    offset_.push_back(total);
    total += tasks.size();
  }
  offset_.push_back(total);
  values_.assign(total, -1);
}

void ReportSet::Set(AgentId agent, TaskId task, Bit value) {
  if (Index(agent) >= tasks_of_.size()) {
    throw InputError("unknown agent " + std::to_string(ToInt(agent)));
  }
  const auto& tasks = tasks_of_[Index(agent)];
  const auto it = std::find(tasks.begin(), tasks.end(), task);
  if (it == tasks.end()) {
    throw InputError(PairName(agent, task) +
                     " is outside the assignment support");
  }
  SetSlot(agent, static_cast<std::size_t>(it - tasks.begin()), value);
}

void ReportSet::SetSlot(AgentId agent, std::size_t slot, Bit value) {
  if (value > 1) throw InputError("reports must be 0 or 1");
  values_[offset_[Index(agent)] + slot] = static_cast<std::int8_t>(value);
}

std::optional<Bit> ReportSet::Get(AgentId agent, TaskId task) const {
  const auto& tasks = tasks_of_[Index(agent)];
  const auto it = std::find(tasks.begin(), tasks.end(), task);
  if (it == tasks.end()) return std::nullopt;
  const std::int8_t v =
      values_[offset_[Index(agent)] + static_cast<std::size_t>(it - tasks.begin())];
  if (v < 0) return std::nullopt;
  return static_cast<Bit>(v);
}

Bit ReportSet::AtSlot(AgentId agent, std::size_t slot) const {
  const std::int8_t v = values_[offset_[Index(agent)] + slot];
  if (v < 0) {
    throw InputError("missing report for " +
                     PairName(agent, tasks_of_[Index(agent)][slot]));
  }
  return static_cast<Bit>(v);
}

bool ReportSet::complete() const {
  return std::none_of(values_.begin(), values_.end(),
                      [](std::int8_t v) { return v < 0; });
}

PairTerms EvaluatePair(Bit own, Bit ref, int own_h, int ref_h, int d) {
  PairTerms out;
  out.agreement = own == ref ? 1 : 0;
  const long long dd = static_cast<long long>(d) * d;
  const long long num = static_cast<long long>(own_h) * ref_h +
                        static_cast<long long>(d - own_h) * (d - ref_h);
  out.statistic = static_cast<double>(num) / static_cast<double>(dd);
  return out;
}

RewardPlan::RewardPlan(const Assignment& assignment) : d_(assignment.d) {
  if (!assignment.has_references() || !assignment.has_stat_sets()) {
    throw ConstructionError(
        "rewards need reference raters and statistic sets");
  }
  const std::size_t n = assignment.tasks_of.size();
  offset_.reserve(n + 1);
  std::size_t total = 0;
  for (const auto& tasks : assignment.tasks_of) {
    offset_.push_back(total);
    total += tasks.size();
  }
  offset_.push_back(total);
  ref_site_.resize(total);
  own_stat_.resize(total * static_cast<std::size_t>(d_));
  ref_stat_.resize(total * static_cast<std::size_t>(d_));

  for (std::size_t i = 0; i < n; ++i) {
    const AgentId agent{static_cast<int>(i)};
    const auto& tasks = assignment.tasks_of[i];
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const std::size_t s = offset_[i] + k;
      const AgentId ref = assignment.ref_rater[i][k];
      if (ref == agent) {
        throw ConstructionError(PairName(agent, tasks[k]) +
                                ": an agent cannot be her own reference");
      }
      ref_site_[s] = static_cast<std::uint32_t>(
          offset_[Index(ref)] + assignment.SlotOf(ref, tasks[k]));
      const StatisticSets& sets = assignment.stat_sets[i][k];
      if (static_cast<int>(sets.own.size()) != d_ ||
          static_cast<int>(sets.ref.size()) != d_) {
        throw ConstructionError(PairName(agent, tasks[k]) +
                                ": statistic sets must have size d");
      }
      for (int l = 0; l < d_; ++l) {
        own_stat_[s * d_ + l] = static_cast<std::uint32_t>(
            offset_[i] + assignment.SlotOf(agent, sets.own[l]));
        ref_stat_[s * d_ + l] = static_cast<std::uint32_t>(
            offset_[Index(ref)] + assignment.SlotOf(ref, sets.ref[l]));
      }
    }
  }
}

double RewardPlan::AgentReward(AgentId agent,
                               std::span<const Bit> reports) const {
  double total = 0.0;
  for (std::size_t s = first_site(agent); s < end_site(agent); ++s) {
    total += Evaluate(s, reports).reward();
  }
  return total;
}

RewardBreakdown ComputeRewards(const Assignment& assignment,
                               const ReportSet& reports) {
  const RewardPlan plan(assignment);
  const std::size_t n = assignment.tasks_of.size();
  std::vector<bool> needed(plan.num_sites(), false);
  for (std::size_t s = 0; s < plan.num_sites(); ++s) {
    needed[s] = true;
    needed[plan.ref_site(s)] = true;
    for (auto t : plan.own_stat(s)) needed[t] = true;
    for (auto t : plan.ref_stat(s)) needed[t] = true;
  }
  std::vector<Bit> flat(plan.num_sites(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId agent{static_cast<int>(i)};
    for (std::size_t s = plan.first_site(agent); s < plan.end_site(agent); ++s) {
      if (needed[s]) flat[s] = reports.AtSlot(agent, s - plan.first_site(agent));
    }
  }

  RewardBreakdown out;
  out.a.resize(n);
  out.b.resize(n);
  out.r.resize(n);
  out.total.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentId agent{static_cast<int>(i)};
    const std::size_t count = assignment.tasks_of[i].size();
    out.a[i].resize(count);
    out.b[i].resize(count);
    out.r[i].resize(count);
    for (std::size_t k = 0; k < count; ++k) {
      const PairTerms terms = plan.Evaluate(plan.site(agent, k), flat);
      out.a[i][k] = terms.agreement;
      out.b[i][k] = terms.statistic;
      out.r[i][k] = terms.reward();
      out.total[i] += terms.reward();
    }
  }
  out.payment = out.total;
  return out;
}

std::string ShiftName(PaymentShift shift) {
  return shift == PaymentShift::kNone ? "none" : "plus_one_per_task";
}

PaymentShift ParseShift(const std::string& name) {
  if (name == "none") return PaymentShift::kNone;
  if (name == "plus_one_per_task") return PaymentShift::kPlusOnePerTask;
  throw InputError("unknown payment shift '" + name +
                   "' (expected none or plus_one_per_task)");
}

RewardBreakdown ScaledPayment(RewardBreakdown breakdown, double beta,
                              PaymentShift shift) {
  if (!std::isfinite(beta) || beta < 0.0) {
    throw DomainError("beta must be nonnegative");
  }
  breakdown.payment.assign(breakdown.total.size(), 0.0);
  for (std::size_t i = 0; i < breakdown.r.size(); ++i) {
    double sum = 0.0;
    for (double r : breakdown.r[i]) {
      sum += shift == PaymentShift::kPlusOnePerTask ? r + 1.0 : r;
    }
    breakdown.payment[i] = beta * sum;
  }
  return breakdown;
}

std::vector<RewardRow> RewardRows(const Assignment& assignment,
                                  const ReportSet& reports,
                                  const RewardBreakdown& breakdown) {
  std::vector<RewardRow> rows;
  for (std::size_t i = 0; i < assignment.tasks_of.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    for (std::size_t k = 0; k < assignment.tasks_of[i].size(); ++k) {
      const TaskId task = assignment.tasks_of[i][k];
      const AgentId ref = assignment.ref_rater[i][k];
      RewardRow row;
      row.agent = ToInt(agent);
      row.task = ToInt(task);
      row.ref_rater = ToInt(ref);
      row.own_report = reports.AtSlot(agent, k);
      row.ref_report = reports.AtSlot(ref, assignment.SlotOf(ref, task));
      row.a = breakdown.a[i][k];
      row.b = breakdown.b[i][k];
      row.r = breakdown.r[i][k];
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace peerlab
