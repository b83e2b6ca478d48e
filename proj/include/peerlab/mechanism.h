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

#ifndef PEERLAB_MECHANISM_H_
#define PEERLAB_MECHANISM_H_

// Reward rule of the multi-task peer-prediction mechanism: every report is
// scored by agreement with a reference rater's report on the same task,
// minus the agreement expected from the two agents' empirical report
// frequencies on d non-overlapping other tasks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peerlab/ids.h"

namespace peerlab {

// How the statistic-term task sets are chosen.
//   kRing: d = 1, task slot k uses slot k+1 (wrapping) of the same agent.
//   kFull: d = D-1, all of the agent's other tasks.
//   kCustom: a user-supplied table.
enum class StatScheme { kRing, kFull, kCustom };

std::string SchemeName(StatScheme scheme);
// Accepts "ring_d1", "full_dminus1", "custom". Throws InputError otherwise.
StatScheme ParseScheme(const std::string& name);

// Sizes of a block-structured assignment: m tasks, n agents, D tasks per
// agent, T raters per task.
struct BlockSpec {
  int m = 0;
  int n = 0;
  int d_tasks = 0;
  int raters = 0;

  bool operator==(const BlockSpec&) const = default;
};

// Placement of agents into agent blocks. Position p holds agent agent_at[p];
// positions [a*n/T, (a+1)*n/T) form agent block a (0-based).
struct BlockPlan {
  BlockSpec spec;
  std::vector<AgentId> agent_at;
  std::vector<int> position_of;

  int agents_per_block() const { return spec.n / spec.raters; }
  int BlockOf(AgentId agent) const {
    return position_of[Index(agent)] / agents_per_block();
  }
};

struct StatisticSets {
  std::vector<TaskId> own;  // S_ij, drawn from the agent's other tasks
  std::vector<TaskId> ref;  // S_i'j, drawn from the reference rater's tasks
};

// Who rates what, who is compared with whom, and which reports feed each
// statistic term. Per-pair data is indexed [agent][slot] where slot is the
// position of the task in tasks_of[agent].
struct Assignment {
  int num_tasks = 0;
  std::vector<std::vector<TaskId>> tasks_of;
  std::vector<std::vector<AgentId>> agents_of;
  // Empty until reference raters are chosen.
  std::vector<std::vector<AgentId>> ref_rater;
  // Empty until statistic sets are built.
  std::vector<std::vector<StatisticSets>> stat_sets;
  int d = 0;
  StatScheme scheme = StatScheme::kCustom;
  std::optional<BlockPlan> layout;

  int num_agents() const { return static_cast<int>(tasks_of.size()); }
  bool has_references() const { return !ref_rater.empty(); }
  bool has_stat_sets() const { return !stat_sets.empty(); }

  std::optional<std::size_t> FindSlot(AgentId agent, TaskId task) const;
  // Throws InputError if the agent does not rate the task.
  std::size_t SlotOf(AgentId agent, TaskId task) const;
};

// Fills agents_of from tasks_of. Throws InputError for out-of-range task ids
// or a task listed twice for the same agent.
Assignment MakeAssignment(int num_tasks,
                          std::vector<std::vector<TaskId>> tasks_of);

// Fills stat_sets for kRing or kFull. Requires reference raters. Throws
// ConstructionError naming the offending (agent, task, reference) when the
// two sets cannot be made disjoint.
Assignment BuildStatisticSets(Assignment assignment, StatScheme scheme);

// Describes the first way the statistic sets of one pair break the
// structural conditions (subset of the owner's other tasks, disjoint, size
// d), or returns nullopt when they are well formed.
std::optional<std::string> CheckStatisticSets(const Assignment& assignment,
                                              AgentId agent, std::size_t slot);

// Installs a user-supplied table (scheme kCustom) after checking every
// structural condition on the sets. Throws ConstructionError on violation.
Assignment SetCustomStatisticSets(
    Assignment assignment, std::vector<std::vector<StatisticSets>> sets);

// T_ij: the tasks j' whose statistic term consumes agent i's report on j.
struct InducedSets {
  std::vector<std::vector<std::vector<TaskId>>> t_of;  // [agent][slot]
  std::vector<std::vector<int>> d_of;                  // |T_ij|
};

InducedSets ComputeInducedSets(const Assignment& assignment);

// Binary reports on exactly the (agent, task) pairs of an assignment.
class ReportSet {
 public:
  explicit ReportSet(const Assignment& assignment);

  void Set(AgentId agent, TaskId task, Bit value);
  void SetSlot(AgentId agent, std::size_t slot, Bit value);
  std::optional<Bit> Get(AgentId agent, TaskId task) const;
  // Throws InputError if the report is missing.
  Bit AtSlot(AgentId agent, std::size_t slot) const;

  bool complete() const;
  // Flat storage in (agent, slot) order; -1 marks a missing report.
  const std::vector<std::int8_t>& raw() const { return values_; }

 private:
  std::vector<std::vector<TaskId>> tasks_of_;
  std::vector<std::size_t> offset_;
  std::vector<std::int8_t> values_;
};

// The two terms of one (agent, task) reward.
struct PairTerms {
  int agreement = 0;       // A_ij in {0, 1}
  double statistic = 0.0;  // B_ij in [0, 1]
  double reward() const { return agreement - statistic; }
};

// own_h and ref_h count H reports within the two statistic sets of size d.
// B is evaluated as an integer numerator over d^2, so it is exact up to a
// single rounding.
PairTerms EvaluatePair(Bit own, Bit ref, int own_h, int ref_h, int d);

struct RewardBreakdown {
  std::vector<std::vector<int>> a;     // [agent][slot]
  std::vector<std::vector<double>> b;  // [agent][slot]
  std::vector<std::vector<double>> r;  // [agent][slot]
  std::vector<double> total;           // R_i
  std::vector<double> payment;         // beta-scaled, possibly shifted
};

// Throws InputError when any report needed by any reward is missing.
RewardBreakdown ComputeRewards(const Assignment& assignment,
                               const ReportSet& reports);

enum class PaymentShift { kNone, kPlusOnePerTask };

std::string ShiftName(PaymentShift shift);
PaymentShift ParseShift(const std::string& name);

// payment_i = beta * sum_j (R_ij + shift). Throws DomainError for beta < 0.
RewardBreakdown ScaledPayment(RewardBreakdown breakdown, double beta,
                              PaymentShift shift);

// One flat record per (agent, task).
struct RewardRow {
  int agent = 0;
  int task = 0;
  int ref_rater = 0;
  int own_report = 0;
  int ref_report = 0;
  int a = 0;
  double b = 0.0;
  double r = 0.0;
};

std::vector<RewardRow> RewardRows(const Assignment& assignment,
                                  const ReportSet& reports,
                                  const RewardBreakdown& breakdown);

// Precomputed flat indices for evaluating rewards repeatedly against reports
// stored in (agent, slot) order. Each (agent, slot) pair is a "site".
class RewardPlan {
 public:
  // Requires reference raters and statistic sets.
  explicit RewardPlan(const Assignment& assignment);

  std::size_t num_sites() const { return ref_site_.size(); }
  std::size_t num_agents() const { return offset_.size() - 1; }
  int d() const { return d_; }
  std::size_t site(AgentId agent, std::size_t slot) const {
    return offset_[Index(agent)] + slot;
  }
  std::size_t first_site(AgentId agent) const { return offset_[Index(agent)]; }
  std::size_t end_site(AgentId agent) const { return offset_[Index(agent) + 1]; }
  std::size_t ref_site(std::size_t site) const { return ref_site_[site]; }
  std::span<const std::uint32_t> own_stat(std::size_t site) const {
    return {own_stat_.data() + site * d_, static_cast<std::size_t>(d_)};
  }
  std::span<const std::uint32_t> ref_stat(std::size_t site) const {
    return {ref_stat_.data() + site * d_, static_cast<std::size_t>(d_)};
  }

  int CountH(std::span<const std::uint32_t> sites,
             std::span<const Bit> reports) const {
    int h = 0;
    for (std::uint32_t s : sites) h += reports[s];
    return h;
  }

  PairTerms Evaluate(std::size_t site, std::span<const Bit> reports) const {
    return EvaluatePair(reports[site], reports[ref_site_[site]],
                        CountH(own_stat(site), reports),
                        CountH(ref_stat(site), reports), d_);
  }

  // R_i for one agent.
  double AgentReward(AgentId agent, std::span<const Bit> reports) const;

 private:
  int d_ = 0;
  std::vector<std::size_t> offset_;
  std::vector<std::uint32_t> ref_site_;
  std::vector<std::uint32_t> own_stat_;
  std::vector<std::uint32_t> ref_stat_;
};

}  // namespace peerlab

#endif  // PEERLAB_MECHANISM_H_
