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

#ifndef PEERLAB_SIMULATION_H_
#define PEERLAB_SIMULATION_H_

// Monte Carlo estimation of expected rewards and deviation gains, plus an
// exhaustive enumeration oracle for small instances.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "peerlab/mechanism.h"
#include "peerlab/scenario.h"

namespace peerlab {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t trials = 0;
};

// Streaming mean and variance; Merge combines two disjoint samples.
struct MeanAccumulator {
  std::int64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void Add(double x);
  void Merge(const MeanAccumulator& other);
  McEstimate Estimate() const;
};

// Trials are split into fixed blocks of this size. Each block is reduced on
// its own and blocks are merged in index order, so results do not depend on
// the thread count.
inline constexpr std::int64_t kTrialBlock = 1024;

// Fills `out` with one value per output for a trial. Each worker thread gets
// its own function from the factory.
using TrialFn = std::function<void(std::uint64_t trial, std::span<double> out)>;
using TrialFnFactory = std::function<TrialFn()>;

// threads <= 0 picks the hardware concurrency.
std::vector<McEstimate> RunTrials(std::int64_t trials, std::size_t outputs,
                                  const TrialFnFactory& factory,
                                  int threads = 0);

// Ground truth per task for one trial.
std::vector<Bit> SampleWorld(const Scenario& scenario, std::uint64_t trial);

// Reports on `assignment` (normally TrialAssignment(scenario, trial)).
// Observations are written in (agent, slot) order when requested.
ReportSet SampleReports(const std::vector<Bit>& world,
                        const Scenario& scenario, const Assignment& assignment,
                        std::uint64_t trial,
                        std::vector<Bit>* observations = nullptr);

// Evaluates one trial at a time; reused across trials by a single thread.
class TrialEvaluator {
 public:
  explicit TrialEvaluator(const Scenario& scenario);

  void Sample(std::uint64_t trial);
  // Unscaled R_i for the sampled trial.
  double Reward(AgentId agent) const;
  // R_i after redrawing the agent's reports under a deviation, using the same
  // random numbers. The sampled reports are restored afterwards.
  double RewardUnder(AgentId agent, const Deviation& deviation);

  const Assignment& assignment() const { return *assignment_; }
  const std::vector<Bit>& truth() const { return truth_; }
  const std::vector<Bit>& reports() const { return reports_; }
  const std::vector<Bit>& observations() const { return observations_; }

 private:
  void DrawSite(AgentId agent, std::size_t slot, const SlotPlan& plan);

  const Scenario& scenario_;
  std::uint64_t trial_ = 0;
  Assignment trial_assignment_;
  const Assignment* assignment_ = nullptr;
  std::optional<RewardPlan> plan_;
  std::vector<Bit> truth_;
  std::vector<Bit> observations_;
  std::vector<Bit> reports_;
  std::vector<Bit> trusted_pick_;
  std::vector<Bit> trusted_report_;
  std::vector<int> trusted_stat_h_;
};

// Unscaled R_i per agent.
std::vector<McEstimate> McExpectedRewards(const Scenario& scenario,
                                          std::int64_t trials,
                                          int threads = 0);

struct McDeviationResult {
  McEstimate baseline;
  std::vector<McEstimate> value;  // per deviation
  std::vector<McEstimate> gain;   // paired difference, per deviation
};

// All deviations share the baseline's random numbers.
McDeviationResult McDeviationGains(const Scenario& scenario, AgentId agent,
                                   std::span<const Deviation> deviations,
                                   std::int64_t trials, int threads = 0);

inline constexpr std::uint64_t kDefaultEnumerationBudget = 1ULL << 24;

// Branches the oracle visits for one agent; saturates at UINT64_MAX.
std::uint64_t EnumerationBranches(const Scenario& scenario, AgentId agent);

// Exact E[R_i] by summing over every joint outcome of the random variables
// R_i depends on. Throws BudgetExceeded above the budget and InputError for
// resampled references.
double EnumerateExpectedReward(const Scenario& scenario, AgentId agent,
                               std::uint64_t budget = kDefaultEnumerationBudget);

// The budget applies to the total over agents.
std::vector<double> EnumerateExpectedRewards(
    const Scenario& scenario,
    std::uint64_t budget = kDefaultEnumerationBudget);

struct TrialRecord {
  std::int64_t trial = 0;
  int task = 0;
  int truth = 0;
  int agent = 0;
  int observation = 0;
  int report = 0;
};

std::vector<TrialRecord> DumpTrials(const Scenario& scenario,
                                    std::int64_t trials);

}  // namespace peerlab

#endif  // PEERLAB_SIMULATION_H_
