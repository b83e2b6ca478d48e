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

#ifndef PEERLAB_EQUILIBRIUM_H_
#define PEERLAB_EQUILIBRIUM_H_

// Deviation gains, Nash checks over a finite candidate set, symmetric grid
// scans and low-effort escape checks.
//
// Values are in payment units: beta * E[R_i] minus the expected effort cost.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peerlab/model.h"
#include "peerlab/scenario.h"
#include "peerlab/simulation.h"

namespace peerlab {

enum class Estimator { kAuto, kAnalytic, kEnumerate, kMonteCarlo };

std::string EstimatorName(Estimator e);
Estimator ParseEstimator(const std::string& name);

enum class DeviationStatus { kWorse, kIndifferent, kProfitable };

std::string StatusName(DeviationStatus s);

struct DeviationReport {
  int agent = 0;
  // Empty for a deviation on all tasks.
  std::optional<int> slot;
  int task = -1;
  Deviation deviation;
  double baseline_value = 0.0;
  double candidate_value = 0.0;
  double gain = 0.0;
  double std_error = 0.0;  // zero for exact estimators
  Estimator estimator = Estimator::kAnalytic;
  double significance = 0.0;  // gain / std_error for Monte Carlo
  double tolerance = 0.0;     // threshold the status was judged against
  DeviationStatus status = DeviationStatus::kWorse;

  std::string Scope() const;
};

struct EquilibriumVerdict {
  std::string profile;
  bool is_nash = true;
  DeviationReport worst;
  std::vector<DeviationReport> deviations;
  std::string candidate_set;
  double tolerance = 0.0;
};

struct NashOptions {
  Estimator estimator = Estimator::kAuto;
  // Coin biases for the zero-effort candidates.
  std::vector<double> r_grid = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
  double tolerance = 1e-9;   // exact estimators, per unit of beta
  double mc_sigmas = 3.0;
  std::int64_t trials = 100000;
  std::uint64_t budget = kDefaultEnumerationBudget;
  bool whole_profile = true;
  bool single_task = true;
  // Empty means every agent.
  std::vector<int> agents;
  int threads = 0;
};

// {(1,X), (1,Xc)} and (0,r) for r in the grid.
std::vector<SlotPlan> BasisCandidates(const std::vector<double>& r_grid);

// Resolves kAuto: analytic when a closed form applies, else enumeration
// within the budget, else Monte Carlo.
Estimator ChooseEstimator(const Scenario& scenario, AgentId agent,
                          Estimator requested, std::uint64_t budget);

// beta * E[R_i] - cost * expected effort, by an exact estimator.
double AgentValue(const Scenario& scenario, AgentId agent, Estimator estimator,
                  std::uint64_t budget = kDefaultEnumerationBudget);

DeviationReport DeviationGain(const Scenario& scenario, AgentId agent,
                              const Deviation& deviation,
                              const NashOptions& options = {});

// Reward is affine in every report probability and separable over the
// agent's tasks, so single-task deviations to basis plans cover every
// deviation that keeps effort fixed per task.
EquilibriumVerdict VerifyNash(const Scenario& scenario,
                              const NashOptions& options = {});

struct GridEntry {
  Effort effort = Effort::kZero;
  double x = 0.0;
  double y = 0.0;
  double value = 0.0;
};

// Per-task reward when every agent plays the same (effort, x, y), for x, y
// on a grid of the given step. Sorted by value, descending; ties broken by
// effort, x, y descending. Throws DomainError for a step outside (0, 1].
std::vector<GridEntry> SymmetricGridScan(const Prior& prior, double p,
                                         double step);

// Gain to `agent` of moving every task from its current mixture to (1,X).
// Requires the agent's plans to be mixtures (or coins) on every slot and
// opponents to play mixtures or (1,X)/(0,r). gain sums the per-task gains.
DeviationReport LowEffortEscapeCheck(const Scenario& scenario, AgentId agent);

// Smallest beta at which no basis deviation that lowers effort pays off,
// given effort costs; 0 when costs are zero. Infinity when some lower-effort
// deviation loses no reward.
double MinimumBeta(const Scenario& scenario, const NashOptions& options = {});

}  // namespace peerlab

#endif  // PEERLAB_EQUILIBRIUM_H_
