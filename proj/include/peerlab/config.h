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

#ifndef PEERLAB_CONFIG_H_
#define PEERLAB_CONFIG_H_

// Experiment configuration: a JSON document. Unknown keys are rejected so a
// typo never silently falls back to a default.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "peerlab/equilibrium.h"
#include "peerlab/errors.h"
#include "peerlab/mechanism.h"
#include "peerlab/scenario.h"

namespace peerlab {

// Malformed configuration; the message names the offending field.
class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

struct AssignmentConfig {
  // Block construction.
  std::optional<BlockSpec> block;
  StatScheme scheme = StatScheme::kRing;
  std::optional<std::uint64_t> seed;  // defaults to the experiment seed
  bool permute = true;
  ReferenceMode references = ReferenceMode::kFixed;
  // Explicit assignment; used when no block is given.
  int num_tasks = 0;
  std::vector<std::vector<TaskId>> tasks_of;
  std::vector<std::vector<AgentId>> ref_rater;
  std::vector<std::vector<StatisticSets>> stat_sets;  // scheme kCustom only
};

struct GridScanConfig {
  double proficiency = 0.8;
  double step = 0.1;
};

struct AnalyticConfig {
  std::optional<double> p;
  std::optional<double> q;
  double alpha = 1.0;
  std::optional<int> d_tasks;
  double r = 0.5;
};

struct ExperimentConfig {
  Prior prior{0.5};
  std::vector<double> proficiency;  // one per agent
  std::vector<double> cost;         // one per agent
  AssignmentConfig assignment;
  // Per agent, per slot; filled from a preset or an explicit table.
  std::string profile_preset = "all_truth";
  SlotPlan preset_plan = TaskStrategy::Truthful();
  std::vector<std::vector<SlotPlan>> profile_table;
  TrustedRaters trusted;
  double beta = 1.0;
  PaymentShift shift = PaymentShift::kNone;
  Estimator estimator = Estimator::kAuto;
  std::int64_t trials = 10000;
  std::uint64_t seed = 0;
  std::uint64_t budget = kDefaultEnumerationBudget;
  int threads = 0;
  NashOptions nash;
  std::optional<GridScanConfig> grid_scan;
  AnalyticConfig analytic;
  std::int64_t dump_trials = 0;
  std::string output_dir;
  std::string format = "csv";
  // The parsed document, serialized with sorted keys.
  std::string canonical;
};

// Throws ConfigError with the field path (and line/column for syntax
// errors).
ExperimentConfig ParseConfig(const std::string& text);
ExperimentConfig LoadConfig(const std::string& path);

// FNV-1a over the canonical document plus the effective seed and trial
// count, so command-line overrides change the hash.
std::uint64_t ConfigHash(const ExperimentConfig& config);

// Builds the assignment; throws ConstructionError when it cannot be built.
Assignment BuildAssignment(const ExperimentConfig& config);

// Throws ConfigError when the roster or profile does not fit the assignment.
Scenario BuildScenario(const ExperimentConfig& config);

}  // namespace peerlab

#endif  // PEERLAB_CONFIG_H_
