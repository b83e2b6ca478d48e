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

#ifndef PEERLAB_ANALYTIC_H_
#define PEERLAB_ANALYTIC_H_

// Closed-form expected rewards.

#include <span>
#include <vector>

#include "peerlab/model.h"
#include "peerlab/scenario.h"

namespace peerlab {

// Agreement probability of two truthful observers with proficiencies p and
// q, minus alpha times the agreement of independent observers with the same
// marginals.
double FAlpha(double p, double q, double alpha, const Prior& prior);
// FAlpha with alpha = 1; equals 2(2p-1)(2q-1) P[H] P[L].
double F1(double p, double q, const Prior& prior);

struct HomogeneousScenario {
  int d_tasks = 1;
  double proficiency = 0.5;
  Prior prior{0.5};
};

enum class HomogeneousPlay { kTruth, kInvert, kRandom };

// R_i when every opponent plays (1,X) with the same proficiency. r is the
// coin bias for kRandom.
double ExpectedRewardHomogeneous(const HomogeneousScenario& s,
                                 HomogeneousPlay own, double r = 0.5);

// Per-task own proficiency q_j, the mean reference proficiency, and the
// ratio d_ij/d per task.
struct ProfileSummary {
  std::vector<double> own_proficiency;
  double ref_mean = 0.5;
  std::vector<double> ratio;
};

// Sum over tasks of f_{ratio}(q_j, ref_mean) + (ratio - 1)(1 - ref_mean[H]),
// for truthful opponents.
double ExpectedRewardProfile(const ProfileSummary& summary, const Prior& prior);

// One reference rater in the low-effort mixture setting: chosen with
// probability `weight`, plays (1,X) with probability `truthful_mass`.
struct ReferenceMix {
  double weight = 1.0;
  double truthful_mass = 0.0;
  double proficiency = 0.5;
};

// delta * sum_k weight_k * truthful_mass_k * F1(p_i, p_k). Throws
// DomainError unless the weights sum to one.
double MixedDeviationValue(double delta, std::span<const ReferenceMix> refs,
                           double p_i, const Prior& prior);

// eps_t * F1(p_i, t): per-task gain of moving from any coin strategy to
// (1,X) when references are otherwise uninformative.
double TrustedDeviationGain(double eps_t, double t, double p_i,
                            const Prior& prior);

// True when ExactExpectedReward applies: always for a fixed assignment; with
// resampled references, when every other agent plays the same plan on all
// of her tasks.
bool HasClosedForm(const Scenario& scenario, AgentId agent);

// Unscaled E[R_i] from per-task report probabilities. Statistic sets are
// disjoint from the rewarded task and from each other, so the statistic
// term factors into a product of means.
double ExactExpectedReward(const Scenario& scenario, AgentId agent);
std::vector<double> ExactExpectedRewards(const Scenario& scenario);

}  // namespace peerlab

#endif  // PEERLAB_ANALYTIC_H_
