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

#include "peerlab/analytic.h"

#include <cmath>
#include <string>
#include <vector>

#include "peerlab/errors.h"

namespace peerlab {
namespace {

double Agree(double a, double b) { return a * b + (1.0 - a) * (1.0 - b); }

// Mean over truth of Pr[report H | truth].
double MeanH(const SlotPlan& plan, const AgentParams& params,
             const Prior& prior) {
  return prior.p_h() * ReportProbH(plan, params, kH) +
         prior.p_l() * ReportProbH(plan, params, kL);
}

// Pr[both report the same] for two conditionally independent reporters.
double AgreeGivenTruth(double own_h_given_h, double own_h_given_l,
                       double ref_h_given_h, double ref_h_given_l,
                       const Prior& prior) {
  return prior.p_h() * Agree(own_h_given_h, ref_h_given_h) +
         prior.p_l() * Agree(own_h_given_l, ref_h_given_l);
}

// Per-agent report statistics needed by the closed form.
struct PlanStats {
  double given_h;
  double given_l;
  double mean;
};

PlanStats StatsOf(const SlotPlan& plan, const AgentParams& params,
                  const Prior& prior) {
  return {ReportProbH(plan, params, kH), ReportProbH(plan, params, kL),
          MeanH(plan, params, prior)};
}

double SlotValue(const Scenario& s, const PlanStats& own, double own_stat_mean,
                 const PlanStats& ref, double ref_stat_mean) {
  const Prior& prior = s.prior;
  double value = AgreeGivenTruth(own.given_h, own.given_l, ref.given_h,
                                 ref.given_l, prior) -
                 Agree(own_stat_mean, ref_stat_mean);
  const double eps = s.trusted.mass;
  if (eps > 0.0) {
    const double t = s.trusted.proficiency;
    const double trusted =
        AgreeGivenTruth(own.given_h, own.given_l, t, 1.0 - t, prior) -
        Agree(own_stat_mean, SignalProb(t, prior));
    value = (1.0 - eps) * value + eps * trusted;
  }
  return value;
}

}  // namespace

double FAlpha(double p, double q, double alpha, const Prior& prior) {
  CheckProbability(p, "p");
  CheckProbability(q, "q");
  return Agree(p, q) -
         alpha * Agree(SignalProb(p, prior), SignalProb(q, prior));
}

double F1(double p, double q, const Prior& prior) {
  return FAlpha(p, q, 1.0, prior);
}

double ExpectedRewardHomogeneous(const HomogeneousScenario& s,
                                 HomogeneousPlay own, double r) {
  if (s.d_tasks < 1) throw DomainError("D must be at least 1");
  CheckProbability(s.proficiency, "proficiency");
  const double d = static_cast<double>(s.d_tasks);
  switch (own) {
    case HomogeneousPlay::kTruth:
      return d * F1(s.proficiency, s.proficiency, s.prior);
    case HomogeneousPlay::kInvert:
      return -ExpectedRewardHomogeneous(s, HomogeneousPlay::kTruth);
    case HomogeneousPlay::kRandom: {
      CheckProbability(r, "r");
      // Agreement with a truthful reference and the statistic term are the
      // same expression when reports ignore the task.
      const double ref_h = SignalProb(s.proficiency, s.prior);
      const double agreement = Agree(r, ref_h);
      const double statistic = Agree(r, ref_h);
      return d * (agreement - statistic);
    }
  }
  return 0.0;
}

double ExpectedRewardProfile(const ProfileSummary& summary,
                             const Prior& prior) {
  if (summary.ratio.size() != summary.own_proficiency.size()) {
    throw InputError("ratio and proficiency vectors differ in length");
  }
  CheckProbability(summary.ref_mean, "reference mean proficiency");
  const double ref_h = SignalProb(summary.ref_mean, prior);
  double total = 0.0;
  for (std::size_t j = 0; j < summary.ratio.size(); ++j) {
    const double ratio = summary.ratio[j];
    total += FAlpha(summary.own_proficiency[j], summary.ref_mean, ratio, prior) +
             (ratio - 1.0) * (1.0 - ref_h);
  }
  return total;
}

double MixedDeviationValue(double delta, std::span<const ReferenceMix> refs,
                           double p_i, const Prior& prior) {
  CheckProbability(delta, "delta");
  double weight = 0.0;
  double sum = 0.0;
  for (const auto& ref : refs) {
    CheckProbability(ref.weight, "reference weight");
    CheckProbability(ref.truthful_mass, "reference truthful mass");
    weight += ref.weight;
    sum += ref.weight * ref.truthful_mass * F1(p_i, ref.proficiency, prior);
  }
  if (std::abs(weight - 1.0) > kSumTolerance) {
    throw DomainError("reference weights sum to " + std::to_string(weight) +
                      ", not 1");
  }
  return delta * sum;
}

double TrustedDeviationGain(double eps_t, double t, double p_i,
                            const Prior& prior) {
  CheckProbability(eps_t, "trusted mass");
  return eps_t * F1(p_i, t, prior);
}

bool HasClosedForm(const Scenario& scenario, AgentId agent) {
  if (scenario.references == ReferenceMode::kFixed) return true;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    if (i != Index(agent) &&
        !scenario.profile.SlotConstant(AgentId{static_cast<int>(i)})) {
      return false;
    }
  }
  return true;
}

double ExactExpectedReward(const Scenario& s, AgentId agent) {
  ValidateScenario(s);
  if (!HasClosedForm(s, agent)) {
    throw InputError(
        "no closed form: resampled references need every other agent to use "
        "one plan on all tasks");
  }
  const Assignment& a = s.assignment;
  const std::size_t i = Index(agent);
  const AgentParams& params = s.agents[i];
  const auto& tasks = a.tasks_of[i];

  std::vector<PlanStats> own(tasks.size());
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    own[k] = StatsOf(s.profile.At(agent, k), params, s.prior);
  }
  auto own_stat_mean = [&](std::size_t k) {
    double sum = 0.0;
    for (TaskId t : a.stat_sets[i][k].own) sum += own[a.SlotOf(agent, t)].mean;
    return sum / static_cast<double>(a.d);
  };

  double total = 0.0;
  if (s.references == ReferenceMode::kFixed) {
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const AgentId ref = a.ref_rater[i][k];
      const AgentParams& ref_params = s.agents[Index(ref)];
      const PlanStats ref_stats =
          StatsOf(s.profile.At(ref, a.SlotOf(ref, tasks[k])), ref_params,
                  s.prior);
      double ref_sum = 0.0;
      for (TaskId t : a.stat_sets[i][k].ref) {
        ref_sum +=
            MeanH(s.profile.At(ref, a.SlotOf(ref, t)), ref_params, s.prior);
      }
      total += SlotValue(s, own[k], own_stat_mean(k), ref_stats,
                         ref_sum / static_cast<double>(a.d));
    }
    return total;
  }

  // Resampled: each slot's reference is uniform over the other agents.
  const std::size_t n = s.agents.size();
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    const double own_mean = own_stat_mean(k);
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == i) continue;
      const AgentId ref{static_cast<int>(r)};
      const PlanStats ref_stats = StatsOf(s.profile.At(ref, 0), s.agents[r],
                                          s.prior);
      sum += SlotValue(s, own[k], own_mean, ref_stats, ref_stats.mean);
    }
    total += sum / static_cast<double>(n - 1);
  }
  return total;
}

std::vector<double> ExactExpectedRewards(const Scenario& scenario) {
  std::vector<double> out;
  out.reserve(scenario.agents.size());
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    out.push_back(ExactExpectedReward(scenario, AgentId{static_cast<int>(i)}));
  }
  return out;
}

}  // namespace peerlab
