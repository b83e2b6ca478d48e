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

#include "peerlab/equilibrium.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "peerlab/analytic.h"
#include "peerlab/errors.h"

namespace peerlab {
namespace {

// Guards comparisons of quantities that are exactly zero in exact
// arithmetic against rounding.
constexpr double kRoundingSlack = 1e-12;

double EffortCost(const Scenario& s, AgentId agent) {
  const double cost = s.agents[Index(agent)].effort_cost();
  if (cost == 0.0) return 0.0;
  double effort = 0.0;
  for (const auto& plan : s.profile.plans[Index(agent)]) {
    effort += ExpectedEffort(plan);
  }
  return cost * effort;
}

double ScaledTolerance(const Scenario& s, double tolerance) {
  return s.beta > 0.0 ? tolerance * s.beta : tolerance;
}

void Classify(DeviationReport& r) {
  if (r.gain > r.tolerance) {
    r.status = DeviationStatus::kProfitable;
  } else if (r.gain >= -r.tolerance) {
    r.status = DeviationStatus::kIndifferent;
  } else {
    r.status = DeviationStatus::kWorse;
  }
}

DeviationReport MakeReport(const Scenario& s, AgentId agent,
                           const Deviation& deviation) {
  DeviationReport r;
  r.agent = ToInt(agent);
  r.deviation = deviation;
  if (deviation.slot) {
    r.slot = static_cast<int>(*deviation.slot);
    if (s.references == ReferenceMode::kFixed) {
      r.task = ToInt(s.assignment.tasks_of[Index(agent)][*deviation.slot]);
    }
  }
  return r;
}

std::vector<Deviation> DeviationsFor(const Scenario& s, AgentId agent,
                                     const NashOptions& options) {
  const std::vector<SlotPlan> basis = BasisCandidates(options.r_grid);
  std::vector<Deviation> out;
  if (options.whole_profile) {
    for (const auto& plan : basis) out.push_back({std::nullopt, plan});
  }
  if (options.single_task) {
    const std::size_t slots = s.assignment.tasks_of[Index(agent)].size();
    for (std::size_t k = 0; k < slots; ++k) {
      for (const auto& plan : basis) out.push_back({k, plan});
    }
  }
  return out;
}

// Reports for every deviation of one agent, sharing one Monte Carlo run.
std::vector<DeviationReport> McReports(const Scenario& s, AgentId agent,
                                       const std::vector<Deviation>& devs,
                                       const NashOptions& options) {
  const McDeviationResult mc =
      McDeviationGains(s, agent, devs, options.trials, options.threads);
  const double base_cost = EffortCost(s, agent);
  std::vector<DeviationReport> out;
  for (std::size_t k = 0; k < devs.size(); ++k) {
    DeviationReport r = MakeReport(s, agent, devs[k]);
    const double cand_cost = EffortCost(WithDeviation(s, agent, devs[k]), agent);
    r.estimator = Estimator::kMonteCarlo;
    r.baseline_value = s.beta * mc.baseline.mean - base_cost;
    r.candidate_value = s.beta * mc.value[k].mean - cand_cost;
    r.gain = s.beta * mc.gain[k].mean - (cand_cost - base_cost);
    r.std_error = s.beta * mc.gain[k].std_error;
    r.significance = r.std_error > 0.0 ? r.gain / r.std_error : 0.0;
    r.tolerance = options.mc_sigmas * r.std_error +
                  ScaledTolerance(s, kRoundingSlack);
    Classify(r);
    out.push_back(std::move(r));
  }
  return out;
}

std::optional<MixedStrategy> AsMixture(const SlotPlan& plan) {
  if (const auto* m = std::get_if<MixedStrategy>(&plan)) return *m;
  const auto& s = std::get<TaskStrategy>(plan);
  if (s == TaskStrategy::Truthful()) return MixedStrategy{1.0, 0.5};
  const double x = s.reporting.x();
  const double y = s.reporting.y();
  if (s.effort == Effort::kZero || std::abs(x + y - 1.0) <= kSumTolerance) {
    // The report ignores the observation only when x + y = 1; with zero
    // effort any matrix is a coin with bias equal to its mean H rate.
    return MixedStrategy{0.0, 0.5 * x + 0.5 * (1.0 - y)};
  }
  return std::nullopt;
}

}  // namespace

std::string EstimatorName(Estimator e) {
  switch (e) {
    case Estimator::kAuto:
      return "auto";
    case Estimator::kAnalytic:
      return "analytic";
    case Estimator::kEnumerate:
      return "enumerate";
    case Estimator::kMonteCarlo:
      return "mc";
  }
  return "unknown";
}

Estimator ParseEstimator(const std::string& name) {
  if (name == "auto") return Estimator::kAuto;
  if (name == "analytic") return Estimator::kAnalytic;
  if (name == "enumerate") return Estimator::kEnumerate;
  if (name == "mc") return Estimator::kMonteCarlo;
  throw InputError("unknown estimator '" + name +
                   "' (expected auto, analytic, enumerate or mc)");
}

std::string StatusName(DeviationStatus s) {
  switch (s) {
    case DeviationStatus::kWorse:
      return "worse";
    case DeviationStatus::kIndifferent:
      return "indifferent";
    case DeviationStatus::kProfitable:
      return "profitable";
  }
  return "unknown";
}

std::string DeviationReport::Scope() const {
  return slot ? "task" : "all";
}

std::vector<SlotPlan> BasisCandidates(const std::vector<double>& r_grid) {
  std::vector<SlotPlan> out = {TaskStrategy::Truthful(),
                               TaskStrategy::Inverted()};
  for (double r : r_grid) out.emplace_back(TaskStrategy::Coin(r));
  return out;
}

Estimator ChooseEstimator(const Scenario& s, AgentId agent, Estimator requested,
                          std::uint64_t budget) {
  if (requested != Estimator::kAuto) return requested;
  if (HasClosedForm(s, agent)) return Estimator::kAnalytic;
  if (s.references == ReferenceMode::kFixed &&
      EnumerationBranches(s, agent) <= budget) {
    return Estimator::kEnumerate;
  }
  return Estimator::kMonteCarlo;
}

double AgentValue(const Scenario& s, AgentId agent, Estimator estimator,
                  std::uint64_t budget) {
  double reward = 0.0;
  switch (estimator) {
    case Estimator::kAnalytic:
      reward = ExactExpectedReward(s, agent);
      break;
    case Estimator::kEnumerate:
      reward = EnumerateExpectedReward(s, agent, budget);
      break;
    default:
      throw InputError("AgentValue needs an exact estimator");
  }
  return s.beta * reward - EffortCost(s, agent);
}

DeviationReport DeviationGain(const Scenario& s, AgentId agent,
                              const Deviation& deviation,
                              const NashOptions& options) {
  const Estimator est =
      ChooseEstimator(s, agent, options.estimator, options.budget);
  if (est == Estimator::kMonteCarlo) {
    return McReports(s, agent, {deviation}, options).front();
  }
  DeviationReport r = MakeReport(s, agent, deviation);
  r.estimator = est;
  r.baseline_value = AgentValue(s, agent, est, options.budget);
  r.candidate_value =
      AgentValue(WithDeviation(s, agent, deviation), agent, est, options.budget);
  r.gain = r.candidate_value - r.baseline_value;
  r.tolerance = ScaledTolerance(s, options.tolerance);
  Classify(r);
  return r;
}

EquilibriumVerdict VerifyNash(const Scenario& s, const NashOptions& options) {
  ValidateScenario(s);
  EquilibriumVerdict verdict;
  {
    std::ostringstream desc;
    bool uniform = true;
    const SlotPlan& first = s.profile.plans.front().front();
    for (const auto& row : s.profile.plans) {
      for (const auto& p : row) uniform = uniform && p == first;
    }
    desc << (uniform ? "all " + Describe(first) : std::string("mixed profile"));
    verdict.profile = desc.str();
    std::ostringstream cands;
    cands << "{(1,X),(1,Xc)} + (0,r) for " << options.r_grid.size()
          << " r values";
    if (options.whole_profile) cands << ", all tasks";
    if (options.single_task) cands << ", single task";
    verdict.candidate_set = cands.str();
  }

  std::vector<int> agents = options.agents;
  if (agents.empty()) {
    for (std::size_t i = 0; i < s.agents.size(); ++i) {
      agents.push_back(static_cast<int>(i));
    }
  }
  for (int id : agents) {
    const AgentId agent{id};
    if (Index(agent) >= s.agents.size()) {
      throw InputError("no agent " + std::to_string(id));
    }
    const std::vector<Deviation> devs = DeviationsFor(s, agent, options);
    const Estimator est =
        ChooseEstimator(s, agent, options.estimator, options.budget);
    if (est == Estimator::kMonteCarlo) {
      auto reports = McReports(s, agent, devs, options);
      verdict.deviations.insert(verdict.deviations.end(), reports.begin(),
                                reports.end());
      continue;
    }
    const double base = AgentValue(s, agent, est, options.budget);
    for (const auto& dev : devs) {
      DeviationReport r = MakeReport(s, agent, dev);
      r.estimator = est;
      r.baseline_value = base;
      r.candidate_value =
          AgentValue(WithDeviation(s, agent, dev), agent, est, options.budget);
      r.gain = r.candidate_value - base;
      r.tolerance = ScaledTolerance(s, options.tolerance);
      Classify(r);
      verdict.deviations.push_back(std::move(r));
    }
  }

  if (verdict.deviations.empty()) return verdict;
  const auto worst = std::max_element(
      verdict.deviations.begin(), verdict.deviations.end(),
      [](const DeviationReport& a, const DeviationReport& b) {
        return a.gain - a.tolerance < b.gain - b.tolerance;
      });
  verdict.worst = *worst;
  verdict.tolerance = worst->tolerance;
  verdict.is_nash = worst->gain <= worst->tolerance;
  return verdict;
}

std::vector<GridEntry> SymmetricGridScan(const Prior& prior, double p,
                                         double step) {
  if (!(step > 0.0 && step <= 1.0)) {
    throw DomainError("grid step must lie in (0, 1]");
  }
  CheckProbability(p, "p");
  const int points = static_cast<int>(std::floor(1.0 / step + 1e-9));
  std::vector<double> grid;
  for (int k = 0; k <= points; ++k) {
    grid.push_back(std::min(1.0, k * step));
  }
  std::vector<GridEntry> out;
  for (Effort effort : {Effort::kZero, Effort::kFull}) {
    const double q = effort == Effort::kFull ? p : 0.5;
    for (double x : grid) {
      for (double y : grid) {
        // Pr[report H | truth] for every agent.
        const double h_h = x * q + (1.0 - y) * (1.0 - q);
        const double h_l = x * (1.0 - q) + (1.0 - y) * q;
        const double agreement =
            prior.p_h() * (h_h * h_h + (1.0 - h_h) * (1.0 - h_h)) +
            prior.p_l() * (h_l * h_l + (1.0 - h_l) * (1.0 - h_l));
        const double mean = prior.p_h() * h_h + prior.p_l() * h_l;
        const double statistic = mean * mean + (1.0 - mean) * (1.0 - mean);
        out.push_back({effort, x, y, agreement - statistic});
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const GridEntry& a, const GridEntry& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.effort != b.effort) return a.effort > b.effort;
    if (a.x != b.x) return a.x > b.x;
    return a.y > b.y;
  });
  return out;
}

DeviationReport LowEffortEscapeCheck(const Scenario& s, AgentId agent) {
  ValidateScenario(s);
  const std::size_t i = Index(agent);
  const Assignment& a = s.assignment;
  if (!s.profile.SlotConstant(agent)) {
    throw InputError("escape check needs one plan on all of the agent's tasks");
  }
  const auto own = AsMixture(s.profile.At(agent, 0));
  if (!own) throw InputError("agent plan is not a (1,X)/(0,r) mixture");

  auto truthful_mass = [&](AgentId ref) {
    if (!s.profile.SlotConstant(ref)) {
      throw InputError("escape check needs opponents with one plan on all tasks");
    }
    const auto mix = AsMixture(s.profile.At(ref, 0));
    if (!mix) throw InputError("opponent plan is not a (1,X)/(0,r) mixture");
    return mix->delta;
  };

  const double p_i = s.agents[i].max_proficiency();
  double per_task_sum = 0.0;
  for (std::size_t k = 0; k < a.tasks_of[i].size(); ++k) {
    std::vector<ReferenceMix> refs;
    if (s.references == ReferenceMode::kFixed) {
      const AgentId ref = a.ref_rater[i][k];
      refs.push_back({1.0, truthful_mass(ref),
                      s.agents[Index(ref)].max_proficiency()});
    } else {
      const double w = 1.0 / static_cast<double>(s.agents.size() - 1);
      for (std::size_t r = 0; r < s.agents.size(); ++r) {
        if (r == i) continue;
        const AgentId ref{static_cast<int>(r)};
        refs.push_back({w, truthful_mass(ref), s.agents[r].max_proficiency()});
      }
      // Renormalize the last weight so the weights sum to one exactly.
      double head = 0.0;
      for (std::size_t r = 0; r + 1 < refs.size(); ++r) head += refs[r].weight;
      refs.back().weight = 1.0 - head;
    }
    const double informative =
        (1.0 - s.trusted.mass) * MixedDeviationValue(1.0, refs, p_i, s.prior) +
        TrustedDeviationGain(s.trusted.mass, s.trusted.proficiency, p_i,
                             s.prior);
    per_task_sum += (1.0 - own->delta) * informative;
  }

  const Deviation dev{std::nullopt, TaskStrategy::Truthful()};
  DeviationReport r = MakeReport(s, agent, dev);
  r.estimator = Estimator::kAnalytic;
  r.baseline_value = AgentValue(s, agent, Estimator::kAnalytic);
  const double extra_cost = s.agents[i].effort_cost() * (1.0 - own->delta) *
                            static_cast<double>(a.tasks_of[i].size());
  r.gain = s.beta * per_task_sum - extra_cost;
  r.candidate_value = r.baseline_value + r.gain;
  r.tolerance = ScaledTolerance(s, 1e-9);
  Classify(r);
  return r;
}

double MinimumBeta(const Scenario& s, const NashOptions& options) {
  ValidateScenario(s);
  Scenario unit = s;
  unit.beta = 1.0;
  double beta = 0.0;
  for (std::size_t i = 0; i < s.agents.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    const double cost = s.agents[i].effort_cost();
    if (cost == 0.0) continue;
    const Estimator est =
        ChooseEstimator(unit, agent, options.estimator, options.budget);
    if (est == Estimator::kMonteCarlo) {
      throw InputError("minimum beta needs an exact estimator");
    }
    const double base_reward =
        AgentValue(unit, agent, est, options.budget) + EffortCost(unit, agent);
    for (const auto& dev : DeviationsFor(unit, agent, options)) {
      const Scenario cand = WithDeviation(unit, agent, dev);
      const double saved = EffortCost(unit, agent) - EffortCost(cand, agent);
      if (saved <= 0.0) continue;
      const double loss =
          base_reward -
          (AgentValue(cand, agent, est, options.budget) + EffortCost(cand, agent));
      if (loss <= kRoundingSlack) return std::numeric_limits<double>::infinity();
      beta = std::max(beta, saved / loss);
    }
  }
  return beta;
}

}  // namespace peerlab
