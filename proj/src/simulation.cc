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

#include "peerlab/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "peerlab/errors.h"
#include "peerlab/rng.h"

namespace peerlab {

void MeanAccumulator::Add(double x) {
  ++n;
  const double delta = x - mean;
  mean += delta / static_cast<double>(n);
  m2 += delta * (x - mean);
}

void MeanAccumulator::Merge(const MeanAccumulator& other) {
  if (other.n == 0) return;
  if (n == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n + other.n);
  const double delta = other.mean - mean;
  mean += delta * static_cast<double>(other.n) / total;
  m2 += other.m2 + delta * delta * static_cast<double>(n) *
                       static_cast<double>(other.n) / total;
  n += other.n;
}

McEstimate MeanAccumulator::Estimate() const {
  McEstimate e;
  e.mean = mean;
  e.trials = n;
  if (n > 1) {
    const double var = std::max(0.0, m2 / static_cast<double>(n - 1));
    e.std_error = std::sqrt(var / static_cast<double>(n));
  }
  return e;
}

std::vector<McEstimate> RunTrials(std::int64_t trials, std::size_t outputs,
                                  const TrialFnFactory& factory, int threads) {
  if (trials < 1) throw InputError("trials must be at least 1");
  const std::int64_t blocks = (trials + kTrialBlock - 1) / kTrialBlock;
  std::vector<std::vector<MeanAccumulator>> acc(
      static_cast<std::size_t>(blocks), std::vector<MeanAccumulator>(outputs));

  std::atomic<std::int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    try {
      TrialFn fn = factory();
      std::vector<double> out(outputs);
      for (std::int64_t b = next++; b < blocks; b = next++) {
        auto& row = acc[static_cast<std::size_t>(b)];
        const std::int64_t end = std::min(trials, (b + 1) * kTrialBlock);
        for (std::int64_t t = b * kTrialBlock; t < end; ++t) {
          fn(static_cast<std::uint64_t>(t), out);
          for (std::size_t k = 0; k < outputs; ++k) row[k].Add(out[k]);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };

  int workers = threads > 0 ? threads
                            : static_cast<int>(std::thread::hardware_concurrency());
  workers = static_cast<int>(std::clamp<std::int64_t>(workers, 1, blocks));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  // Pairwise merge in block order.
  for (std::size_t width = 1; width < acc.size(); width *= 2) {
    for (std::size_t b = 0; b + width < acc.size(); b += 2 * width) {
      for (std::size_t k = 0; k < outputs; ++k) acc[b][k].Merge(acc[b + width][k]);
    }
  }
  std::vector<McEstimate> result(outputs);
  for (std::size_t k = 0; k < outputs; ++k) result[k] = acc[0][k].Estimate();
  return result;
}

namespace {

struct SiteDraw {
  Bit observation;
  Bit report;
};

SiteDraw DrawReport(const SlotPlan& plan, const AgentParams& params, Bit truth,
                    std::uint64_t seed, std::uint64_t trial, AgentId agent,
                    TaskId task) {
  const auto a = static_cast<std::uint32_t>(ToInt(agent));
  const auto j = static_cast<std::uint32_t>(ToInt(task));
  TaskStrategy strategy;
  if (const auto* s = std::get_if<TaskStrategy>(&plan)) {
    strategy = *s;
  } else {
    const auto& m = std::get<MixedStrategy>(plan);
    strategy = UniformDraw(seed, trial, a, j, Stream::kMixture) < m.delta
                   ? TaskStrategy::Truthful()
                   : TaskStrategy::Coin(m.r);
  }
  const double q = EffectiveProficiency(strategy.effort, params);
  const bool correct = UniformDraw(seed, trial, a, j, Stream::kObservation) < q;
  const Bit obs = correct ? truth : static_cast<Bit>(1 - truth);
  const Bit report = UniformDraw(seed, trial, a, j, Stream::kReport) <
                             strategy.reporting.ProbReportH(obs)
                         ? kH
                         : kL;
  return {obs, report};
}

}  // namespace

std::vector<Bit> SampleWorld(const Scenario& scenario, std::uint64_t trial) {
  std::vector<Bit> truth(static_cast<std::size_t>(scenario.assignment.num_tasks));
  for (std::size_t j = 0; j < truth.size(); ++j) {
    truth[j] = UniformDraw(scenario.seed, trial, 0, static_cast<std::uint32_t>(j),
                           Stream::kTruth) < scenario.prior.p_h()
                   ? kH
                   : kL;
  }
  return truth;
}

ReportSet SampleReports(const std::vector<Bit>& world,
                        const Scenario& scenario, const Assignment& assignment,
                        std::uint64_t trial, std::vector<Bit>* observations) {
  if (static_cast<int>(world.size()) != assignment.num_tasks) {
    throw InputError("world does not cover every task");
  }
  ReportSet reports(assignment);
  if (observations) observations->clear();
  for (std::size_t i = 0; i < assignment.tasks_of.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    for (std::size_t k = 0; k < assignment.tasks_of[i].size(); ++k) {
      const TaskId task = assignment.tasks_of[i][k];
      const SiteDraw d =
          DrawReport(scenario.profile.At(agent, k), scenario.agents[i],
                     world[Index(task)], scenario.seed, trial, agent, task);
      reports.SetSlot(agent, k, d.report);
      if (observations) observations->push_back(d.observation);
    }
  }
  return reports;
}

TrialEvaluator::TrialEvaluator(const Scenario& scenario) : scenario_(scenario) {
  ValidateScenario(scenario);
  if (scenario.references == ReferenceMode::kFixed) {
    assignment_ = &scenario.assignment;
    plan_.emplace(*assignment_);
  }
}

void TrialEvaluator::DrawSite(AgentId agent, std::size_t slot,
                              const SlotPlan& plan) {
  const TaskId task = assignment_->tasks_of[Index(agent)][slot];
  const std::size_t site = plan_->site(agent, slot);
  const SiteDraw d = DrawReport(plan, scenario_.agents[Index(agent)],
                                truth_[Index(task)], scenario_.seed, trial_,
                                agent, task);
  observations_[site] = d.observation;
  reports_[site] = d.report;
}

void TrialEvaluator::Sample(std::uint64_t trial) {
  trial_ = trial;
  if (scenario_.references == ReferenceMode::kResampled) {
    trial_assignment_ = TrialAssignment(scenario_, trial);
    assignment_ = &trial_assignment_;
    plan_.emplace(*assignment_);
  }
  truth_ = SampleWorld(scenario_, trial);
  const std::size_t sites = plan_->num_sites();
  reports_.assign(sites, kL);
  observations_.assign(sites, kL);
  for (std::size_t i = 0; i < assignment_->tasks_of.size(); ++i) {
    const AgentId agent{static_cast<int>(i)};
    for (std::size_t k = 0; k < assignment_->tasks_of[i].size(); ++k) {
      DrawSite(agent, k, scenario_.profile.At(agent, k));
    }
  }

  const TrustedRaters& trusted = scenario_.trusted;
  trusted_pick_.assign(sites, 0);
  if (trusted.mass <= 0.0) return;
  trusted_report_.assign(sites, kL);
  trusted_stat_h_.assign(sites, 0);
  const std::uint64_t seed = scenario_.seed;
  for (std::size_t i = 0; i < assignment_->tasks_of.size(); ++i) {
    const auto a = static_cast<std::uint32_t>(i);
    for (std::size_t k = 0; k < assignment_->tasks_of[i].size(); ++k) {
      const TaskId task = assignment_->tasks_of[i][k];
      const auto j = static_cast<std::uint32_t>(ToInt(task));
      const std::size_t site = plan_->site(AgentId{static_cast<int>(i)}, k);
      if (UniformDraw(seed, trial, a, j, Stream::kTrustedPick) >= trusted.mass) {
        continue;
      }
      trusted_pick_[site] = 1;
      const Bit truth = truth_[Index(task)];
      trusted_report_[site] =
          UniformDraw(seed, trial, a, j, Stream::kTrustedObservation) <
                  trusted.proficiency
              ? truth
              : static_cast<Bit>(1 - truth);
      int h = 0;
      for (int e = 0; e < plan_->d(); ++e) {
        const auto ue = static_cast<std::uint32_t>(e);
        const bool vt = UniformDraw(seed, trial, a, j, Stream::kTrustedStatTruth,
                                    ue) < scenario_.prior.p_h();
        const bool seen =
            UniformDraw(seed, trial, a, j, Stream::kTrustedStatObservation, ue) <
                    trusted.proficiency
                ? vt
                : !vt;
        h += seen ? 1 : 0;
      }
      trusted_stat_h_[site] = h;
    }
  }
}

double TrialEvaluator::Reward(AgentId agent) const {
  const RewardPlan& plan = *plan_;
  double total = 0.0;
  for (std::size_t s = plan.first_site(agent); s < plan.end_site(agent); ++s) {
    if (trusted_pick_[s]) {
      total += EvaluatePair(reports_[s], trusted_report_[s],
                            plan.CountH(plan.own_stat(s), reports_),
                            trusted_stat_h_[s], plan.d())
                   .reward();
    } else {
      total += plan.Evaluate(s, reports_).reward();
    }
  }
  return total;
}

double TrialEvaluator::RewardUnder(AgentId agent, const Deviation& deviation) {
  const std::size_t first = plan_->first_site(agent);
  const std::size_t end = plan_->end_site(agent);
  const std::vector<Bit> saved_reports(reports_.begin() + first,
                                       reports_.begin() + end);
  const std::vector<Bit> saved_obs(observations_.begin() + first,
                                   observations_.begin() + end);
  if (deviation.slot) {
    DrawSite(agent, *deviation.slot, deviation.plan);
  } else {
    for (std::size_t k = 0; k < end - first; ++k) {
      DrawSite(agent, k, deviation.plan);
    }
  }
  const double value = Reward(agent);
  std::copy(saved_reports.begin(), saved_reports.end(), reports_.begin() + first);
  std::copy(saved_obs.begin(), saved_obs.end(), observations_.begin() + first);
  return value;
}

std::vector<McEstimate> McExpectedRewards(const Scenario& scenario,
                                          std::int64_t trials, int threads) {
  ValidateScenario(scenario);
  const std::size_t n = scenario.agents.size();
  return RunTrials(
      trials, n,
      [&scenario, n]() -> TrialFn {
        auto eval = std::make_shared<TrialEvaluator>(scenario);
        return [eval, n](std::uint64_t trial, std::span<double> out) {
          eval->Sample(trial);
          for (std::size_t i = 0; i < n; ++i) {
            out[i] = eval->Reward(AgentId{static_cast<int>(i)});
          }
        };
      },
      threads);
}

McDeviationResult McDeviationGains(const Scenario& scenario, AgentId agent,
                                   std::span<const Deviation> deviations,
                                   std::int64_t trials, int threads) {
  ValidateScenario(scenario);
  if (Index(agent) >= scenario.agents.size()) {
    throw InputError("no agent " + std::to_string(ToInt(agent)));
  }
  for (const auto& d : deviations) CheckSlotPlan(d.plan);
  const std::size_t c = deviations.size();
  // Layout: baseline, values, gains.
  const auto est = RunTrials(
      trials, 1 + 2 * c,
      [&scenario, agent, deviations, c]() -> TrialFn {
        auto eval = std::make_shared<TrialEvaluator>(scenario);
        return [eval, agent, deviations, c](std::uint64_t trial,
                                            std::span<double> out) {
          eval->Sample(trial);
          const double base = eval->Reward(agent);
          out[0] = base;
          for (std::size_t k = 0; k < c; ++k) {
            const double v = eval->RewardUnder(agent, deviations[k]);
            out[1 + k] = v;
            out[1 + c + k] = v - base;
          }
        };
      },
      threads);
  McDeviationResult result;
  result.baseline = est[0];
  result.value.assign(est.begin() + 1, est.begin() + 1 + static_cast<long>(c));
  result.gain.assign(est.begin() + 1 + static_cast<long>(c), est.end());
  return result;
}

namespace {

// Pr[report H | truth], summed over mixture, observation and report branches.
double LocalProbH(const SlotPlan& plan, double max_proficiency, Bit truth) {
  std::vector<std::pair<double, TaskStrategy>> branches;
  if (const auto* s = std::get_if<TaskStrategy>(&plan)) {
    branches.emplace_back(1.0, *s);
  } else {
    const auto& m = std::get<MixedStrategy>(plan);
    branches.emplace_back(m.delta, TaskStrategy::Truthful());
    branches.emplace_back(1.0 - m.delta, TaskStrategy::Coin(m.r));
  }
  double total = 0.0;
  for (const auto& [weight, strategy] : branches) {
    const double q = strategy.effort == Effort::kFull ? max_proficiency : 0.5;
    for (Bit obs : {kL, kH}) {
      const double p_obs = obs == truth ? q : 1.0 - q;
      const double p_h =
          obs == kH ? strategy.reporting.x() : 1.0 - strategy.reporting.y();
      total += weight * p_obs * p_h;
    }
  }
  return total;
}

// Depth-first sum over every binary variable R_i depends on.
class AgentOracle {
 public:
  AgentOracle(const Scenario& s, AgentId agent) : s_(s), agent_(agent) {
    const Assignment& a = s.assignment;
    const auto& tasks = a.tasks_of[Index(agent)];
    d_ = a.d;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const AgentId ref = a.ref_rater[Index(agent)][k];
      const StatisticSets& sets = a.stat_sets[Index(agent)][k];
      Slot slot;
      slot.own = SiteOf(agent, tasks[k]);
      slot.ref = SiteOf(ref, tasks[k]);
      for (TaskId t : sets.own) slot.own_stat.push_back(SiteOf(agent, t));
      for (TaskId t : sets.ref) slot.ref_stat.push_back(SiteOf(ref, t));
      slot.truth = TruthOf(tasks[k]);
      slots_.push_back(std::move(slot));
    }
    trusted_ = s.trusted.mass > 0.0;
  }

  std::uint64_t Branches() const {
    std::uint64_t bits = truth_task_.size() + site_agent_.size();
    if (trusted_) bits += slots_.size() * (2 + 2 * static_cast<std::uint64_t>(d_));
    if (bits >= 64) return std::numeric_limits<std::uint64_t>::max();
    return 1ULL << bits;
  }

  double Run() {
    truth_.assign(truth_task_.size(), 0);
    report_.assign(site_agent_.size(), 0);
    pick_.assign(slots_.size(), 0);
    t_report_.assign(slots_.size(), 0);
    v_truth_.assign(slots_.size() * static_cast<std::size_t>(d_), 0);
    v_report_.assign(v_truth_.size(), 0);
    total_ = 0.0;
    Truths(0, 1.0);
    return total_;
  }

 private:
  struct Slot {
    int own = 0;
    int ref = 0;
    std::vector<int> own_stat;
    std::vector<int> ref_stat;
    int truth = 0;  // index into the truth variables
  };

  int TruthOf(TaskId task) {
    auto [it, added] =
        truth_index_.emplace(ToInt(task), static_cast<int>(truth_task_.size()));
    if (added) truth_task_.push_back(task);
    return it->second;
  }

  int SiteOf(AgentId agent, TaskId task) {
    const auto key = std::make_pair(ToInt(agent), ToInt(task));
    auto [it, added] =
        site_index_.emplace(key, static_cast<int>(site_agent_.size()));
    if (added) {
      site_agent_.push_back(agent);
      site_slot_.push_back(s_.assignment.SlotOf(agent, task));
      site_truth_.push_back(TruthOf(task));
    }
    return it->second;
  }

  void Truths(std::size_t k, double prob) {
    if (prob == 0.0) return;
    if (k == truth_task_.size()) {
      Reports(0, prob);
      return;
    }
    for (Bit b : {kL, kH}) {
      truth_[k] = b;
      Truths(k + 1, prob * s_.prior.Of(b));
    }
  }

  void Reports(std::size_t k, double prob) {
    if (prob == 0.0) return;
    if (k == site_agent_.size()) {
      Trusted(0, prob);
      return;
    }
    const AgentId agent = site_agent_[k];
    const double p_h = LocalProbH(
        s_.profile.At(agent, site_slot_[k]),
        s_.agents[Index(agent)].max_proficiency(),
        truth_[static_cast<std::size_t>(site_truth_[k])]);
    report_[k] = kH;
    Reports(k + 1, prob * p_h);
    report_[k] = kL;
    Reports(k + 1, prob * (1.0 - p_h));
  }

  // Trusted variables per slot: pick, report on the task, then d virtual
  // (truth, report) pairs.
  void Trusted(std::size_t slot, double prob) {
    if (prob == 0.0) return;
    if (!trusted_ || slot == slots_.size()) {
      total_ += prob * Leaf();
      return;
    }
    const double mass = s_.trusted.mass;
    const double t = s_.trusted.proficiency;
    const Bit truth = truth_[static_cast<std::size_t>(slots_[slot].truth)];
    for (Bit pick : {kL, kH}) {
      pick_[slot] = pick;
      const double p_pick = pick ? mass : 1.0 - mass;
      for (Bit rep : {kL, kH}) {
        t_report_[slot] = rep;
        Virtual(slot, 0, prob * p_pick * (rep == truth ? t : 1.0 - t));
      }
    }
  }

  void Virtual(std::size_t slot, int e, double prob) {
    if (prob == 0.0) return;
    if (e == d_) {
      Trusted(slot + 1, prob);
      return;
    }
    const std::size_t v = slot * static_cast<std::size_t>(d_) +
                          static_cast<std::size_t>(e);
    const double t = s_.trusted.proficiency;
    for (Bit vt : {kL, kH}) {
      v_truth_[v] = vt;
      for (Bit vr : {kL, kH}) {
        v_report_[v] = vr;
        Virtual(slot, e + 1, prob * s_.prior.Of(vt) * (vr == vt ? t : 1.0 - t));
      }
    }
  }

  double Leaf() const {
    double r = 0.0;
    for (std::size_t k = 0; k < slots_.size(); ++k) {
      const Slot& slot = slots_[k];
      int own_h = 0;
      for (int site : slot.own_stat) own_h += report_[static_cast<std::size_t>(site)];
      Bit ref = report_[static_cast<std::size_t>(slot.ref)];
      int ref_h = 0;
      if (trusted_ && pick_[k]) {
        ref = t_report_[k];
        for (int e = 0; e < d_; ++e) {
          ref_h += v_report_[k * static_cast<std::size_t>(d_) +
                             static_cast<std::size_t>(e)];
        }
      } else {
        for (int site : slot.ref_stat) ref_h += report_[static_cast<std::size_t>(site)];
      }
      r += EvaluatePair(report_[static_cast<std::size_t>(slot.own)], ref, own_h,
                        ref_h, d_)
               .reward();
    }
    return r;
  }

  const Scenario& s_;
  AgentId agent_;
  int d_ = 0;
  bool trusted_ = false;
  std::vector<Slot> slots_;
  std::map<int, int> truth_index_;
  std::vector<TaskId> truth_task_;
  std::map<std::pair<int, int>, int> site_index_;
  std::vector<AgentId> site_agent_;
  std::vector<std::size_t> site_slot_;
  std::vector<int> site_truth_;

  std::vector<Bit> truth_;
  std::vector<Bit> report_;
  std::vector<Bit> pick_;
  std::vector<Bit> t_report_;
  std::vector<Bit> v_truth_;
  std::vector<Bit> v_report_;
  double total_ = 0.0;
};

void CheckEnumerable(const Scenario& scenario) {
  ValidateScenario(scenario);
  if (scenario.references != ReferenceMode::kFixed) {
    throw InputError("enumeration needs a fixed assignment");
  }
}

std::uint64_t SaturatingAdd(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  return a > max - b ? max : a + b;
}

}  // namespace

std::uint64_t EnumerationBranches(const Scenario& scenario, AgentId agent) {
  CheckEnumerable(scenario);
  return AgentOracle(scenario, agent).Branches();
}

double EnumerateExpectedReward(const Scenario& scenario, AgentId agent,
                               std::uint64_t budget) {
  CheckEnumerable(scenario);
  AgentOracle oracle(scenario, agent);
  const std::uint64_t need = oracle.Branches();
  if (need > budget) throw BudgetExceeded(need, budget);
  return oracle.Run();
}

std::vector<double> EnumerateExpectedRewards(const Scenario& scenario,
                                             std::uint64_t budget) {
  CheckEnumerable(scenario);
  std::uint64_t need = 0;
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    need = SaturatingAdd(
        need, AgentOracle(scenario, AgentId{static_cast<int>(i)}).Branches());
  }
  if (need > budget) throw BudgetExceeded(need, budget);
  std::vector<double> out;
  out.reserve(scenario.agents.size());
  for (std::size_t i = 0; i < scenario.agents.size(); ++i) {
    out.push_back(AgentOracle(scenario, AgentId{static_cast<int>(i)}).Run());
  }
  return out;
}

std::vector<TrialRecord> DumpTrials(const Scenario& scenario,
                                    std::int64_t trials) {
  TrialEvaluator eval(scenario);
  std::vector<TrialRecord> rows;
  for (std::int64_t t = 0; t < trials; ++t) {
    eval.Sample(static_cast<std::uint64_t>(t));
    const Assignment& a = eval.assignment();
    std::size_t site = 0;
    for (std::size_t i = 0; i < a.tasks_of.size(); ++i) {
      for (TaskId task : a.tasks_of[i]) {
        rows.push_back({t, ToInt(task), eval.truth()[Index(task)],
                        static_cast<int>(i), eval.observations()[site],
                        eval.reports()[site]});
        ++site;
      }
    }
  }
  return rows;
}

}  // namespace peerlab
