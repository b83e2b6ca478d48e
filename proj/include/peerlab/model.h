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

#ifndef PEERLAB_MODEL_H_
#define PEERLAB_MODEL_H_

// Probabilistic model of a single rating: ground-truth prior, agent
// proficiency, effort, and the 2x2 reporting matrices that map an agent's
// observation into her report.

#include <string>

#include "peerlab/ids.h"

namespace peerlab {

// Tolerance used when validating that probabilities or weights sum to one.
inline constexpr double kSumTolerance = 1e-12;

// Throws DomainError unless value is a finite number in [0, 1].
void CheckProbability(double value, const char* what);

// Common prior over the binary ground truth of every task.
class Prior {
 public:
  // P[L] is taken as 1 - p_h.
  explicit Prior(double p_h);
  // Both masses given explicitly; they must sum to one within kSumTolerance.
  Prior(double p_h, double p_l);

  double p_h() const { return p_h_; }
  double p_l() const { return p_l_; }
  double Of(Bit truth) const { return truth == kH ? p_h_ : p_l_; }

  bool operator==(const Prior&) const = default;

 private:
  double p_h_;
  double p_l_;
};

class AgentParams {
 public:
  // max_proficiency must lie in [1/2, 1]; effort_cost must be >= 0.
  AgentParams(AgentId id, double max_proficiency, double effort_cost = 0.0);

  AgentId id() const { return id_; }
  double max_proficiency() const { return max_proficiency_; }
  double effort_cost() const { return effort_cost_; }

 private:
  AgentId id_;
  double max_proficiency_;
  double effort_cost_;
};

// Column-stochastic matrix [[x, 1-y], [1-x, y]]: x = Pr[report H | saw H],
// y = Pr[report L | saw L].
class ReportingMatrix {
 public:
  ReportingMatrix(double x, double y);

  static ReportingMatrix Truthful() { return {1.0, 1.0}; }
  static ReportingMatrix Inverted() { return {0.0, 0.0}; }
  static ReportingMatrix AlwaysH() { return {1.0, 0.0}; }
  static ReportingMatrix AlwaysL() { return {0.0, 1.0}; }
  // Reports H with probability r regardless of the observation.
  static ReportingMatrix Coin(double r);

  double x() const { return x_; }
  double y() const { return y_; }

  double ProbReportH(Bit observation) const {
    return observation == kH ? x_ : 1.0 - y_;
  }

  bool operator==(const ReportingMatrix&) const = default;

 private:
  double x_;
  double y_;
};

// Convex weights over the four basis reporting matrices (truthful,
// inverting, always-H, always-L). Always stored in canonical form: at most
// one of always_h and always_l is nonzero.
class BasisWeights {
 public:
  // Any nonnegative weights summing to one are accepted and normalized to
  // the canonical form with the same reporting matrix.
  BasisWeights(double truth, double invert, double always_h, double always_l);

  double truth() const { return truth_; }
  double invert() const { return invert_; }
  double always_h() const { return always_h_; }
  double always_l() const { return always_l_; }

 private:
  friend BasisWeights DecomposeReportingMatrix(const ReportingMatrix& m);
  struct Canonical {};
  BasisWeights(Canonical, double truth, double invert, double always_h,
               double always_l)
      : truth_(truth), invert_(invert), always_h_(always_h),
        always_l_(always_l) {}

  double truth_;
  double invert_;
  double always_h_;
  double always_l_;
};

BasisWeights DecomposeReportingMatrix(const ReportingMatrix& m);
ReportingMatrix ComposeReportingMatrix(const BasisWeights& w);

enum class Effort : std::uint8_t { kZero = 0, kFull = 1 };

struct TaskStrategy {
  Effort effort = Effort::kFull;
  ReportingMatrix reporting = ReportingMatrix::Truthful();

  // (1, X): full effort, report the observation.
  static TaskStrategy Truthful() { return {Effort::kFull, ReportingMatrix::Truthful()}; }
  // (1, X^c): full effort, report the opposite of the observation.
  static TaskStrategy Inverted() { return {Effort::kFull, ReportingMatrix::Inverted()}; }
  // (0, r): no effort, report H with probability r.
  static TaskStrategy Coin(double r) { return {Effort::kZero, ReportingMatrix::Coin(r)}; }

  bool operator==(const TaskStrategy&) const = default;
};

// Short human-readable label such as "(1,X)", "(0,r=0.3)" or "(1,x=0.5,y=1)".
std::string Describe(const TaskStrategy& s);

// Probability that an observer with proficiency p sees H.
double SignalProb(double p, const Prior& prior);

// Proficiency actually achieved: p_i under full effort, 1/2 otherwise.
double EffectiveProficiency(Effort effort, const AgentParams& params);

// Pr[report = H | ground truth] for one agent on one task.
double ReportDistribution(const TaskStrategy& strategy,
                          const AgentParams& params, Bit truth);

}  // namespace peerlab

#endif  // PEERLAB_MODEL_H_
