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

#include "peerlab/model.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "peerlab/errors.h"

namespace peerlab {

void CheckProbability(double value, const char* what) {
  if (!std::isfinite(value) || value < 0.0 || value > 1.0) {
    std::ostringstream msg;
    msg << what << " must be a probability in [0, 1], got " << value;
    throw DomainError(msg.str());
  }
}

Prior::Prior(double p_h) : Prior(p_h, 1.0 - p_h) {}

Prior::Prior(double p_h, double p_l) : p_h_(p_h), p_l_(p_l) {
  CheckProbability(p_h, "P[H]");
  CheckProbability(p_l, "P[L]");
  if (std::abs(p_h + p_l - 1.0) > kSumTolerance) {
    throw DomainError("prior masses must sum to 1");
  }
  // The ground truth must be genuinely uncertain.
  if (p_h <= 0.0 || p_l <= 0.0) {
    throw DomainError("degenerate prior: need 0 < P[H] < 1");
  }
}

AgentParams::AgentParams(AgentId id, double max_proficiency,
                         double effort_cost)
    : id_(id), max_proficiency_(max_proficiency), effort_cost_(effort_cost) {
  CheckProbability(max_proficiency, "maximum proficiency");
  if (max_proficiency < 0.5) {
    throw DomainError("maximum proficiency must be at least 1/2");
  }
  if (!std::isfinite(effort_cost) || effort_cost < 0.0) {
    throw DomainError("effort cost must be nonnegative");
  }
}

ReportingMatrix::ReportingMatrix(double x, double y) : x_(x), y_(y) {
  CheckProbability(x, "reporting matrix x");
  CheckProbability(y, "reporting matrix y");
}

ReportingMatrix ReportingMatrix::Coin(double r) {
  CheckProbability(r, "coin bias r");
  return {r, 1.0 - r};
}

BasisWeights::BasisWeights(double truth, double invert, double always_h,
                           double always_l) {
  for (double w : {truth, invert, always_h, always_l}) {
    if (!std::isfinite(w) || w < 0.0) {
      throw DomainError("basis weights must be nonnegative");
    }
  }
  if (std::abs(truth + invert + always_h + always_l - 1.0) > kSumTolerance) {
    throw DomainError("basis weights must sum to 1");
  }
  // Route through the matrix so that e.g. equal always-H/always-L mass is
  // rewritten as truth/invert mass.
  const double x = std::clamp(truth + always_h, 0.0, 1.0);
  const double y = std::clamp(truth + always_l, 0.0, 1.0);
  *this = DecomposeReportingMatrix(ReportingMatrix(x, y));
}

BasisWeights DecomposeReportingMatrix(const ReportingMatrix& m) {
  const double x = m.x();
  const double y = m.y();
  // alpha_3 = x - y if x >= y, else alpha_4 = y - x; alpha_1 = x - alpha_3
  // and alpha_2 = 1 - y - alpha_3 simplify to min/max below.
  return BasisWeights(BasisWeights::Canonical{}, std::min(x, y),
                      1.0 - std::max(x, y), x >= y ? x - y : 0.0,
                      y > x ? y - x : 0.0);
}

ReportingMatrix ComposeReportingMatrix(const BasisWeights& w) {
  return ReportingMatrix(std::clamp(w.truth() + w.always_h(), 0.0, 1.0),
                         std::clamp(w.truth() + w.always_l(), 0.0, 1.0));
}

std::string Describe(const TaskStrategy& s) {
  std::ostringstream out;
  const int e = s.effort == Effort::kFull ? 1 : 0;
  const double x = s.reporting.x();
  const double y = s.reporting.y();
  out << "(" << e << ",";
  if (x == 1.0 && y == 1.0) {
    out << "X";
  } else if (x == 0.0 && y == 0.0) {
    out << "Xc";
  } else if (std::abs(x + y - 1.0) <= kSumTolerance) {
    out << "r=" << x;
  } else {
    out << "x=" << x << ",y=" << y;
  }
  out << ")";
  return out.str();
}

double SignalProb(double p, const Prior& prior) {
  CheckProbability(p, "proficiency");
  return p * prior.p_h() + (1.0 - p) * prior.p_l();
}

double EffectiveProficiency(Effort effort, const AgentParams& params) {
  return effort == Effort::kFull ? params.max_proficiency() : 0.5;
}

double ReportDistribution(const TaskStrategy& strategy,
                          const AgentParams& params, Bit truth) {
  const double q = EffectiveProficiency(strategy.effort, params);
  const double p_obs_h = truth == kH ? q : 1.0 - q;
  return p_obs_h * strategy.reporting.ProbReportH(kH) +
         (1.0 - p_obs_h) * strategy.reporting.ProbReportH(kL);
}

}  // namespace peerlab
