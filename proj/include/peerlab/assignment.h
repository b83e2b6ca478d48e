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

#ifndef PEERLAB_ASSIGNMENT_H_
#define PEERLAB_ASSIGNMENT_H_

// Block construction of task assignments, reference-rater selection, and the
// structural validators the reward rule depends on.
//
// Tasks are split into m/D task blocks of D consecutive tasks, agents (after
// a random permutation) into T agent blocks of n/T agents. Agent b of the
// first block rates all of task block b; agent b of every later block rates
// the arithmetic progression {b, b + m/D, ..., b + (m/D)(D-1)}. When
// m >= D^2 the progression hits D distinct task blocks, which is what makes
// single-overlap reference raters available.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "peerlab/mechanism.h"

namespace peerlab {

// Throws ConstructionError unless m/D and n/T are integral and m*T == n*D.
void CheckBlockSpec(const BlockSpec& spec);

// Without a seed the permutation is the identity.
BlockPlan MakeBlockPlan(const BlockSpec& spec,
                        std::optional<std::uint64_t> permutation_seed);

// Fills tasks_of, agents_of and layout.
Assignment BuildBlockAssignment(const BlockSpec& spec,
                                std::optional<std::uint64_t> permutation_seed);

// Agents outside the first block are compared with the first-block agent
// owning the task's block. First-block agents are compared with a
// later-block agent on the task: for kFull the one in the second block, for
// kRing one drawn uniformly (seeded) among those for which ring statistic
// sets exist. kFull refuses m < D^2.
Assignment ChooseReferenceRaters(Assignment assignment, StatScheme scheme,
                                 std::uint64_t seed);

// BuildBlockAssignment + ChooseReferenceRaters + BuildStatisticSets.
Assignment BuildMechanismAssignment(const BlockSpec& spec, StatScheme scheme,
                                    std::optional<std::uint64_t> seed);

enum class ViolationKind {
  kCapacity,
  kReferenceMembership,
  kStatisticSets,
  kOverlap,
  kInducedCount,
  kRingSchedule,
};

std::string ViolationName(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  int agent = -1;
  int task = -1;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t Count(ViolationKind kind) const;
};

// Lists every violated condition; never throws on malformed content.
ValidationReport ValidateAssignment(const Assignment& assignment,
                                    StatScheme scheme);

using AssignmentBuilder = std::function<Assignment(std::uint64_t seed)>;

struct SlotSymmetry {
  int agent = 0;
  int slot = 0;
  double mean = 0.0;        // mean reference proficiency in this slot
  double std_error = 0.0;
  double agent_mean = 0.0;  // pooled over the agent's slots
  bool flagged = false;
};

struct SymmetryReport {
  std::vector<SlotSymmetry> slots;
  int flagged = 0;
};

// Rebuilds the assignment for every seed and, per (agent, task slot),
// compares the mean proficiency of the reference rater with the agent's
// pooled mean over all slots. A slot is flagged when the gap exceeds
// `sigmas` standard errors.
SymmetryReport ReferenceSymmetryCheck(const AssignmentBuilder& builder,
                                      std::span<const double> proficiency,
                                      std::span<const std::uint64_t> seeds,
                                      double sigmas = 4.0);

}  // namespace peerlab

#endif  // PEERLAB_ASSIGNMENT_H_
