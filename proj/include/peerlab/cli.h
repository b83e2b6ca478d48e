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

#ifndef PEERLAB_CLI_H_
#define PEERLAB_CLI_H_

// Batch driver behind the peerlab binary.
//
//   peerlab assign      --config PATH   assignment table and validation
//   peerlab simulate    --config PATH   per-agent reward estimates
//   peerlab equilibrium --config PATH   deviation table and verdict, or a
//                                       symmetric grid scan
//   peerlab analytic    --config PATH   closed-form values
//
// Common flags: --seed N, --trials N, --out DIR, --format {csv,json}.

#include <ostream>

namespace peerlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitBudget = 4;
inline constexpr int kExitInternal = 1;

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace peerlab

#endif  // PEERLAB_CLI_H_
