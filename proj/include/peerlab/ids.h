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

#ifndef PEERLAB_IDS_H_
#define PEERLAB_IDS_H_

#include <cstddef>
#include <cstdint>

namespace peerlab {

enum class AgentId : std::int32_t {};
enum class TaskId : std::int32_t {};

constexpr std::size_t Index(AgentId id) { return static_cast<std::size_t>(id); }
constexpr std::size_t Index(TaskId id) { return static_cast<std::size_t>(id); }
constexpr int ToInt(AgentId id) { return static_cast<int>(id); }
constexpr int ToInt(TaskId id) { return static_cast<int>(id); }

// Binary signal values. H is encoded as 1 and L as 0 everywhere.
using Bit = std::uint8_t;
inline constexpr Bit kL = 0;
inline constexpr Bit kH = 1;

}  // namespace peerlab

#endif  // PEERLAB_IDS_H_
