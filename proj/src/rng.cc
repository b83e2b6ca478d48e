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

#include "peerlab/rng.h"

namespace peerlab {

std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t trial,
                        std::uint32_t agent, std::uint32_t task, Stream stream,
                        std::uint32_t extra) {
  std::uint64_t h = Mix64(seed ^ 0x5851f42d4c957f2dULL);
  h = Mix64(h ^ trial);
  h = Mix64(h ^ ((static_cast<std::uint64_t>(agent) << 32) | task));
  h = Mix64(h ^ ((static_cast<std::uint64_t>(stream) << 32) | extra));
  return h;
}

std::uint64_t SplitMix64::Below(std::uint64_t bound) {
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t v;
  do {
    v = (*this)();
  } while (v >= limit);
  return v % bound;
}

}  // namespace peerlab
