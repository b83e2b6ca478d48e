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

#ifndef PEERLAB_RNG_H_
#define PEERLAB_RNG_H_

// Counter-based random streams. Every random draw in a simulation is a pure
// function of (seed, trial, agent, task, stream, extra), so trials can run in
// any order or in parallel and still reproduce bit for bit, and a deviation
// by one agent leaves every other draw untouched.

#include <cstdint>
#include <limits>

namespace peerlab {

enum class Stream : std::uint32_t {
  kTruth = 1,
  kMixture = 2,
  kObservation = 3,
  kReport = 4,
  kTrustedPick = 5,
  kTrustedObservation = 6,
  kTrustedStatTruth = 7,
  kTrustedStatObservation = 8,
  kAssignment = 9,
};

// SplitMix64 finalizer.
constexpr std::uint64_t Mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t StreamKey(std::uint64_t seed, std::uint64_t trial,
                        std::uint32_t agent, std::uint32_t task, Stream stream,
                        std::uint32_t extra = 0);

// Uniform double in [0, 1) with 53 random bits.
inline double ToUnit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double UniformDraw(std::uint64_t seed, std::uint64_t trial,
                          std::uint32_t agent, std::uint32_t task,
                          Stream stream, std::uint32_t extra = 0) {
  return ToUnit(StreamKey(seed, trial, agent, task, stream, extra));
}

// Sequential SplitMix64 generator; satisfies UniformRandomBitGenerator.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Unbiased integer in [0, bound) by rejection; bound must be positive.
  std::uint64_t Below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

}  // namespace peerlab

#endif  // PEERLAB_RNG_H_
