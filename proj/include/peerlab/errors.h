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

#ifndef PEERLAB_ERRORS_H_
#define PEERLAB_ERRORS_H_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace peerlab {

// Out-of-range probabilities, weights, or scaling parameters.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or incomplete inputs, e.g. a report missing for a required pair.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An assignment or statistic-set construction that cannot satisfy its
// structural conditions.
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exhaustive enumeration refused because the outcome space is too large.
class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t required, std::uint64_t budget)
      : std::runtime_error("enumeration needs " + std::to_string(required) +
                           " branches, budget is " + std::to_string(budget)),
        required_(required),
        budget_(budget) {}

  std::uint64_t required() const { return required_; }
  std::uint64_t budget() const { return budget_; }

 private:
  std::uint64_t required_;
  std::uint64_t budget_;
};

}  // namespace peerlab

#endif  // PEERLAB_ERRORS_H_
