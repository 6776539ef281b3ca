// Copyright 2026 The Hopcast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOPCAST_TOLERANCE_HPP_
#define HOPCAST_TOLERANCE_HPP_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hopcast/topology.hpp"

namespace hopcast::tolerance {

enum class Region { Ensured, Probable, Impossible };
const char* to_string(Region r);

struct Mode {
  enum class Kind { Consensus, Delivery };
  Kind kind = Kind::Consensus;
  int group_size = 0;  // Delivery only

  static Mode consensus() { return {}; }
  static Mode delivery(int g) { return {Kind::Delivery, g}; }
  friend bool operator==(const Mode&, const Mode&) = default;
};

enum class SolvabilityRule {
  // >= quorum correct processes each hear from >= quorum-1 other correct ones.
  DecisionStates,
  // Mutual-reach group of >= quorum correct processes.
  MutualGroup,
};

struct Options {
  RelayPolicy policy;
  Mode mode;
  SolvabilityRule rule = SolvabilityRule::DecisionStates;
  bool symmetry = true;
  // Maximum number of predicate evaluations a single call may perform.
  std::uint64_t budget = 2'000'000'000ULL;
  // 0 = hardware concurrency.
  unsigned threads = 0;
};

struct ToleranceRecord {
  int n = 0;
  int faulty_processes = 0;
  int faulty_links = 0;
  std::uint64_t total = 0;
  std::uint64_t solvable = 0;
  Region region = Region::Ensured;

  double probability() const {
    return total == 0 ? 0.0 : static_cast<double>(solvable) / total;
  }
  friend bool operator==(const ToleranceRecord&,
                         const ToleranceRecord&) = default;
};

struct ToleranceCurve {
  int n = 0;
  std::vector<int> max_links;  // index F; -1 when even f=0 fails
};

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(std::uint64_t estimate, std::uint64_t budget);
  // Predicate evaluations the refused call would have needed (saturating).
  std::uint64_t estimate() const { return estimate_; }

 private:
  std::uint64_t estimate_;
};

// Exact C(n, k); throws std::overflow_error past 64 bits.
std::uint64_t binomial(int n, int k);
// C(n, k) as a double, for estimates that may not fit.
double binomial_approx(int n, int k);

// The verdict for one induced matrix.
bool solvable(const LinkMatrix& c, const CorrectSet& correct,
              const Options& opts);

// Counts every (F faulty processes) x (f faulty links) permutation.
ToleranceRecord enumerate(int n, int faulty_processes, int faulty_links,
                          const Options& opts);

// True iff some permutation at (F, f) is not solvable; stops at the first.
bool has_failure(int n, int faulty_processes, int faulty_links,
                 const Options& opts);

// Evaluations enumerate() would perform with these options.
std::uint64_t enumerate_cost(int n, int faulty_processes, int faulty_links,
                             const Options& opts);

// Largest f with probability 1, or -1.
int ensured_boundary(int n, int faulty_processes, const Options& opts);
// Consensus options are overridden with Delivery(group_size), F = 0.
int delivery_tolerance(int n, int group_size, const Options& opts);

ToleranceCurve curve(int n, const Options& opts);

// One record per f in [0, n(n-1)].
std::vector<ToleranceRecord> sweep(int n, int faulty_processes,
                                   const Options& opts);

std::string records_header();
std::string to_row(const ToleranceRecord& r);

struct SampleReport {
  std::uint64_t samples = 0;
  std::uint64_t counterexamples = 0;
  // Faulty processes and links of the first counterexample.
  std::optional<std::pair<ProcessMask, std::vector<std::pair<int, int>>>> first;
};

// Uniformly sampled permutations at (F, f), checked with solvable().
SampleReport sample(int n, int faulty_processes, int faulty_links,
                    std::uint64_t samples, std::uint64_t seed,
                    const Options& opts);

}  // namespace hopcast::tolerance

#endif  // HOPCAST_TOLERANCE_HPP_
