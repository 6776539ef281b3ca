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

#ifndef HOPCAST_SIMNET_HPP_
#define HOPCAST_SIMNET_HPP_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "hopcast/protocol.hpp"
#include "hopcast/topology.hpp"

namespace hopcast::simnet {

using protocol::Ticks;

inline constexpr std::string_view kArtifactVersion = "hopcast-1";

struct TimingConfig {
  Ticks mdtb_ticks = 10;
  Ticks max_start_lag_ticks = 9;
  // Overrides the drawn start lag of a process (1-based index).
  std::map<int, Ticks> forced_lags;
  // Every synchronous hop takes exactly mdtb_ticks.
  bool force_max_delay = false;

  Ticks rttb_ticks() const { return 2 * mdtb_ticks; }
  // Smallest synchronous hop delay; keeps k-hop copies ahead of (k+1)-hop.
  Ticks min_delay_ticks() const { return 2 * mdtb_ticks / 3 + 1; }
  void validate() const;

  friend bool operator==(const TimingConfig&, const TimingConfig&) = default;
};

// Local time since phase start after which a copy with the given hop count
// is no longer accepted.
Ticks hop_cutoff(int hops, const TimingConfig& timing);

enum class StrategyKind { Crash, Omit, Delay, Equivocate };

struct Strategy {
  StrategyKind kind = StrategyKind::Crash;
  ProcessMask targets = 0;  // Omit/Delay/Equivocate
  Ticks delay_ticks = 0;    // Delay
  Bytes alternate;          // Equivocate: value sent to targets

  static Strategy crash() { return {}; }
  static Strategy omit(ProcessMask targets) {
    return {StrategyKind::Omit, targets, 0, {}};
  }
  static Strategy delay(Ticks ticks, ProcessMask targets) {
    return {StrategyKind::Delay, targets, ticks, {}};
  }
  static Strategy equivocate(Bytes alternate, ProcessMask targets) {
    return {StrategyKind::Equivocate, targets, 0, std::move(alternate)};
  }

  friend bool operator==(const Strategy&, const Strategy&) = default;
};

struct DirectedLink {
  ProcessId from;
  ProcessId to;
  friend auto operator<=>(const DirectedLink&, const DirectedLink&) = default;
};

struct FaultScenario {
  int n = 0;
  std::set<ProcessId> faulty_processes;
  std::set<DirectedLink> faulty_links;
  // Faulty processes without an entry crash.
  std::map<ProcessId, Strategy> strategies;
  // Optional per-process inputs; default "value-<i>".
  std::map<ProcessId, Bytes> inputs;

  void validate() const;
  Strategy strategy_of(ProcessId p) const;
  Bytes input_of(ProcessId p) const;
  CorrectSet correct() const;
  // Faulty processes zeroed, faulty links zeroed: the enumerator's view.
  LinkMatrix induced_matrix() const;

  friend bool operator==(const FaultScenario&, const FaultScenario&) = default;
};

struct ProcessOutcome {
  ProcessId id;
  bool faulty = false;
  Ticks start_lag = 0;
  std::optional<protocol::Decision> decision;
  Ticks decision_local_time = 0;
  std::vector<ProcessId> flags;  // processes this one flagged

  bool decided() const { return decision.has_value(); }
  friend bool operator==(const ProcessOutcome&, const ProcessOutcome&) = default;
};

// First accepted copy of (originator, phase) at a correct receiver.
struct Receipt {
  ProcessId receiver;
  ProcessId originator;
  int phase = 1;
  int hops = 1;
  Ticks local_time = 0;
  friend bool operator==(const Receipt&, const Receipt&) = default;
};

struct Totals {
  std::int64_t sent = 0;       // put on the wire
  std::int64_t delivered = 0;  // handed to a correct process
  std::int64_t dropped = 0;    // lost on a faulty link
  std::int64_t late = 0;       // asynchronous link, arrived past the round
  std::int64_t expired = 0;    // synchronous but outside window/hop limit
  std::int64_t absorbed = 0;   // addressed to a faulty process
  friend bool operator==(const Totals&, const Totals&) = default;
};

struct RoundReport {
  int n = 0;
  std::vector<ProcessOutcome> processes;  // index i = process i+1
  std::vector<Receipt> receipts;
  Totals totals;

  const ProcessOutcome& at(ProcessId p) const { return processes[p.bit()]; }
  // No two decided correct processes hold different values.
  bool agreement() const;
  int decided_count() const;
  // q holds p's Phase-One value, for correct p, q.
  bool received_phase_one(ProcessId receiver, ProcessId originator) const;

  friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

RoundReport run_round(const FaultScenario& scenario, const TimingConfig& timing,
                      const RelayPolicy& policy, std::uint64_t seed);

struct Figure1 {
  FaultScenario scenario;
  TimingConfig timing;
};

// P=1, P'=2, P''=3, Q=4, Q'=5, Q''=6; P and Q talk only over 3-hop chains.
Figure1 worst_case_figure1(int n);

// Random crash-only scenario with f faulty links and F faulty processes.
FaultScenario random_scenario(int n, int faulty_processes, int faulty_links,
                              std::uint64_t seed);

struct RunInputs {
  std::string version{kArtifactVersion};
  FaultScenario scenario;
  TimingConfig timing;
  RelayPolicy policy;
  std::uint64_t seed = 0;

  friend bool operator==(const RunInputs&, const RunInputs&) = default;
};

class VersionMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RoundReport replay(const RunInputs& inputs);

std::string serialize(const FaultScenario& s);
FaultScenario parse_scenario(std::string_view text);
std::string serialize(const RunInputs& r);
RunInputs parse_run_inputs(std::string_view text);

// Line-delimited records.
std::string to_records(const RoundReport& r);
std::string summary_header();
std::string summary_row(const RoundReport& r);
// Copy with every timestamp and lag zeroed.
RoundReport without_timestamps(const RoundReport& r);

}  // namespace hopcast::simnet

#endif  // HOPCAST_SIMNET_HPP_
