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

#ifndef HOPCAST_PROTOCOL_HPP_
#define HOPCAST_PROTOCOL_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "hopcast/crypto.hpp"
#include "hopcast/encoding.hpp"
#include "hopcast/topology.hpp"

namespace hopcast::protocol {

using Ticks = std::int64_t;

enum class MsgType : std::uint8_t {
  MSGPHASE1 = 1,
  RTRNSMTD1 = 2,
  MSGPHASE2 = 3,
  RTRNSMTD2 = 4,
};

int phase_of(MsgType t);
bool is_relay(MsgType t);
const char* to_string(MsgType t);

// (T, Is, Id, Io, m, Do)
struct Envelope {
  MsgType msg_type = MsgType::MSGPHASE1;
  ProcessId source;
  ProcessId destination;
  ProcessId originator;
  Bytes payload;
  crypto::Signature originator_sig;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

Bytes encode(const Envelope& e);
Envelope decode_envelope(std::span<const std::uint8_t> bytes);

struct PhaseOnePayload {
  Bytes value;
  crypto::Signature sig;  // over hash(value)

  friend bool operator==(const PhaseOnePayload&,
                         const PhaseOnePayload&) = default;
};

Bytes encode(const PhaseOnePayload& p);
PhaseOnePayload decode_phase_one(std::span<const std::uint8_t> bytes);

// Two differently-signed digests from the same process.
struct ConflictProof {
  ProcessId id;
  crypto::ExtendedSignature first;
  crypto::ExtendedSignature second;

  friend bool operator==(const ConflictProof&, const ConflictProof&) = default;
};

struct PhaseTwoPayload {
  std::vector<std::optional<crypto::ExtendedSignature>> entries;  // size n
  std::vector<ConflictProof> evidence;
  crypto::Signature sig;  // over hash(signed_bytes())

  Bytes signed_bytes() const;

  friend bool operator==(const PhaseTwoPayload&,
                         const PhaseTwoPayload&) = default;
};

Bytes encode(const PhaseTwoPayload& p);
PhaseTwoPayload decode_phase_two(std::span<const std::uint8_t> bytes, int n);

enum class TimeoutEvent { START1 = 1, START2 = 2 };

struct Decision {
  crypto::Digest value;
  std::vector<ProcessId> contributors;  // ascending

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct ProcessState {
  ProcessId id;
  int n = 0;
  Bytes input;
  std::vector<std::optional<Bytes>> output;  // R^Out
  std::vector<std::optional<crypto::ExtendedSignature>> ext_sigs;  // E
  std::vector<std::optional<PhaseTwoPayload>> received_p2;
  // (originator, phase) -> digest of the first accepted payload
  std::map<std::pair<int, int>, crypto::Digest> dedup;
  std::set<ProcessId> byzantine_flags;
  std::map<int, ConflictProof> evidence;
  std::optional<PhaseTwoPayload> snapshot;  // what START2 broadcast
  std::set<ProcessId> flagged_after_snapshot;
  std::optional<Decision> decided;
  Ticks local_clock = 0;
  int envelopes_emitted = 0;
};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One consensus round at one process.
class Process {
 public:
  Process(crypto::KeyRing keys, Bytes input);

  std::vector<Envelope> on_timeout(TimeoutEvent event, Ticks now = 0);
  std::vector<Envelope> on_received(const Envelope& env, Ticks now);
  // Round close (local 4 RTTB). Once set, the decision never changes.
  std::optional<Decision> try_decide(Ticks now = 0);

  const ProcessState& state() const { return state_; }
  const crypto::KeyRing& keys() const { return keys_; }
  int quorum() const { return consensus_quorum(state_.n); }

 private:
  void on_phase_one(const Envelope& env, const PhaseOnePayload& p);
  void on_phase_two(const Envelope& env, const PhaseTwoPayload& p);
  void flag(const ConflictProof& proof);
  bool accept_conflict(ProcessId id, const crypto::ExtendedSignature& other);
  std::optional<PhaseOnePayload> check_phase_one(const Envelope& env) const;
  std::optional<PhaseTwoPayload> check_phase_two(const Envelope& env) const;
  std::vector<Envelope> broadcast(MsgType type, const Bytes& payload);
  std::vector<Envelope> relay(const Envelope& env);

  crypto::KeyRing keys_;
  ProcessState state_;
};

}  // namespace hopcast::protocol

#endif  // HOPCAST_PROTOCOL_HPP_
