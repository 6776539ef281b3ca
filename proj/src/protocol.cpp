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

#include "hopcast/protocol.hpp"

#include <algorithm>

namespace hopcast::protocol {

int phase_of(MsgType t) {
  switch (t) {
    case MsgType::MSGPHASE1:
    case MsgType::RTRNSMTD1:
      return 1;
    case MsgType::MSGPHASE2:
    case MsgType::RTRNSMTD2:
      return 2;
  }
  throw ProtocolError("unknown msg_type");
}

bool is_relay(MsgType t) {
  return t == MsgType::RTRNSMTD1 || t == MsgType::RTRNSMTD2;
}

const char* to_string(MsgType t) {
  switch (t) {
    case MsgType::MSGPHASE1: return "MSGPHASE1";
    case MsgType::RTRNSMTD1: return "RTRNSMTD1";
    case MsgType::MSGPHASE2: return "MSGPHASE2";
    case MsgType::RTRNSMTD2: return "RTRNSMTD2";
  }
  return "?";
}

namespace {

void put_sig(Writer& w, const crypto::Signature& s) {
  Writer inner;
  inner.u32(static_cast<std::uint32_t>(s.signer.index));
  inner.raw(s.bytes);
  w.field(inner.bytes());
}

crypto::Signature get_sig(Reader& r) {
  Reader inner(r.field());
  crypto::Signature s;
  s.signer = ProcessId{static_cast<int>(inner.u32())};
  auto body = inner.rest();
  s.bytes.assign(body.begin(), body.end());
  return s;
}

Bytes ext_bytes(const crypto::ExtendedSignature& e) {
  Writer w;
  w.field(e.h.bytes);
  put_sig(w, e.s);
  return std::move(w).bytes();
}

crypto::ExtendedSignature get_ext(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  crypto::ExtendedSignature e;
  auto h = r.field();
  if (h.size() != crypto::kDigestSize) throw DecodeError("digest length");
  std::copy(h.begin(), h.end(), e.h.bytes.begin());
  e.s = get_sig(r);
  r.expect_done();
  return e;
}

MsgType to_msg_type(std::uint32_t v) {
  if (v < 1 || v > 4) throw DecodeError("unknown msg_type");
  return static_cast<MsgType>(v);
}

}  // namespace

Bytes encode(const Envelope& e) {
  Writer w;
  w.field_u32(static_cast<std::uint32_t>(e.msg_type));
  w.field_u32(static_cast<std::uint32_t>(e.source.index));
  w.field_u32(static_cast<std::uint32_t>(e.destination.index));
  w.field_u32(static_cast<std::uint32_t>(e.originator.index));
  w.field(e.payload);
  put_sig(w, e.originator_sig);
  return std::move(w).bytes();
}

Envelope decode_envelope(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  Envelope e;
  e.msg_type = to_msg_type(r.field_u32());
  e.source = ProcessId{static_cast<int>(r.field_u32())};
  e.destination = ProcessId{static_cast<int>(r.field_u32())};
  e.originator = ProcessId{static_cast<int>(r.field_u32())};
  auto payload = r.field();
  e.payload.assign(payload.begin(), payload.end());
  e.originator_sig = get_sig(r);
  r.expect_done();
  return e;
}

Bytes encode(const PhaseOnePayload& p) {
  Writer w;
  w.field(p.value);
  put_sig(w, p.sig);
  return std::move(w).bytes();
}

PhaseOnePayload decode_phase_one(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  PhaseOnePayload p;
  auto v = r.field();
  p.value.assign(v.begin(), v.end());
  p.sig = get_sig(r);
  r.expect_done();
  return p;
}

Bytes PhaseTwoPayload::signed_bytes() const {
  Writer w;
  w.u32(static_cast<std::uint32_t>(entries.size()));
  for (const auto& e : entries) {
    if (e) {
      w.field(ext_bytes(*e));
    } else {
      w.field({});
    }
  }
  w.u32(static_cast<std::uint32_t>(evidence.size()));
  for (const auto& c : evidence) {
    w.field_u32(static_cast<std::uint32_t>(c.id.index));
    w.field(ext_bytes(c.first));
    w.field(ext_bytes(c.second));
  }
  return std::move(w).bytes();
}

Bytes encode(const PhaseTwoPayload& p) {
  Writer w;
  w.raw(p.signed_bytes());
  put_sig(w, p.sig);
  return std::move(w).bytes();
}

PhaseTwoPayload decode_phase_two(std::span<const std::uint8_t> bytes, int n) {
  Reader r(bytes);
  PhaseTwoPayload p;
  const std::uint32_t count = r.u32();
  if (static_cast<int>(count) != n) throw DecodeError("vector size != n");
  p.entries.resize(count);
  for (auto& slot : p.entries) {
    auto f = r.field();
    if (!f.empty()) slot = get_ext(f);
  }
  const std::uint32_t proofs = r.u32();
  if (proofs > count) throw DecodeError("too many conflict proofs");
  for (std::uint32_t i = 0; i < proofs; ++i) {
    ConflictProof c;
    c.id = ProcessId{static_cast<int>(r.field_u32())};
    c.first = get_ext(r.field());
    c.second = get_ext(r.field());
    p.evidence.push_back(std::move(c));
  }
  p.sig = get_sig(r);
  r.expect_done();
  return p;
}

Process::Process(crypto::KeyRing keys, Bytes input) : keys_(std::move(keys)) {
  state_.id = keys_.self();
  state_.n = keys_.n();
  state_.input = std::move(input);
  state_.output.resize(state_.n);
  state_.ext_sigs.resize(state_.n);
  state_.received_p2.resize(state_.n);
}

std::vector<Envelope> Process::broadcast(MsgType type, const Bytes& payload) {
  const auto sig = keys_.sign(keys_.hash(payload));
  std::vector<Envelope> out;
  out.reserve(state_.n - 1);
  for (int q = 1; q <= state_.n; ++q) {
    if (q == state_.id.index) continue;
    out.push_back(Envelope{type, state_.id, ProcessId{q}, state_.id, payload,
                           sig});
  }
  state_.envelopes_emitted += static_cast<int>(out.size());
  return out;
}

std::vector<Envelope> Process::relay(const Envelope& env) {
  const MsgType type =
      phase_of(env.msg_type) == 1 ? MsgType::RTRNSMTD1 : MsgType::RTRNSMTD2;
  std::vector<Envelope> out;
  out.reserve(state_.n - 2);
  for (int q = 1; q <= state_.n; ++q) {
    if (q == state_.id.index || q == env.originator.index) continue;
    out.push_back(Envelope{type, state_.id, ProcessId{q}, env.originator,
                           env.payload, env.originator_sig});
  }
  state_.envelopes_emitted += static_cast<int>(out.size());
  return out;
}

std::vector<Envelope> Process::on_timeout(TimeoutEvent event, Ticks now) {
  state_.local_clock = now;
  const int self = state_.id.bit();
  switch (event) {
    case TimeoutEvent::START1: {
      if (state_.ext_sigs[self]) throw ProtocolError("START1 fired twice");
      const auto h = keys_.hash(state_.input);
      PhaseOnePayload p{state_.input, keys_.sign(h)};
      state_.ext_sigs[self] = crypto::ExtendedSignature{h, p.sig};
      state_.output[self] = state_.input;
      return broadcast(MsgType::MSGPHASE1, encode(p));
    }
    case TimeoutEvent::START2: {
      if (!state_.ext_sigs[self]) throw ProtocolError("START2 before START1");
      if (state_.snapshot) throw ProtocolError("START2 fired twice");
      PhaseTwoPayload p;
      p.entries.resize(state_.n);
      for (int j = 0; j < state_.n; ++j) {
        if (state_.output[j]) p.entries[j] = state_.ext_sigs[j];
      }
      for (const auto& [id, proof] : state_.evidence) p.evidence.push_back(proof);
      p.sig = keys_.sign(keys_.hash(p.signed_bytes()));
      state_.snapshot = p;
      return broadcast(MsgType::MSGPHASE2, encode(p));
    }
  }
  throw ProtocolError("unknown timeout event");
}

std::optional<PhaseOnePayload> Process::check_phase_one(
    const Envelope& env) const {
  try {
    auto p = decode_phase_one(env.payload);
    if (p.sig.signer != env.originator) return std::nullopt;
    if (!keys_.verify(keys_.hash(p.value), p.sig)) return std::nullopt;
    return p;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

std::optional<PhaseTwoPayload> Process::check_phase_two(
    const Envelope& env) const {
  try {
    auto p = decode_phase_two(env.payload, state_.n);
    if (p.sig.signer != env.originator) return std::nullopt;
    if (!keys_.verify(keys_.hash(p.signed_bytes()), p.sig)) return std::nullopt;
    return p;
  } catch (const DecodeError&) {
    return std::nullopt;
  }
}

void Process::flag(const ConflictProof& proof) {
  if (!state_.byzantine_flags.insert(proof.id).second) return;
  state_.evidence.emplace(proof.id.index, proof);
  state_.output[proof.id.bit()].reset();
  if (state_.snapshot) state_.flagged_after_snapshot.insert(proof.id);
}

bool Process::accept_conflict(ProcessId id,
                              const crypto::ExtendedSignature& other) {
  const auto& held = state_.ext_sigs[id.bit()];
  if (held && held->h != other.h) {
    flag(ConflictProof{id, *held, other});
    return true;
  }
  return false;
}

void Process::on_phase_one(const Envelope& env, const PhaseOnePayload& p) {
  const ProcessId o = env.originator;
  const crypto::ExtendedSignature e{keys_.hash(p.value), p.sig};
  if (state_.byzantine_flags.count(o)) return;
  if (accept_conflict(o, e)) return;
  if (!state_.ext_sigs[o.bit()]) state_.ext_sigs[o.bit()] = e;
  if (!state_.output[o.bit()]) state_.output[o.bit()] = p.value;
}

void Process::on_phase_two(const Envelope& env, const PhaseTwoPayload& p) {
  for (int j = 0; j < state_.n; ++j) {
    const auto& entry = p.entries[j];
    if (!entry) continue;
    const ProcessId pj = ProcessId::from_bit(j);
    if (state_.ext_sigs[j] == entry) continue;  // already verified
    if (entry->s.signer != pj || !keys_.verify(*entry)) continue;
    if (accept_conflict(pj, *entry)) continue;
    if (!state_.ext_sigs[j]) state_.ext_sigs[j] = *entry;
  }
  for (const auto& c : p.evidence) {
    if (c.id.index < 1 || c.id.index > state_.n) continue;
    if (c.first.s.signer != c.id || c.second.s.signer != c.id) continue;
    if (c.first.h == c.second.h) continue;
    if (!keys_.verify(c.first) || !keys_.verify(c.second)) continue;
    flag(c);
  }
  state_.received_p2[env.originator.bit()] = p;
}

std::vector<Envelope> Process::on_received(const Envelope& env, Ticks now) {
  if (env.destination != state_.id) {
    throw ProtocolError("envelope addressed to another process");
  }
  const int phase = phase_of(env.msg_type);
  state_.local_clock = now;
  const int n = state_.n;
  if (env.originator.index < 1 || env.originator.index > n ||
      env.source.index < 1 || env.source.index > n) {
    return {};
  }
  if (env.originator == state_.id) return {};
  if (is_relay(env.msg_type) == (env.originator == env.source)) return {};
  if (env.originator_sig.signer != env.originator) return {};

  const auto key = std::make_pair(env.originator.index, phase);
  const auto digest = keys_.hash(env.payload);
  const auto seen = state_.dedup.find(key);
  if (seen != state_.dedup.end() && seen->second == digest) return {};
  if (!keys_.verify(digest, env.originator_sig)) return {};

  if (phase == 1) {
    auto p = check_phase_one(env);
    if (!p) return {};
    if (seen != state_.dedup.end()) {
      // A second signed version is evidence, never relayed.
      accept_conflict(env.originator, {keys_.hash(p->value), p->sig});
      return {};
    }
    on_phase_one(env, *p);
  } else {
    auto p = check_phase_two(env);
    if (!p) return {};
    if (seen != state_.dedup.end()) {
      if (state_.byzantine_flags.insert(env.originator).second) {
        state_.output[env.originator.bit()].reset();
        if (state_.snapshot) state_.flagged_after_snapshot.insert(env.originator);
      }
      return {};
    }
    on_phase_two(env, *p);
  }
  state_.dedup.emplace(key, digest);
  return relay(env);
}

std::optional<Decision> Process::try_decide(Ticks now) {
  state_.local_clock = now;
  if (state_.decided) return state_.decided;
  using Entries = std::vector<std::optional<crypto::ExtendedSignature>>;

  // Signers (self included) per distinct unflagged Phase-Two vector.
  std::vector<std::pair<const Entries*, int>> candidates;
  auto add = [&](const Entries& v) {
    for (auto& [e, count] : candidates) {
      if (*e == v) {
        ++count;
        return;
      }
    }
    candidates.emplace_back(&v, 1);
  };
  if (state_.snapshot) add(state_.snapshot->entries);
  for (int o = 0; o < state_.n; ++o) {
    if (o == state_.id.bit()) continue;
    if (state_.byzantine_flags.count(ProcessId::from_bit(o))) continue;
    if (state_.received_p2[o]) add(state_.received_p2[o]->entries);
  }

  for (const auto& [entries, support] : candidates) {
    if (support < quorum()) continue;
    std::vector<ProcessId> contributors;
    bool clean = true;
    for (int j = 0; j < state_.n; ++j) {
      if (!(*entries)[j]) continue;
      const ProcessId pj = ProcessId::from_bit(j);
      if (state_.byzantine_flags.count(pj)) clean = false;
      contributors.push_back(pj);
    }
    if (!clean) return std::nullopt;
    if (static_cast<int>(contributors.size()) < max_faulty(state_.n) + 1) {
      return std::nullopt;
    }
    Writer w;
    w.u32(static_cast<std::uint32_t>(contributors.size()));
    for (ProcessId c : contributors) {
      w.field_u32(static_cast<std::uint32_t>(c.index));
      w.field((*entries)[c.bit()]->h.bytes);
    }
    state_.decided = Decision{keys_.hash(w.bytes()), std::move(contributors)};
    return state_.decided;
  }
  return std::nullopt;
}

}  // namespace hopcast::protocol
