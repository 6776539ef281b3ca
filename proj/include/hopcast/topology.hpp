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

#ifndef HOPCAST_TOPOLOGY_HPP_
#define HOPCAST_TOPOLOGY_HPP_

#include <bit>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hopcast {

// Bit i of a mask stands for process index i+1.
using ProcessMask = std::uint64_t;

inline constexpr int kMaxProcesses = 64;

// 1-based process index.
struct ProcessId {
  int index = 0;

  constexpr int bit() const { return index - 1; }
  constexpr ProcessMask mask() const { return ProcessMask{1} << bit(); }
  static constexpr ProcessId from_bit(int b) { return ProcessId{b + 1}; }

  friend constexpr auto operator<=>(ProcessId, ProcessId) = default;
};

inline constexpr ProcessMask all_processes(int n) {
  return n >= kMaxProcesses ? ~ProcessMask{0} : (ProcessMask{1} << n) - 1;
}

// Directed link states. cells[p][q] == true means p->q is correct and
// synchronous. The diagonal always reads true.
class LinkMatrix {
 public:
  // All links up.
  explicit LinkMatrix(int n);

  int n() const { return n_; }

  bool cell(ProcessId from, ProcessId to) const;
  // Writes to the diagonal are ignored.
  void set(ProcessId from, ProcessId to, bool up);

  // Off-diagonal out/in neighbours as masks.
  ProcessMask out_mask(ProcessId p) const { return rows_[p.bit()]; }
  ProcessMask in_mask(ProcessId q) const;
  std::span<const ProcessMask> rows() const { return rows_; }

  // "N=<n>" then n lines of '0'/'1', row = sender.
  std::string to_text() const;
  static LinkMatrix from_text(std::string_view text);

  friend bool operator==(const LinkMatrix&, const LinkMatrix&) = default;

 private:
  void check(ProcessId p) const;

  int n_;
  std::vector<ProcessMask> rows_;  // diagonal bit kept clear
};

enum class RelayVariant { Strict, Relaxed };

struct RelayPolicy {
  RelayVariant variant = RelayVariant::Strict;
  int max_hops = 3;

  friend bool operator==(const RelayPolicy&, const RelayPolicy&) = default;
};

// Correct (non-faulty) processes; relays are drawn from this set only.
class CorrectSet {
 public:
  CorrectSet() = default;
  explicit CorrectSet(ProcessMask members) : members_(members) {}
  static CorrectSet all(int n) { return CorrectSet(all_processes(n)); }

  bool contains(ProcessId p) const { return (members_ & p.mask()) != 0; }
  void insert(ProcessId p) { members_ |= p.mask(); }
  void erase(ProcessId p) { members_ &= ~p.mask(); }
  int size() const { return std::popcount(members_); }
  ProcessMask mask() const { return members_; }

  friend bool operator==(const CorrectSet&, const CorrectSet&) = default;

 private:
  ProcessMask members_ = 0;
};

bool direct_reach(const LinkMatrix& c, ProcessId p, ProcessId q);
bool two_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                   const CorrectSet& relays);
bool three_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                     const CorrectSet& relays);
// Round-trip form: p<->r, r<->u, u<->q all up, r != u relays outside {p,q}.
bool strict_three_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                            const CorrectSet& relays);
bool reach(const LinkMatrix& c, ProcessId p, ProcessId q,
           const CorrectSet& relays, const RelayPolicy& policy);

// Zeroes row i and column i (diagonal stays true).
LinkMatrix apply_faulty_process(const LinkMatrix& c, ProcessId i);

// Some G within `correct`, |G| >= quorum, with reach both ways for every pair.
bool is_agreement_subset(const LinkMatrix& c, const CorrectSet& correct,
                         int quorum, const RelayPolicy& policy);
bool is_delivery_subset(const LinkMatrix& c, const RelayPolicy& policy);

// At least `quorum` members of `correct` each hold messages from at least
// quorum-1 other members of `correct`.
bool reaches_decision_quorum(const LinkMatrix& c, const CorrectSet& correct,
                             int quorum, const RelayPolicy& policy);
// Processes of `correct` that would hold >= quorum-1 foreign messages.
ProcessMask decision_states(const LinkMatrix& c, const CorrectSet& correct,
                            int quorum, const RelayPolicy& policy);

inline int max_faulty(int n) { return (n - 1) / 2; }
// Strict majority; equals F_max+1 for odd n.
inline int consensus_quorum(int n) { return n - max_faulty(n); }

namespace kernel {

// rows[p] = off-diagonal out mask of process bit p. Writes into from[p] the
// set of processes reachable from p (p itself excluded), for every p.
inline void reach_from(std::span<const ProcessMask> rows, int n,
                       ProcessMask relays, const RelayPolicy& policy,
                       std::span<ProcessMask> from) {
  ProcessMask sym[kMaxProcesses];
  const bool strict = policy.variant == RelayVariant::Strict;
  if (strict && policy.max_hops >= 3) {
    ProcessMask in[kMaxProcesses] = {};
    for (int p = 0; p < n; ++p) {
      for (ProcessMask m = rows[p]; m; m &= m - 1) {
        in[std::countr_zero(m)] |= ProcessMask{1} << p;
      }
    }
    for (int p = 0; p < n; ++p) sym[p] = rows[p] & in[p];
  }
  for (int p = 0; p < n; ++p) {
    ProcessMask r1 = rows[p];
    ProcessMask acc = r1;
    if (policy.max_hops >= 2) {
      ProcessMask r2 = 0;
      for (ProcessMask m = r1 & relays; m; m &= m - 1) {
        r2 |= rows[std::countr_zero(m)];
      }
      acc |= r2;
      if (policy.max_hops >= 3) {
        if (strict) {
          for (ProcessMask m = sym[p] & relays; m; m &= m - 1) {
            const int r = std::countr_zero(m);
            for (ProcessMask k = sym[r] & relays; k; k &= k - 1) {
              acc |= sym[std::countr_zero(k)];
            }
          }
        } else {
          for (ProcessMask m = r2 & relays; m; m &= m - 1) {
            acc |= rows[std::countr_zero(m)];
          }
        }
      }
    }
    from[p] = acc & ~(ProcessMask{1} << p);
  }
}

// Members of `correct` receiving from >= quorum-1 other members.
inline ProcessMask deciders(std::span<const ProcessMask> from, int n,
                            ProcessMask correct, int quorum) {
  int count[kMaxProcesses] = {};
  for (ProcessMask m = correct; m; m &= m - 1) {
    const int p = std::countr_zero(m);
    for (ProcessMask k = from[p] & correct; k; k &= k - 1) {
      ++count[std::countr_zero(k)];
    }
  }
  ProcessMask out = 0;
  for (int q = 0; q < n; ++q) {
    if ((correct >> q & 1) && count[q] >= quorum - 1) {
      out |= ProcessMask{1} << q;
    }
  }
  return out;
}

// Clique of size >= quorum in the mutual-reach graph restricted to `correct`.
bool has_mutual_group(std::span<const ProcessMask> from, int n,
                      ProcessMask correct, int quorum);

}  // namespace kernel

}  // namespace hopcast

#endif  // HOPCAST_TOPOLOGY_HPP_
