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

#include "hopcast/topology.hpp"

#include <sstream>
#include <stdexcept>

namespace hopcast {

LinkMatrix::LinkMatrix(int n) : n_(n) {
  if (n < 3 || n > kMaxProcesses) {
    throw std::invalid_argument("LinkMatrix: n must be in [3, 64]");
  }
  rows_.resize(n);
  const ProcessMask all = all_processes(n);
  for (int p = 0; p < n; ++p) rows_[p] = all & ~(ProcessMask{1} << p);
}

void LinkMatrix::check(ProcessId p) const {
  if (p.index < 1 || p.index > n_) {
    throw std::out_of_range("process index " + std::to_string(p.index) +
                            " outside [1, " + std::to_string(n_) + "]");
  }
}

bool LinkMatrix::cell(ProcessId from, ProcessId to) const {
  check(from);
  check(to);
  if (from == to) return true;
  return (rows_[from.bit()] & to.mask()) != 0;
}

void LinkMatrix::set(ProcessId from, ProcessId to, bool up) {
  check(from);
  check(to);
  if (from == to) return;
  if (up) {
    rows_[from.bit()] |= to.mask();
  } else {
    rows_[from.bit()] &= ~to.mask();
  }
}

ProcessMask LinkMatrix::in_mask(ProcessId q) const {
  check(q);
  ProcessMask m = 0;
  for (int p = 0; p < n_; ++p) {
    if (rows_[p] & q.mask()) m |= ProcessMask{1} << p;
  }
  return m;
}

std::string LinkMatrix::to_text() const {
  std::string out = "N=" + std::to_string(n_) + "\n";
  for (int p = 0; p < n_; ++p) {
    for (int q = 0; q < n_; ++q) {
      out += (p == q || (rows_[p] >> q & 1)) ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

LinkMatrix LinkMatrix::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("N=", 0) != 0) {
    throw std::invalid_argument("link matrix: missing N= header");
  }
  int n = 0;
  try {
    n = std::stoi(line.substr(2));
  } catch (const std::exception&) {
    throw std::invalid_argument("link matrix: bad N= header");
  }
  LinkMatrix c(n);
  for (int p = 0; p < n; ++p) {
    if (!std::getline(in, line) || static_cast<int>(line.size()) != n) {
      throw std::invalid_argument("link matrix: row " + std::to_string(p + 1) +
                                  " malformed");
    }
    for (int q = 0; q < n; ++q) {
      const char ch = line[q];
      if (ch != '0' && ch != '1') {
        throw std::invalid_argument("link matrix: expected 0/1");
      }
      if (p == q) {
        if (ch != '1') throw std::invalid_argument("link matrix: diagonal 0");
        continue;
      }
      c.set(ProcessId{p + 1}, ProcessId{q + 1}, ch == '1');
    }
  }
  while (std::getline(in, line)) {
    if (!line.empty()) throw std::invalid_argument("link matrix: trailing data");
  }
  return c;
}

namespace {

void require_distinct(const LinkMatrix& c, ProcessId p, ProcessId q) {
  if (p == q) throw std::invalid_argument("reach query needs p != q");
  c.cell(p, q);  // range check
}

bool in(ProcessMask m, int bit) { return (m >> bit & 1) != 0; }

}  // namespace

bool direct_reach(const LinkMatrix& c, ProcessId p, ProcessId q) {
  require_distinct(c, p, q);
  return c.cell(p, q);
}

bool two_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                   const CorrectSet& relays) {
  require_distinct(c, p, q);
  for (int r = 0; r < c.n(); ++r) {
    if (r == p.bit() || r == q.bit() || !in(relays.mask(), r)) continue;
    if (in(c.rows()[p.bit()], r) && in(c.rows()[r], q.bit())) return true;
  }
  return false;
}

bool three_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                     const CorrectSet& relays) {
  require_distinct(c, p, q);
  const auto rows = c.rows();
  for (int r = 0; r < c.n(); ++r) {
    if (r == p.bit() || r == q.bit() || !in(relays.mask(), r)) continue;
    if (!in(rows[p.bit()], r)) continue;
    for (int s = 0; s < c.n(); ++s) {
      if (s == r || s == p.bit() || s == q.bit() || !in(relays.mask(), s)) {
        continue;
      }
      if (in(rows[r], s) && in(rows[s], q.bit())) return true;
    }
  }
  return false;
}

bool strict_three_hop_reach(const LinkMatrix& c, ProcessId p, ProcessId q,
                            const CorrectSet& relays) {
  require_distinct(c, p, q);
  const auto rows = c.rows();
  auto both = [&](int a, int b) { return in(rows[a], b) && in(rows[b], a); };
  for (int r = 0; r < c.n(); ++r) {
    if (r == p.bit() || r == q.bit() || !in(relays.mask(), r)) continue;
    if (!both(p.bit(), r)) continue;
    for (int u = 0; u < c.n(); ++u) {
      if (u == r || u == p.bit() || u == q.bit() || !in(relays.mask(), u)) {
        continue;
      }
      if (both(r, u) && both(u, q.bit())) return true;
    }
  }
  return false;
}

bool reach(const LinkMatrix& c, ProcessId p, ProcessId q,
           const CorrectSet& relays, const RelayPolicy& policy) {
  if (policy.max_hops < 1 || policy.max_hops > 3) {
    throw std::invalid_argument("max_hops must be 1, 2 or 3");
  }
  if (direct_reach(c, p, q)) return true;
  if (policy.max_hops >= 2 && two_hop_reach(c, p, q, relays)) return true;
  if (policy.max_hops >= 3) {
    return policy.variant == RelayVariant::Strict
               ? strict_three_hop_reach(c, p, q, relays)
               : three_hop_reach(c, p, q, relays);
  }
  return false;
}

LinkMatrix apply_faulty_process(const LinkMatrix& c, ProcessId i) {
  LinkMatrix out = c;
  for (int k = 1; k <= c.n(); ++k) {
    out.set(i, ProcessId{k}, false);
    out.set(ProcessId{k}, i, false);
  }
  return out;
}

namespace kernel {

namespace {

bool extend_clique(const ProcessMask* adj, ProcessMask clique,
                   ProcessMask candidates, int need) {
  if (need <= 0) return true;
  if (std::popcount(candidates) < need) return false;
  while (candidates) {
    const int v = std::countr_zero(candidates);
    candidates &= candidates - 1;
    if (extend_clique(adj, clique | (ProcessMask{1} << v), candidates & adj[v],
                      need - 1)) {
      return true;
    }
    if (std::popcount(candidates) < need) return false;
  }
  return false;
}

}  // namespace

bool has_mutual_group(std::span<const ProcessMask> from, int n,
                      ProcessMask correct, int quorum) {
  if (quorum <= 0) return true;
  ProcessMask adj[kMaxProcesses] = {};
  for (int p = 0; p < n; ++p) {
    if (!(correct >> p & 1)) continue;
    for (ProcessMask m = from[p] & correct; m; m &= m - 1) {
      const int q = std::countr_zero(m);
      if (from[q] >> p & 1) adj[p] |= ProcessMask{1} << q;
    }
  }
  return extend_clique(adj, 0, correct, quorum);
}

}  // namespace kernel

namespace {

void check_policy(const RelayPolicy& policy) {
  if (policy.max_hops < 1 || policy.max_hops > 3) {
    throw std::invalid_argument("max_hops must be 1, 2 or 3");
  }
}

std::vector<ProcessMask> reach_table(const LinkMatrix& c,
                                     const CorrectSet& relays,
                                     const RelayPolicy& policy) {
  check_policy(policy);
  std::vector<ProcessMask> from(c.n());
  kernel::reach_from(c.rows(), c.n(), relays.mask(), policy, from);
  return from;
}

}  // namespace

bool is_agreement_subset(const LinkMatrix& c, const CorrectSet& correct,
                         int quorum, const RelayPolicy& policy) {
  if (quorum < 1) throw std::invalid_argument("quorum must be >= 1");
  const ProcessMask members = correct.mask() & all_processes(c.n());
  if (std::popcount(members) < quorum) return false;
  const auto from = reach_table(c, correct, policy);
  return kernel::has_mutual_group(from, c.n(), members, quorum);
}

bool is_delivery_subset(const LinkMatrix& c, const RelayPolicy& policy) {
  return is_agreement_subset(c, CorrectSet::all(c.n()), c.n(), policy);
}

ProcessMask decision_states(const LinkMatrix& c, const CorrectSet& correct,
                            int quorum, const RelayPolicy& policy) {
  if (quorum < 1) throw std::invalid_argument("quorum must be >= 1");
  const ProcessMask members = correct.mask() & all_processes(c.n());
  const auto from = reach_table(c, correct, policy);
  return kernel::deciders(from, c.n(), members, quorum);
}

bool reaches_decision_quorum(const LinkMatrix& c, const CorrectSet& correct,
                             int quorum, const RelayPolicy& policy) {
  return std::popcount(decision_states(c, correct, quorum, policy)) >= quorum;
}

}  // namespace hopcast
