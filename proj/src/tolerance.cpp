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

#include "hopcast/tolerance.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <thread>

namespace hopcast::tolerance {

const char* to_string(Region r) {
  switch (r) {
    case Region::Ensured: return "ensured";
    case Region::Probable: return "probable";
    case Region::Impossible: return "impossible";
  }
  return "?";
}

BudgetExceeded::BudgetExceeded(std::uint64_t estimate, std::uint64_t budget)
    : std::runtime_error(
          "refusing: needs " +
          (estimate == std::numeric_limits<std::uint64_t>::max()
               ? std::string("more than 1.8e19")
               : "about " + std::to_string(estimate)) +
          " evaluations, budget is " + std::to_string(budget)),
      estimate_(estimate) {}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("binomial exceeds 64 bits");
    }
  }
  return static_cast<std::uint64_t>(r);
}

double binomial_approx(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                  std::lgamma(n - k + 1.0));
}

namespace {

std::uint64_t saturate(double v) {
  return v >= 1.8e19 ? std::numeric_limits<std::uint64_t>::max()
                     : static_cast<std::uint64_t>(std::llround(v));
}

struct Setup {
  int n = 0;
  int quorum = 0;
  ProcessMask correct = 0;
};

Setup make_setup(int n, int faulty_processes, int faulty_links,
                 const Options& opts) {
  if (n < 3 || n > kMaxProcesses) {
    throw std::invalid_argument("n must be in [3, 64]");
  }
  if (faulty_links < 0 || faulty_links > n * (n - 1)) {
    throw std::invalid_argument("faulty link count outside [0, n(n-1)]");
  }
  Setup s;
  s.n = n;
  if (opts.mode.kind == Mode::Kind::Consensus) {
    if (faulty_processes < 0 || faulty_processes > max_faulty(n)) {
      throw std::invalid_argument("faulty process count outside [0, F_max]");
    }
    s.quorum = consensus_quorum(n);
  } else {
    if (faulty_processes != 0) {
      throw std::invalid_argument("delivery mode has no faulty processes");
    }
    if (opts.mode.group_size < 2 || opts.mode.group_size > n) {
      throw std::invalid_argument("group size outside [2, n]");
    }
    s.quorum = opts.mode.group_size;
  }
  if (opts.policy.max_hops < 1 || opts.policy.max_hops > 3) {
    throw std::invalid_argument("max_hops must be 1, 2 or 3");
  }
  return s;
}

bool evaluate(const ProcessMask* rows, int n, ProcessMask correct, int quorum,
              const Options& opts) {
  ProcessMask from[kMaxProcesses];
  kernel::reach_from({rows, static_cast<std::size_t>(n)}, n, correct,
                     opts.policy, {from, static_cast<std::size_t>(n)});
  if (opts.rule == SolvabilityRule::MutualGroup) {
    return kernel::has_mutual_group({from, static_cast<std::size_t>(n)}, n,
                                    correct, quorum);
  }
  return std::popcount(kernel::deciders({from, static_cast<std::size_t>(n)}, n,
                                        correct, quorum)) >= quorum;
}

struct Link {
  int from;
  int to;
};

// Counts failing k-subsets of `links` (optionally only those containing
// links[0]) on top of `base` rows. Stops early when `first_only`.
class Scanner {
 public:
  Scanner(std::vector<Link> links, std::vector<ProcessMask> base, int n,
          ProcessMask correct, int quorum, const Options& opts)
      : links_(std::move(links)), base_(std::move(base)), n_(n),
        correct_(correct), quorum_(quorum), opts_(opts) {}

  std::uint64_t count_failing(int k, bool with_first, bool first_only) {
    const int m = static_cast<int>(links_.size());
    std::vector<ProcessMask> rows = base_;
    int start = 0;
    if (with_first) {
      if (k == 0 || m == 0) return 0;
      remove(rows, 0);
      --k;
      start = 1;
    }
    if (k == 0) {
      return evaluate(rows.data(), n_, correct_, quorum_, opts_) ? 0 : 1;
    }
    // Chunks = choice of the first free index.
    const int last = m - k;  // inclusive
    if (last < start) return 0;
    unsigned threads = opts_.threads ? opts_.threads
                                     : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(last - start + 1));
    std::atomic<int> next{start};
    std::atomic<bool> stop{false};
    std::vector<std::uint64_t> counts(threads, 0);
    auto work = [&](unsigned t) {
      std::vector<ProcessMask> r = rows;
      std::uint64_t failing = 0;
      for (int i; (i = next.fetch_add(1)) <= last;) {
        if (stop.load(std::memory_order_relaxed)) break;
        remove(r, i);
        dfs(r, i + 1, k - 1, failing, first_only, stop);
        restore(r, i);
      }
      counts[t] = failing;
    };
    if (threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
      for (auto& th : pool) th.join();
    }
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    return total;
  }

 private:
  void remove(std::vector<ProcessMask>& r, int i) const {
    r[links_[i].from] &= ~(ProcessMask{1} << links_[i].to);
  }
  void restore(std::vector<ProcessMask>& r, int i) const {
    r[links_[i].from] |= base_[links_[i].from] & (ProcessMask{1} << links_[i].to);
  }

  void dfs(std::vector<ProcessMask>& r, int start, int left,
           std::uint64_t& failing, bool first_only,
           std::atomic<bool>& stop) const {
    if (left == 0) {
      if (!evaluate(r.data(), n_, correct_, quorum_, opts_)) {
        ++failing;
        if (first_only) stop.store(true, std::memory_order_relaxed);
      }
      return;
    }
    const int m = static_cast<int>(links_.size());
    for (int i = start; i <= m - left; ++i) {
      if (first_only && stop.load(std::memory_order_relaxed)) return;
      remove(r, i);
      dfs(r, i + 1, left - 1, failing, first_only, stop);
      restore(r, i);
    }
  }

  std::vector<Link> links_;
  std::vector<ProcessMask> base_;
  int n_;
  ProcessMask correct_;
  int quorum_;
  const Options& opts_;
};

std::vector<ProcessMask> full_rows(int n, ProcessMask faulty) {
  std::vector<ProcessMask> rows(n);
  for (int p = 0; p < n; ++p) {
    rows[p] = (faulty >> p & 1) ? 0
                                : all_processes(n) & ~faulty & ~(ProcessMask{1} << p);
  }
  return rows;
}

// Links between correct processes; the canonical one comes first.
std::vector<Link> relevant_links(int n, ProcessMask correct) {
  std::vector<Link> out;
  for (int a = 0; a < n; ++a) {
    if (!(correct >> a & 1)) continue;
    for (int b = 0; b < n; ++b) {
      if (a != b && (correct >> b & 1)) out.push_back({a, b});
    }
  }
  return out;
}

std::vector<Link> all_links(int n) {
  std::vector<Link> out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b) out.push_back({a, b});
    }
  }
  return out;
}

// Faulty set used for the reduced computation: the highest F indices.
ProcessMask canonical_faulty(int n, int faulty_processes) {
  return all_processes(n) & ~all_processes(n - faulty_processes);
}

template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k == 0) {
    fn(ProcessMask{0});
    return;
  }
  for (ProcessMask m = (ProcessMask{1} << k) - 1; m < (ProcessMask{1} << n);) {
    fn(m);
    const ProcessMask c = m & (~m + 1);
    const ProcessMask r = m + c;
    m = (((r ^ m) >> 2) / c) | r;
  }
}

void check_budget(std::uint64_t cost, const Options& opts) {
  if (cost > opts.budget) throw BudgetExceeded(cost, opts.budget);
}

struct Reduced {
  int relevant = 0;
  int irrelevant = 0;
  int k_lo = 0;
  int k_hi = 0;
};

Reduced reduced_shape(int n, int faulty_processes, int faulty_links) {
  Reduced r;
  const int m = n - faulty_processes;
  r.relevant = m * (m - 1);
  r.irrelevant = n * (n - 1) - r.relevant;
  r.k_lo = std::max(0, faulty_links - r.irrelevant);
  r.k_hi = std::min(faulty_links, r.relevant);
  return r;
}

}  // namespace

bool solvable(const LinkMatrix& c, const CorrectSet& correct,
              const Options& opts) {
  const int n = c.n();
  int quorum = opts.mode.kind == Mode::Kind::Consensus ? consensus_quorum(n)
                                                       : opts.mode.group_size;
  std::vector<ProcessMask> rows(c.rows().begin(), c.rows().end());
  for (int p = 0; p < n; ++p) {
    if (!(correct.mask() >> p & 1)) rows[p] = 0;
    rows[p] &= correct.mask();
  }
  return evaluate(rows.data(), n, correct.mask(), quorum, opts);
}

std::uint64_t enumerate_cost(int n, int faulty_processes, int faulty_links,
                             const Options& opts) {
  make_setup(n, faulty_processes, faulty_links, opts);
  if (!opts.symmetry) {
    return saturate(binomial_approx(n, faulty_processes) *
                    binomial_approx(n * (n - 1), faulty_links));
  }
  const Reduced r = reduced_shape(n, faulty_processes, faulty_links);
  double cost = 0;
  for (int k = r.k_lo; k <= r.k_hi; ++k) {
    cost += k == 0 ? 1.0 : binomial_approx(r.relevant - 1, k - 1);
  }
  return saturate(cost);
}

ToleranceRecord enumerate(int n, int faulty_processes, int faulty_links,
                          const Options& opts) {
  const Setup s = make_setup(n, faulty_processes, faulty_links, opts);
  check_budget(enumerate_cost(n, faulty_processes, faulty_links, opts), opts);
  ToleranceRecord rec;
  rec.n = n;
  rec.faulty_processes = faulty_processes;
  rec.faulty_links = faulty_links;
  rec.total = binomial(n, faulty_processes) *
              binomial(n * (n - 1), faulty_links);
  std::uint64_t failing = 0;
  if (!opts.symmetry) {
    for_each_subset(n, faulty_processes, [&](ProcessMask faulty) {
      const ProcessMask correct = all_processes(n) & ~faulty;
      Scanner scan(all_links(n), full_rows(n, faulty), n, correct, s.quorum,
                   opts);
      failing += scan.count_failing(faulty_links, false, false);
    });
  } else {
    const ProcessMask faulty = canonical_faulty(n, faulty_processes);
    const ProcessMask correct = all_processes(n) & ~faulty;
    const Reduced r = reduced_shape(n, faulty_processes, faulty_links);
    Scanner scan(relevant_links(n, correct), full_rows(n, faulty), n, correct,
                 s.quorum, opts);
    std::uint64_t per_set = 0;
    for (int k = r.k_lo; k <= r.k_hi; ++k) {
      std::uint64_t fail_k;
      if (k == 0) {
        fail_k = scan.count_failing(0, false, false);
      } else {
        // Relabelling correct processes is transitive on their links.
        const std::uint64_t canon = scan.count_failing(k, true, false);
        const unsigned __int128 all =
            static_cast<unsigned __int128>(canon) * r.relevant;
        if (all % k != 0) throw std::logic_error("symmetry count not integral");
        fail_k = static_cast<std::uint64_t>(all / k);
      }
      per_set += fail_k * binomial(r.irrelevant, faulty_links - k);
    }
    failing = per_set * binomial(n, faulty_processes);
  }
  rec.solvable = rec.total - failing;
  rec.region = rec.solvable == rec.total ? Region::Ensured
               : rec.solvable == 0       ? Region::Impossible
                                         : Region::Probable;
  return rec;
}

bool has_failure(int n, int faulty_processes, int faulty_links,
                 const Options& opts) {
  const Setup s = make_setup(n, faulty_processes, faulty_links, opts);
  if (!opts.symmetry) {
    check_budget(enumerate_cost(n, faulty_processes, faulty_links, opts), opts);
    bool found = false;
    for_each_subset(n, faulty_processes, [&](ProcessMask faulty) {
      if (found) return;
      const ProcessMask correct = all_processes(n) & ~faulty;
      Scanner scan(all_links(n), full_rows(n, faulty), n, correct, s.quorum,
                   opts);
      found = scan.count_failing(faulty_links, false, true) > 0;
    });
    return found;
  }
  // Failure is monotone in the link set, so the largest relevant count
  // decides existence.
  const Reduced r = reduced_shape(n, faulty_processes, faulty_links);
  const int k = r.k_hi;
  check_budget(saturate(k == 0 ? 1.0 : binomial_approx(r.relevant - 1, k - 1)),
               opts);
  const ProcessMask faulty = canonical_faulty(n, faulty_processes);
  const ProcessMask correct = all_processes(n) & ~faulty;
  Scanner scan(relevant_links(n, correct), full_rows(n, faulty), n, correct,
               s.quorum, opts);
  return scan.count_failing(k, k > 0, true) > 0;
}

int ensured_boundary(int n, int faulty_processes, const Options& opts) {
  make_setup(n, faulty_processes, 0, opts);
  // Bisection over the monotone predicate "some permutation fails".
  int lo = -1;                // largest known safe f
  int hi = n * (n - 1) + 1;   // smallest known failing f (sentinel)
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (has_failure(n, faulty_processes, mid, opts)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return lo;
}

int delivery_tolerance(int n, int group_size, const Options& opts) {
  Options o = opts;
  o.mode = Mode::delivery(group_size);
  return ensured_boundary(n, 0, o);
}

ToleranceCurve curve(int n, const Options& opts) {
  ToleranceCurve c;
  c.n = n;
  for (int F = 0; F <= max_faulty(n); ++F) {
    c.max_links.push_back(ensured_boundary(n, F, opts));
  }
  return c;
}

std::vector<ToleranceRecord> sweep(int n, int faulty_processes,
                                   const Options& opts) {
  std::vector<ToleranceRecord> out;
  for (int f = 0; f <= n * (n - 1); ++f) {
    out.push_back(enumerate(n, faulty_processes, f, opts));
  }
  return out;
}

std::string records_header() {
  return "n\tF\tf\ttotal\tsolvable\tprobability\tregion";
}

std::string to_row(const ToleranceRecord& r) {
  char prob[32];
  std::snprintf(prob, sizeof prob, "%.6f", r.probability());
  return std::to_string(r.n) + '\t' + std::to_string(r.faulty_processes) +
         '\t' + std::to_string(r.faulty_links) + '\t' + std::to_string(r.total) +
         '\t' + std::to_string(r.solvable) + '\t' + prob + '\t' +
         to_string(r.region);
}

SampleReport sample(int n, int faulty_processes, int faulty_links,
                    std::uint64_t samples, std::uint64_t seed,
                    const Options& opts) {
  const Setup s = make_setup(n, faulty_processes, faulty_links, opts);
  check_budget(samples, opts);
  SampleReport rep;
  std::mt19937_64 gen(seed);
  std::vector<int> procs(n);
  std::vector<Link> links = all_links(n);
  const int total_links = static_cast<int>(links.size());
  for (std::uint64_t i = 0; i < samples; ++i) {
    for (int p = 0; p < n; ++p) procs[p] = p;
    ProcessMask faulty = 0;
    for (int j = 0; j < faulty_processes; ++j) {
      const int pick = j + static_cast<int>(gen() % static_cast<std::uint64_t>(n - j));
      std::swap(procs[j], procs[pick]);
      faulty |= ProcessMask{1} << procs[j];
    }
    std::vector<ProcessMask> rows = full_rows(n, faulty);
    for (int j = 0; j < faulty_links; ++j) {
      const int pick =
          j + static_cast<int>(gen() % static_cast<std::uint64_t>(total_links - j));
      std::swap(links[j], links[pick]);
      rows[links[j].from] &= ~(ProcessMask{1} << links[j].to);
    }
    ++rep.samples;
    const ProcessMask correct = all_processes(n) & ~faulty;
    if (!evaluate(rows.data(), n, correct, s.quorum, opts)) {
      if (!rep.first) {
        std::vector<std::pair<int, int>> chosen;
        for (int j = 0; j < faulty_links; ++j) {
          chosen.emplace_back(links[j].from + 1, links[j].to + 1);
        }
        rep.first.emplace(faulty, std::move(chosen));
      }
      ++rep.counterexamples;
    }
  }
  return rep;
}

}  // namespace hopcast::tolerance
