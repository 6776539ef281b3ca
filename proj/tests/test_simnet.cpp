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

#include <gtest/gtest.h>

#include <random>

#include "hopcast/simnet.hpp"
#include "oracle.hpp"

namespace hopcast::simnet {
namespace {

oracle::Net net_of(const FaultScenario& s) {
  oracle::Net g(s.n);
  for (const auto& p : s.faulty_processes) g.alive[p.bit()] = false;
  for (const auto& l : s.faulty_links) g.up[l.from.bit()][l.to.bit()] = false;
  return g;
}

TEST(Timing, Validation) {
  TimingConfig t;
  EXPECT_NO_THROW(t.validate());
  t.mdtb_ticks = 0;
  EXPECT_THROW(t.validate(), std::invalid_argument);
  TimingConfig lag;
  lag.max_start_lag_ticks = -1;
  EXPECT_THROW(lag.validate(), std::invalid_argument);
  EXPECT_EQ(TimingConfig{}.rttb_ticks(), 20);
  EXPECT_EQ(TimingConfig{}.min_delay_ticks(), 7);
}

TEST(Scenario, Validation) {
  FaultScenario s;
  s.n = 4;
  EXPECT_NO_THROW(s.validate());
  s.faulty_processes = {ProcessId{5}};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.faulty_processes = {ProcessId{1}, ProcessId{2}};  // beyond F_max is allowed
  EXPECT_NO_THROW(s.validate());
  s.faulty_processes.clear();
  s.faulty_links = {{ProcessId{2}, ProcessId{2}}};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s.faulty_links.clear();
  s.strategies[ProcessId{3}] = Strategy::crash();  // not faulty
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Round, DeterministicAndReplayable) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RunInputs in;
    in.scenario = random_scenario(5 + seed % 3, seed % 2, 3 + seed % 5, seed);
    in.seed = seed;
    in.policy = {seed % 2 ? RelayVariant::Strict : RelayVariant::Relaxed, 3};
    const auto a = run_round(in.scenario, in.timing, in.policy, in.seed);
    EXPECT_EQ(a, run_round(in.scenario, in.timing, in.policy, in.seed));
    EXPECT_EQ(a, replay(parse_run_inputs(serialize(in))));
    EXPECT_EQ(to_records(a), to_records(replay(in)));
  }
}

TEST(Round, VersionMismatchRefused) {
  RunInputs in;
  in.scenario = random_scenario(4, 0, 0, 1);
  in.version = "hopcast-0";
  EXPECT_THROW(replay(in), VersionMismatch);
}

TEST(Round, FaultFreeEnvelopeCount) {
  for (int n = 3; n <= 10; ++n) {
    FaultScenario s;
    s.n = n;
    const auto r = run_round(s, {}, {}, 42);
    const std::int64_t expect = 2LL * n * (n - 1) * (n - 1);
    EXPECT_EQ(r.totals.sent, expect) << n;
    EXPECT_EQ(r.totals.delivered, expect) << n;
    EXPECT_LE(r.totals.sent, 2LL * n * n * n);
    EXPECT_EQ(r.decided_count(), n);
    EXPECT_TRUE(r.agreement());
    for (const auto& p : r.processes) {
      EXPECT_LE(p.decision_local_time, 4 * TimingConfig{}.rttb_ticks());
    }
  }
}

TEST(Round, CrashEqualsOmitToEveryone) {
  std::mt19937_64 gen(17);
  for (int iter = 0; iter < 40; ++iter) {
    const int n = 4 + iter % 4;
    FaultScenario crash = random_scenario(n, 1, iter % 6, gen());
    FaultScenario omit = crash;
    for (const auto& p : crash.faulty_processes) {
      omit.strategies[p] = Strategy::omit(all_processes(n));
    }
    const auto a = without_timestamps(run_round(crash, {}, {}, iter));
    const auto b = without_timestamps(run_round(omit, {}, {}, iter));
    EXPECT_EQ(a.receipts, b.receipts);
    EXPECT_EQ(a.totals, b.totals);
    for (int i = 0; i < n; ++i) {
      if (a.processes[i].faulty) continue;
      EXPECT_EQ(a.processes[i], b.processes[i]);
    }
  }
}

TEST(Round, PhaseOneReceiptsMatchReachOracle) {
  std::mt19937_64 gen(23);
  for (int iter = 0; iter < 400; ++iter) {
    const int n = 4 + iter % 4;
    const int F = static_cast<int>(gen() % (max_faulty(n) + 1));
    const int L = (n - F) * (n - F - 1);
    const int f = static_cast<int>(gen() % (L / 2 + 1));
    const auto s = random_scenario(n, F, f, gen());
    const auto net = net_of(s);
    const bool strict = iter % 2 == 0;
    const int hops = 1 + iter % 3;
    const RelayPolicy pol{strict ? RelayVariant::Strict : RelayVariant::Relaxed,
                          hops};
    TimingConfig t;
    t.force_max_delay = iter % 5 == 0;
    const auto r = run_round(s, t, pol, gen());
    for (int p = 0; p < n; ++p) {
      for (int q = 0; q < n; ++q) {
        if (p == q || !net.alive[p] || !net.alive[q]) continue;
        ASSERT_EQ(r.received_phase_one(ProcessId{q + 1}, ProcessId{p + 1}),
                  oracle::reach(net, p, q, strict, hops))
            << serialize(s) << " p=" << p + 1 << " q=" << q + 1;
      }
    }
    EXPECT_TRUE(r.agreement());
  }
}

TEST(Round, WorstCaseThreeHopChainDecidesInTime) {
  const auto fig = worst_case_figure1(6);
  const auto r = run_round(fig.scenario, fig.timing,
                           {RelayVariant::Relaxed, 3}, 0);
  const Ticks rttb = fig.timing.rttb_ticks();
  int seen = 0;
  for (const auto& rc : r.receipts) {
    const bool pq = rc.originator == ProcessId{1} && rc.receiver == ProcessId{4};
    const bool qp = rc.originator == ProcessId{4} && rc.receiver == ProcessId{1};
    if (rc.phase == 1 && (pq || qp)) {
      ++seen;
      EXPECT_EQ(rc.hops, 3);
      EXPECT_LE(rc.local_time, 2 * rttb);
    }
  }
  EXPECT_EQ(seen, 2);
  EXPECT_EQ(r.decided_count(), 6);
  EXPECT_TRUE(r.agreement());
  for (const auto& p : r.processes) EXPECT_LE(p.decision_local_time, 4 * rttb);
}

TEST(Round, LateAndDroppedLookAlike) {
  // Whatever the async link does, the receiver sees nothing from it.
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    FaultScenario s;
    s.n = 4;
    for (int q = 2; q <= 4; ++q) s.faulty_links.insert({ProcessId{1}, ProcessId{q}});
    const auto r = run_round(s, {}, {RelayVariant::Relaxed, 3}, seed);
    for (int q = 2; q <= 4; ++q) EXPECT_FALSE(r.received_phase_one(ProcessId{q}, ProcessId{1}));
    // 3 own messages per phase plus 2 relays per (originator, phase).
    EXPECT_EQ(r.totals.late + r.totals.dropped, 2 * 3 + 2 * 3 * 2);
  }
}

TEST(Serialization, ScenarioRoundTrip) {
  FaultScenario s;
  s.n = 7;
  s.faulty_processes = {ProcessId{2}, ProcessId{6}};
  s.faulty_links = {{ProcessId{1}, ProcessId{3}}, {ProcessId{4}, ProcessId{5}}};
  s.strategies[ProcessId{2}] =
      Strategy::equivocate(to_bytes("evil"), ProcessId{3}.mask() | ProcessId{4}.mask());
  s.strategies[ProcessId{6}] = Strategy::delay(15, ProcessId{1}.mask());
  s.inputs[ProcessId{1}] = to_bytes("custom");
  EXPECT_EQ(parse_scenario(serialize(s)), s);
  RunInputs in;
  in.scenario = s;
  in.seed = 99;
  in.timing.forced_lags[3] = 4;
  in.timing.force_max_delay = true;
  in.policy = {RelayVariant::Strict, 2};
  EXPECT_EQ(parse_run_inputs(serialize(in)), in);
  EXPECT_THROW(parse_scenario("not a scenario"), std::invalid_argument);
}

TEST(Report, RecordsAreStable) {
  FaultScenario s;
  s.n = 3;
  const auto r = run_round(s, {}, {}, 5);
  const std::string rec = to_records(r);
  EXPECT_EQ(rec.rfind("hopcast-report", 0), 0u);
  EXPECT_NE(summary_row(r).find('\t'), std::string::npos);
  EXPECT_EQ(to_records(without_timestamps(r)),
            to_records(without_timestamps(run_round(s, {}, {}, 6))));
}

TEST(Round, EquivocatorExcludedWhenExposed) {
  // Two correct processes that hear each other get different values from 1.
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    FaultScenario s;
    s.n = 5;
    s.faulty_processes = {ProcessId{1}};
    s.strategies[ProcessId{1}] =
        Strategy::equivocate(to_bytes("other"), ProcessId{2}.mask());
    const auto r = run_round(s, {}, {}, seed);
    EXPECT_TRUE(r.agreement());
    for (const auto& p : r.processes) {
      if (p.faulty || !p.decided()) continue;
      for (auto c : p.decision->contributors) EXPECT_NE(c, ProcessId{1});
    }
  }
}

}  // namespace
}  // namespace hopcast::simnet
