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

#include "hopcast/simnet.hpp"

#include <algorithm>
#include <queue>
#include <random>
#include <sstream>
#include <tuple>

namespace hopcast::simnet {

void TimingConfig::validate() const {
  if (mdtb_ticks < 1) throw std::invalid_argument("mdtb_ticks must be >= 1");
  if (max_start_lag_ticks < 0 || max_start_lag_ticks >= mdtb_ticks) {
    throw std::invalid_argument("max_start_lag_ticks must be in [0, mdtb)");
  }
  for (const auto& [p, lag] : forced_lags) {
    if (lag < 0 || lag > max_start_lag_ticks) {
      throw std::invalid_argument("forced lag outside [0, max_start_lag]");
    }
  }
}

Ticks hop_cutoff(int hops, const TimingConfig& timing) {
  switch (hops) {
    case 1: return timing.rttb_ticks();
    case 2: return 3 * timing.mdtb_ticks;  // 1.5 RTTB
    case 3: return 2 * timing.rttb_ticks();
  }
  throw std::invalid_argument("no window beyond 3 hops");
}

void FaultScenario::validate() const {
  if (n < 3 || n > kMaxProcesses) {
    throw std::invalid_argument("scenario: n must be in [3, 64]");
  }
  auto check = [&](ProcessId p, const char* what) {
    if (p.index < 1 || p.index > n) {
      throw std::invalid_argument(std::string("scenario: ") + what +
                                  " index " + std::to_string(p.index) +
                                  " out of range");
    }
  };
  for (ProcessId p : faulty_processes) check(p, "faulty process");
  for (const auto& l : faulty_links) {
    check(l.from, "link source");
    check(l.to, "link target");
    if (l.from == l.to) throw std::invalid_argument("scenario: self link");
  }
  for (const auto& [p, s] : strategies) {
    check(p, "strategy owner");
    if (!faulty_processes.count(p)) {
      throw std::invalid_argument("scenario: strategy for a correct process");
    }
    if ((s.targets & ~all_processes(n)) != 0) {
      throw std::invalid_argument("scenario: strategy target out of range");
    }
    if (s.kind == StrategyKind::Delay && s.delay_ticks < 0) {
      throw std::invalid_argument("scenario: negative delay");
    }
  }
  for (const auto& [p, v] : inputs) check(p, "input owner");
}

Strategy FaultScenario::strategy_of(ProcessId p) const {
  auto it = strategies.find(p);
  return it == strategies.end() ? Strategy::crash() : it->second;
}

Bytes FaultScenario::input_of(ProcessId p) const {
  auto it = inputs.find(p);
  if (it != inputs.end()) return it->second;
  return to_bytes("value-" + std::to_string(p.index));
}

CorrectSet FaultScenario::correct() const {
  CorrectSet c = CorrectSet::all(n);
  for (ProcessId p : faulty_processes) c.erase(p);
  return c;
}

LinkMatrix FaultScenario::induced_matrix() const {
  LinkMatrix c(n);
  for (const auto& l : faulty_links) c.set(l.from, l.to, false);
  for (ProcessId p : faulty_processes) c = apply_faulty_process(c, p);
  return c;
}

bool RoundReport::agreement() const {
  const protocol::Decision* first = nullptr;
  for (const auto& p : processes) {
    if (p.faulty || !p.decision) continue;
    if (!first) {
      first = &*p.decision;
    } else if (p.decision->value != first->value) {
      return false;
    }
  }
  return true;
}

int RoundReport::decided_count() const {
  int k = 0;
  for (const auto& p : processes) k += (!p.faulty && p.decision) ? 1 : 0;
  return k;
}

bool RoundReport::received_phase_one(ProcessId receiver,
                                     ProcessId originator) const {
  for (const auto& r : receipts) {
    if (r.receiver == receiver && r.originator == originator && r.phase == 1) {
      return true;
    }
  }
  return false;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t envelope_key(std::uint64_t seed, int src, int dst, int orig,
                           int phase, int hops) {
  std::uint64_t h = splitmix(seed ^ 0x5eedf00dULL);
  for (std::uint64_t v : {src, dst, orig, phase, hops}) h = splitmix(h ^ v);
  return h;
}

struct Flight {
  protocol::Envelope env;
  int hops = 1;
  bool async = false;
};

enum Timer { kStart1 = 1, kStart2 = 2, kDecide = 3 };

struct Event {
  Ticks time;
  int kind;  // 0 delivery, 1 timer; deliveries first at equal time
  int dest;
  int src;
  int orig;
  int phase;
  int timer;
  std::uint64_t seq;
  std::size_t flight;

  auto key() const {
    return std::tie(time, kind, dest, src, orig, phase, timer, seq);
  }
  bool operator>(const Event& o) const { return key() > o.key(); }
};

class Round {
 public:
  Round(const FaultScenario& s, const TimingConfig& t, const RelayPolicy& p,
        std::uint64_t seed)
      : s_(s), t_(t), policy_(p), seed_(seed), n_(s.n),
        keys_(crypto::make_key_rings(seed, s.n)) {}

  RoundReport run();

 private:
  bool faulty(int b) const { return s_.faulty_processes.count(ProcessId::from_bit(b)); }
  bool crashed(int b) const {
    return faulty(b) &&
           s_.strategy_of(ProcessId::from_bit(b)).kind == StrategyKind::Crash;
  }
  void send(int src, protocol::Envelope env, int hops, Ticks now);
  void deliver(const Event& e);
  void timer(const Event& e);
  void push_timer(int b, Timer which, Ticks at);

  const FaultScenario& s_;
  const TimingConfig& t_;
  const RelayPolicy& policy_;
  std::uint64_t seed_;
  int n_;
  std::vector<crypto::KeyRing> keys_;
  std::vector<std::optional<protocol::Process>> procs_;
  std::vector<Ticks> lag_;
  std::vector<ProcessMask> strict_ok_;  // strict_ok_[orig] has dest bit
  std::set<std::pair<int, int>> dead_links_;
  std::vector<Flight> flights_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue_;
  std::uint64_t seq_ = 0;
  RoundReport report_;
};

void Round::push_timer(int b, Timer which, Ticks at) {
  queue_.push(Event{at, 1, b, 0, 0, 0, which, seq_++, 0});
}

void Round::send(int src, protocol::Envelope env, int hops, Ticks now) {
  const int dst = env.destination.bit();
  Ticks extra = 0;
  if (faulty(src)) {
    const Strategy st = s_.strategy_of(ProcessId::from_bit(src));
    const bool targeted = (st.targets >> dst & 1) != 0;
    switch (st.kind) {
      case StrategyKind::Crash:
        return;
      case StrategyKind::Omit:
        if (targeted) return;
        break;
      case StrategyKind::Delay:
        if (targeted) extra = st.delay_ticks;
        break;
      case StrategyKind::Equivocate:
        if (targeted && env.msg_type == protocol::MsgType::MSGPHASE1) {
          const auto& k = keys_[src];
          protocol::PhaseOnePayload alt{st.alternate,
                                        k.sign(k.hash(st.alternate))};
          env.payload = protocol::encode(alt);
          env.originator_sig = k.sign(k.hash(env.payload));
        }
        break;
    }
  }
  ++report_.totals.sent;
  const bool to_faulty = faulty(dst);
  if (to_faulty) {
    ++report_.totals.absorbed;
    if (crashed(dst)) return;
  }
  const int orig = env.originator.bit();
  const int phase = protocol::phase_of(env.msg_type);
  const std::uint64_t mix = envelope_key(seed_, src, dst, orig, phase, hops);
  Flight f{std::move(env), hops, false};
  Ticks arrival;
  if (!dead_links_.count({src, dst})) {
    const Ticks lo = t_.min_delay_ticks();
    const Ticks span = t_.mdtb_ticks - lo + 1;
    const Ticks d = t_.force_max_delay
                        ? t_.mdtb_ticks
                        : lo + static_cast<Ticks>(mix % static_cast<std::uint64_t>(span));
    arrival = now + d + extra;
  } else {
    if ((mix >> 40 & 1) == 0) {
      if (!to_faulty) ++report_.totals.dropped;
      return;
    }
    f.async = true;
    arrival = now + 2 * t_.rttb_ticks() * 2 + 1 + extra;
  }
  flights_.push_back(std::move(f));
  queue_.push(Event{arrival, 0, dst, src, orig, phase, 0, seq_++,
                    flights_.size() - 1});
}

void Round::deliver(const Event& e) {
  const int dst = e.dest;
  const bool counted = !faulty(dst);
  Flight& f = flights_[e.flight];
  if (f.async) {
    if (counted) ++report_.totals.late;
    return;
  }
  const Ticks local = e.time - lag_[dst];
  const Ticks phase_start = e.phase == 1 ? 0 : 2 * t_.rttb_ticks();
  const Ticks elapsed = local - phase_start;
  bool ok = f.hops <= policy_.max_hops && elapsed <= hop_cutoff(f.hops, t_);
  if (ok && f.hops == 3 && policy_.variant == RelayVariant::Strict) {
    ok = (strict_ok_[e.orig] >> dst & 1) != 0;
  }
  if (!ok) {
    if (counted) ++report_.totals.expired;
    return;
  }
  if (counted) ++report_.totals.delivered;
  auto& proc = *procs_[dst];
  const std::size_t before = proc.state().dedup.size();
  auto out = proc.on_received(f.env, local);
  if (counted && proc.state().dedup.size() > before) {
    report_.receipts.push_back(Receipt{ProcessId::from_bit(dst),
                                       f.env.originator, e.phase, f.hops,
                                       local});
  }
  const int hops = f.hops;
  for (auto& env : out) send(dst, std::move(env), hops + 1, e.time);
}

void Round::timer(const Event& e) {
  const int b = e.dest;
  auto& proc = *procs_[b];
  const Ticks local = e.time - lag_[b];
  if (e.timer == kDecide) {
    if (auto d = proc.try_decide(local)) {
      auto& out = report_.processes[b];
      out.decision = *d;
      out.decision_local_time = local;
    }
    return;
  }
  auto ev = e.timer == kStart1 ? protocol::TimeoutEvent::START1
                               : protocol::TimeoutEvent::START2;
  for (auto& env : proc.on_timeout(ev, local)) send(b, std::move(env), 1, e.time);
}

RoundReport Round::run() {
  report_.n = n_;
  report_.processes.resize(n_);
  lag_.resize(n_);
  std::mt19937_64 gen(seed_);
  for (int b = 0; b < n_; ++b) {
    const Ticks drawn = static_cast<Ticks>(
        gen() % static_cast<std::uint64_t>(t_.max_start_lag_ticks + 1));
    auto it = t_.forced_lags.find(b + 1);
    lag_[b] = it == t_.forced_lags.end() ? drawn : it->second;
    auto& out = report_.processes[b];
    out.id = ProcessId::from_bit(b);
    out.faulty = faulty(b);
    out.start_lag = lag_[b];
  }
  for (const auto& l : s_.faulty_links) {
    dead_links_.insert({l.from.bit(), l.to.bit()});
  }
  if (policy_.variant == RelayVariant::Strict && policy_.max_hops >= 3) {
    const LinkMatrix c = s_.induced_matrix();
    const CorrectSet correct = s_.correct();
    strict_ok_.assign(n_, 0);
    for (int p = 0; p < n_; ++p) {
      for (int q = 0; q < n_; ++q) {
        if (p != q && strict_three_hop_reach(c, ProcessId::from_bit(p),
                                             ProcessId::from_bit(q), correct)) {
          strict_ok_[p] |= ProcessMask{1} << q;
        }
      }
    }
  }
  procs_.resize(n_);
  for (int b = 0; b < n_; ++b) {
    if (crashed(b)) continue;
    procs_[b].emplace(keys_[b], s_.input_of(ProcessId::from_bit(b)));
    push_timer(b, kStart1, lag_[b]);
    push_timer(b, kStart2, lag_[b] + 2 * t_.rttb_ticks());
    if (!faulty(b)) push_timer(b, kDecide, lag_[b] + 4 * t_.rttb_ticks());
  }
  while (!queue_.empty()) {
    const Event e = queue_.top();
    queue_.pop();
    if (e.kind == 0) {
      deliver(e);
    } else {
      timer(e);
    }
  }
  for (int b = 0; b < n_; ++b) {
    if (faulty(b) || !procs_[b]) continue;
    const auto& flags = procs_[b]->state().byzantine_flags;
    report_.processes[b].flags.assign(flags.begin(), flags.end());
  }
  std::sort(report_.receipts.begin(), report_.receipts.end(),
            [](const Receipt& a, const Receipt& b) {
              return std::tie(a.receiver, a.originator, a.phase) <
                     std::tie(b.receiver, b.originator, b.phase);
            });
  return std::move(report_);
}

}  // namespace

RoundReport run_round(const FaultScenario& scenario, const TimingConfig& timing,
                      const RelayPolicy& policy, std::uint64_t seed) {
  scenario.validate();
  timing.validate();
  if (policy.max_hops < 1 || policy.max_hops > 3) {
    throw std::invalid_argument("max_hops must be 1, 2 or 3");
  }
  return Round(scenario, timing, policy, seed).run();
}

Figure1 worst_case_figure1(int n) {
  if (n < 6) throw std::invalid_argument("figure 1 needs n >= 6");
  constexpr int P = 1, P1 = 2, P2 = 3, Q = 4, Q1 = 5, Q2 = 6;
  Figure1 fig;
  fig.scenario.n = n;
  auto keep = [&](int a, int b) {
    return (a == P && b == P1) || (a == P2 && b == P) || (a == Q && b == Q1) ||
           (a == Q2 && b == Q);
  };
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a == b) continue;
      const bool touches = a == P || a == Q || b == P || b == Q;
      if (touches && !keep(a, b)) {
        fig.scenario.faulty_links.insert({ProcessId{a}, ProcessId{b}});
      }
    }
  }
  fig.timing.force_max_delay = true;
  for (int p = 1; p <= n; ++p) fig.timing.forced_lags[p] = 0;
  fig.timing.forced_lags[Q] = fig.timing.max_start_lag_ticks;
  (void)Q2;
  return fig;
}

FaultScenario random_scenario(int n, int faulty_processes, int faulty_links,
                              std::uint64_t seed) {
  const int links = n * (n - 1);
  if (faulty_processes < 0 || faulty_processes > n || faulty_links < 0 ||
      faulty_links > links) {
    throw std::invalid_argument("random_scenario: counts out of range");
  }
  FaultScenario s;
  s.n = n;
  std::mt19937_64 gen(seed);
  std::vector<int> procs(n);
  for (int i = 0; i < n; ++i) procs[i] = i + 1;
  for (int i = 0; i < faulty_processes; ++i) {
    const int j = i + static_cast<int>(gen() % static_cast<std::uint64_t>(n - i));
    std::swap(procs[i], procs[j]);
    s.faulty_processes.insert(ProcessId{procs[i]});
  }
  std::vector<DirectedLink> all;
  for (int a = 1; a <= n; ++a) {
    for (int b = 1; b <= n; ++b) {
      if (a != b) all.push_back({ProcessId{a}, ProcessId{b}});
    }
  }
  for (int i = 0; i < faulty_links; ++i) {
    const int j =
        i + static_cast<int>(gen() % static_cast<std::uint64_t>(links - i));
    std::swap(all[i], all[j]);
    s.faulty_links.insert(all[i]);
  }
  s.validate();
  return s;
}

RoundReport replay(const RunInputs& inputs) {
  if (inputs.version != kArtifactVersion) {
    throw VersionMismatch("run inputs from version '" + inputs.version +
                          "', this build is '" + std::string(kArtifactVersion) +
                          "'");
  }
  return run_round(inputs.scenario, inputs.timing, inputs.policy, inputs.seed);
}

namespace {

std::string mask_list(ProcessMask m) {
  std::string out;
  for (; m; m &= m - 1) {
    if (!out.empty()) out += ',';
    out += std::to_string(std::countr_zero(m) + 1);
  }
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(s, &used);
    if (used != s.size()) throw std::invalid_argument(what);
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string("cannot parse ") + what + ": '" +
                                s + "'");
  }
}

ProcessMask parse_mask(const std::string& s) {
  ProcessMask m = 0;
  if (s.empty()) return m;
  for (const auto& part : split(s, ',')) {
    const int p = parse_int(part, "process list");
    if (p < 1 || p > kMaxProcesses) throw std::invalid_argument("bad process");
    m |= ProcessId{p}.mask();
  }
  return m;
}

const char* policy_name(RelayVariant v) {
  return v == RelayVariant::Strict ? "strict" : "relaxed";
}

}  // namespace

std::string serialize(const FaultScenario& s) {
  std::ostringstream out;
  out << "hopcast-scenario v1\n";
  out << "n=" << s.n << "\n";
  std::string fp;
  for (ProcessId p : s.faulty_processes) {
    if (!fp.empty()) fp += ',';
    fp += std::to_string(p.index);
  }
  out << "faulty_processes=" << fp << "\n";
  std::string fl;
  for (const auto& l : s.faulty_links) {
    if (!fl.empty()) fl += ',';
    fl += std::to_string(l.from.index) + ">" + std::to_string(l.to.index);
  }
  out << "faulty_links=" << fl << "\n";
  for (const auto& [p, st] : s.strategies) {
    out << "strategy=" << p.index << ':';
    switch (st.kind) {
      case StrategyKind::Crash: out << "crash"; break;
      case StrategyKind::Omit: out << "omit:" << mask_list(st.targets); break;
      case StrategyKind::Delay:
        out << "delay:" << st.delay_ticks << ':' << mask_list(st.targets);
        break;
      case StrategyKind::Equivocate:
        out << "equivocate:" << to_hex(st.alternate) << ':'
            << mask_list(st.targets);
        break;
    }
    out << "\n";
  }
  for (const auto& [p, v] : s.inputs) {
    out << "input=" << p.index << ':' << to_hex(v) << "\n";
  }
  return out.str();
}

FaultScenario parse_scenario(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "hopcast-scenario v1") {
    throw std::invalid_argument("scenario: expected 'hopcast-scenario v1'");
  }
  FaultScenario s;
  bool have_n = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("scenario: expected key=value: " + line);
    }
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "n") {
      s.n = parse_int(val, "n");
      have_n = true;
    } else if (key == "faulty_processes") {
      for (ProcessMask m = parse_mask(val); m; m &= m - 1) {
        s.faulty_processes.insert(ProcessId::from_bit(std::countr_zero(m)));
      }
    } else if (key == "faulty_links") {
      if (val.empty()) continue;
      for (const auto& part : split(val, ',')) {
        const auto gt = part.find('>');
        if (gt == std::string::npos) {
          throw std::invalid_argument("scenario: link needs 'a>b': " + part);
        }
        s.faulty_links.insert({ProcessId{parse_int(part.substr(0, gt), "link")},
                               ProcessId{parse_int(part.substr(gt + 1), "link")}});
      }
    } else if (key == "strategy") {
      const auto parts = split(val, ':');
      if (parts.size() < 2) throw std::invalid_argument("scenario: strategy");
      const ProcessId p{parse_int(parts[0], "strategy owner")};
      Strategy st;
      if (parts[1] == "crash" && parts.size() == 2) {
        st = Strategy::crash();
      } else if (parts[1] == "omit" && parts.size() == 3) {
        st = Strategy::omit(parse_mask(parts[2]));
      } else if (parts[1] == "delay" && parts.size() == 4) {
        st = Strategy::delay(parse_int(parts[2], "delay"), parse_mask(parts[3]));
      } else if (parts[1] == "equivocate" && parts.size() == 4) {
        st = Strategy::equivocate(from_hex(parts[2]), parse_mask(parts[3]));
      } else {
        throw std::invalid_argument("scenario: unknown strategy '" + val + "'");
      }
      s.strategies[p] = st;
    } else if (key == "input") {
      const auto colon = val.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("scenario: input");
      s.inputs[ProcessId{parse_int(val.substr(0, colon), "input owner")}] =
          from_hex(val.substr(colon + 1));
    } else {
      throw std::invalid_argument("scenario: unknown key '" + key + "'");
    }
  }
  if (!have_n) throw std::invalid_argument("scenario: missing n=");
  s.validate();
  return s;
}

std::string serialize(const RunInputs& r) {
  std::ostringstream out;
  out << "hopcast-run " << r.version << "\n";
  out << "seed=" << r.seed << "\n";
  out << "mdtb=" << r.timing.mdtb_ticks << "\n";
  out << "max_lag=" << r.timing.max_start_lag_ticks << "\n";
  out << "force_max_delay=" << (r.timing.force_max_delay ? 1 : 0) << "\n";
  for (const auto& [p, lag] : r.timing.forced_lags) {
    out << "forced_lag=" << p << ':' << lag << "\n";
  }
  out << "policy=" << policy_name(r.policy.variant) << "\n";
  out << "max_hops=" << r.policy.max_hops << "\n";
  out << serialize(r.scenario);
  return out.str();
}

RunInputs parse_run_inputs(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line.rfind("hopcast-run ", 0) != 0) {
    throw std::invalid_argument("run inputs: expected 'hopcast-run <version>'");
  }
  RunInputs r;
  r.version = line.substr(std::string("hopcast-run ").size());
  std::string rest;
  while (std::getline(in, line)) {
    if (line == "hopcast-scenario v1") {
      rest = line + "\n";
      while (std::getline(in, line)) rest += line + "\n";
      break;
    }
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("run inputs: " + line);
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "seed") {
      try {
        r.seed = std::stoull(val);
      } catch (const std::exception&) {
        throw std::invalid_argument("run inputs: bad seed");
      }
    } else if (key == "mdtb") {
      r.timing.mdtb_ticks = parse_int(val, "mdtb");
    } else if (key == "max_lag") {
      r.timing.max_start_lag_ticks = parse_int(val, "max_lag");
    } else if (key == "force_max_delay") {
      r.timing.force_max_delay = parse_int(val, "force_max_delay") != 0;
    } else if (key == "forced_lag") {
      const auto colon = val.find(':');
      if (colon == std::string::npos) throw std::invalid_argument("forced_lag");
      r.timing.forced_lags[parse_int(val.substr(0, colon), "forced_lag")] =
          parse_int(val.substr(colon + 1), "forced_lag");
    } else if (key == "policy") {
      if (val == "strict") {
        r.policy.variant = RelayVariant::Strict;
      } else if (val == "relaxed") {
        r.policy.variant = RelayVariant::Relaxed;
      } else {
        throw std::invalid_argument("run inputs: policy must be strict|relaxed");
      }
    } else if (key == "max_hops") {
      r.policy.max_hops = parse_int(val, "max_hops");
    } else {
      throw std::invalid_argument("run inputs: unknown key '" + key + "'");
    }
  }
  if (rest.empty()) throw std::invalid_argument("run inputs: missing scenario");
  r.scenario = parse_scenario(rest);
  return r;
}

std::string to_records(const RoundReport& r) {
  std::ostringstream out;
  out << "hopcast-report " << kArtifactVersion << "\n";
  for (const auto& p : r.processes) {
    out << "process id=" << p.id.index << " faulty=" << (p.faulty ? 1 : 0)
        << " lag=" << p.start_lag << " decided=" << (p.decided() ? 1 : 0);
    if (p.decided()) {
      std::string contributors;
      for (ProcessId c : p.decision->contributors) {
        if (!contributors.empty()) contributors += ',';
        contributors += std::to_string(c.index);
      }
      out << " time=" << p.decision_local_time
          << " value=" << p.decision->value.hex()
          << " contributors=" << contributors;
    }
    std::string flags;
    for (ProcessId f : p.flags) {
      if (!flags.empty()) flags += ',';
      flags += std::to_string(f.index);
    }
    out << " flags=" << flags << "\n";
  }
  for (const auto& rc : r.receipts) {
    out << "receipt receiver=" << rc.receiver.index
        << " originator=" << rc.originator.index << " phase=" << rc.phase
        << " hops=" << rc.hops << " local=" << rc.local_time << "\n";
  }
  const auto& t = r.totals;
  out << "totals sent=" << t.sent << " delivered=" << t.delivered
      << " dropped=" << t.dropped << " late=" << t.late
      << " expired=" << t.expired << " absorbed=" << t.absorbed << "\n";
  return out.str();
}

std::string summary_header() {
  return "n\tcorrect\tdecided\tagreement\tmax_time\tsent\tdelivered\tdropped"
         "\tlate\texpired";
}

std::string summary_row(const RoundReport& r) {
  int correct = 0;
  Ticks max_time = 0;
  for (const auto& p : r.processes) {
    if (p.faulty) continue;
    ++correct;
    if (p.decided()) max_time = std::max(max_time, p.decision_local_time);
  }
  std::ostringstream out;
  out << r.n << '\t' << correct << '\t' << r.decided_count() << '\t'
      << (r.agreement() ? "yes" : "NO") << '\t' << max_time << '\t'
      << r.totals.sent << '\t' << r.totals.delivered << '\t'
      << r.totals.dropped << '\t' << r.totals.late << '\t' << r.totals.expired;
  return out.str();
}

RoundReport without_timestamps(const RoundReport& r) {
  RoundReport out = r;
  for (auto& p : out.processes) {
    p.start_lag = 0;
    p.decision_local_time = 0;
  }
  for (auto& rc : out.receipts) rc.local_time = 0;
  return out;
}

}  // namespace hopcast::simnet
