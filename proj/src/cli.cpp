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

#include "hopcast/cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "hopcast/analytics.hpp"
#include "hopcast/simnet.hpp"
#include "hopcast/tolerance.hpp"

namespace hopcast::cli {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Common {
  int n = 0;
  std::string policy = "strict";
  int max_hops = 3;
  std::string mode = "consensus";
  std::uint64_t budget = tolerance::Options{}.budget;
  unsigned threads = 0;
  bool no_symmetry = false;
  std::string out;
};

RelayPolicy parse_policy(const Common& c) {
  RelayPolicy p;
  if (c.policy == "strict") {
    p.variant = RelayVariant::Strict;
  } else if (c.policy == "relaxed") {
    p.variant = RelayVariant::Relaxed;
  } else {
    throw UsageError("--policy must be strict or relaxed");
  }
  p.max_hops = c.max_hops;
  return p;
}

tolerance::Mode parse_mode(const std::string& s) {
  if (s == "consensus") return tolerance::Mode::consensus();
  const std::string prefix = "delivery:";
  if (s.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const std::string g = s.substr(prefix.size());
      const int v = std::stoi(g, &used);
      if (used == g.size()) return tolerance::Mode::delivery(v);
    } catch (const std::exception&) {
    }
  }
  throw UsageError("--mode must be consensus or delivery:<g>");
}

tolerance::Options options_from(const Common& c) {
  tolerance::Options o;
  o.policy = parse_policy(c);
  o.mode = parse_mode(c.mode);
  o.budget = c.budget;
  o.threads = c.threads;
  o.symmetry = !c.no_symmetry;
  return o;
}

void emit(const std::string& data, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << data;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << data;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

void add_policy(CLI::App* sub, Common& c) {
  sub->add_option("--policy", c.policy, "strict|relaxed")
      ->check(CLI::IsMember({"strict", "relaxed"}));
  sub->add_option("--max-hops", c.max_hops, "1|2|3")->check(CLI::Range(1, 3));
}

void add_engine(CLI::App* sub, Common& c) {
  add_policy(sub, c);
  sub->add_option("--mode", c.mode, "consensus|delivery:<g>");
  sub->add_option("--budget", c.budget, "maximum evaluations per call");
  sub->add_option("--threads", c.threads, "worker threads (0 = all cores)");
  sub->add_flag("--no-symmetry", c.no_symmetry, "disable relabelling reduction");
}

std::string summarize_round(const simnet::RoundReport& r,
                            const simnet::TimingConfig& t) {
  std::ostringstream s;
  const auto limit = 4 * t.rttb_ticks();
  bool in_time = true;
  for (const auto& p : r.processes) {
    if (p.decided() && p.decision_local_time > limit) in_time = false;
  }
  int correct = 0;
  for (const auto& p : r.processes) correct += p.faulty ? 0 : 1;
  s << "# decided " << r.decided_count() << " of " << correct
    << " correct processes; agreement " << (r.agreement() ? "yes" : "NO")
    << "; all decisions within 4 RTTB (" << limit << " ticks) "
    << (in_time ? "yes" : "NO") << "\n";
  s << "# envelopes sent " << r.totals.sent << ", delivered "
    << r.totals.delivered << ", dropped " << r.totals.dropped << ", late "
    << r.totals.late << ", expired " << r.totals.expired << "\n";
  return s.str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"hopcast: consensus over faulty links"};
  app.require_subcommand(1);
  Common c;

  // simulate
  auto* sim = app.add_subcommand("simulate", "run one seeded consensus round");
  int sim_fp = 0, sim_fl = 0;
  std::uint64_t seed = 1;
  std::string scenario_file, replay_file, save_inputs;
  sim->add_option("--n", c.n, "number of processes");
  sim->add_option("--faulty-processes", sim_fp, "crashed processes (random)");
  sim->add_option("--faulty-links", sim_fl, "faulty links (random)");
  sim->add_option("--seed", seed, "seed");
  sim->add_option("--scenario", scenario_file, "scenario file instead of random");
  sim->add_option("--replay", replay_file, "run-inputs file to replay");
  sim->add_option("--save-inputs", save_inputs, "write run inputs here");
  sim->add_option("--out", c.out, "records file (default stdout)");
  add_policy(sim, c);

  // sweep
  auto* sweep = app.add_subcommand("sweep", "exhaustive (F, f) sweep");
  int sweep_fp = -1;
  sweep->add_option("--n", c.n, "number of processes")->required();
  sweep->add_option("--faulty-processes", sweep_fp, "only this F");
  sweep->add_option("--out", c.out, "records file (default stdout)");
  add_engine(sweep, c);

  // boundary
  auto* boundary = app.add_subcommand("boundary", "ensured boundary per F");
  int boundary_fp = -1;
  boundary->add_option("--n", c.n, "number of processes")->required();
  boundary->add_option("--faulty-processes", boundary_fp, "only this F");
  boundary->add_option("--out", c.out, "output file (default stdout)");
  add_engine(boundary, c);

  // table
  auto* table = app.add_subcommand("table", "regression table with extrapolation");
  constexpr int anchors = 6;
  table->add_option("--n", c.n, "last column")->default_val(11);
  table->add_option("--out", c.out, "output file (default stdout)");
  add_engine(table, c);

  // equations
  auto* eq = app.add_subcommand("equations", "closed-form bounds per F");
  eq->add_option("--n", c.n, "number of processes")->required();
  eq->add_option("--out", c.out, "output file (default stdout)");

  // crossval
  auto* cross = app.add_subcommand("crossval", "equation vs table vs brute force");
  int n_min = 3;
  std::uint64_t brute_budget = 20'000'000;
  cross->add_option("--n", c.n, "largest n")->default_val(11);
  cross->add_option("--n-min", n_min, "smallest n");
  cross->add_option("--brute-budget", brute_budget, "budget per brute probe");
  cross->add_option("--out", c.out, "output file (default stdout)");
  add_engine(cross, c);

  // figure1
  auto* fig = app.add_subcommand("figure1", "worst-case 3-hop round");
  std::string fig_policy = "relaxed";
  fig->add_option("--n", c.n, "number of processes (>= 6)")->default_val(6);
  fig->add_option("--seed", seed, "seed");
  fig->add_option("--policy", fig_policy, "strict|relaxed")
      ->check(CLI::IsMember({"strict", "relaxed"}));
  fig->add_option("--out", c.out, "records file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed()) {
      simnet::RunInputs inputs;
      if (!replay_file.empty()) {
        inputs = simnet::parse_run_inputs(read_file(replay_file));
      } else {
        inputs.seed = seed;
        inputs.policy = parse_policy(c);
        if (!scenario_file.empty()) {
          inputs.scenario = simnet::parse_scenario(read_file(scenario_file));
        } else {
          if (c.n < 3) throw UsageError("simulate needs --n >= 3 or --scenario");
          inputs.scenario =
              simnet::random_scenario(c.n, sim_fp, sim_fl, seed);
        }
      }
      if (!save_inputs.empty()) emit(simnet::serialize(inputs), save_inputs, out);
      const auto report = simnet::replay(inputs);
      emit(simnet::to_records(report), c.out, out);
      out << summarize_round(report, inputs.timing);
      return kOk;
    }

    if (sweep->parsed()) {
      const auto opts = options_from(c);
      const bool consensus = opts.mode.kind == tolerance::Mode::Kind::Consensus;
      const int lo = sweep_fp >= 0 ? sweep_fp : 0;
      const int hi = sweep_fp >= 0 ? sweep_fp : (consensus ? max_faulty(c.n) : 0);
      std::string data = tolerance::records_header() + "\n";
      std::ostringstream summary;
      for (int F = lo; F <= hi; ++F) {
        int ensured = -1;
        bool prefix = true;
        for (const auto& r : tolerance::sweep(c.n, F, opts)) {
          data += tolerance::to_row(r) + "\n";
          if (prefix && r.region == tolerance::Region::Ensured) {
            ensured = r.faulty_links;
          } else {
            prefix = false;
          }
        }
        summary << "# n=" << c.n << " F=" << F << ": ensured up to f=" << ensured
                << "\n";
      }
      emit(data, c.out, out);
      out << summary.str();
      return kOk;
    }

    if (boundary->parsed()) {
      const auto opts = options_from(c);
      std::string data = "n\tF\tmode\tf\n";
      if (opts.mode.kind == tolerance::Mode::Kind::Delivery) {
        data += std::to_string(c.n) + "\t0\t" + c.mode + "\t" +
                std::to_string(tolerance::delivery_tolerance(
                    c.n, opts.mode.group_size, opts)) +
                "\n";
      } else {
        const int lo = boundary_fp >= 0 ? boundary_fp : 0;
        const int hi = boundary_fp >= 0 ? boundary_fp : max_faulty(c.n);
        for (int F = lo; F <= hi; ++F) {
          data += std::to_string(c.n) + "\t" + std::to_string(F) +
                  "\tconsensus\t" +
                  std::to_string(tolerance::ensured_boundary(c.n, F, opts)) + "\n";
        }
      }
      emit(data, c.out, out);
      if (!c.out.empty()) out << data;
      return kOk;
    }

    if (table->parsed()) {
      auto opts = options_from(c);
      const auto computed = analytics::brute_force_table(anchors, opts);
      const auto t = analytics::extend_table(computed, c.n);
      emit(analytics::table_export(t) + "\n" + analytics::cells_export(t), c.out,
           out);
      out << "# brute-forced columns 3.." << anchors << ", extrapolated to "
          << c.n << "\n";
      return kOk;
    }

    if (eq->parsed()) {
      if (c.n < 3) throw UsageError("--n must be >= 3");
      std::string data = "n\tF\tc\tf\n";
      for (int F = 0; F <= max_faulty(c.n); ++F) {
        data += std::to_string(c.n) + "\t" + std::to_string(F) + "\t" +
                std::to_string(c.n - 1) + "\t" +
                std::to_string(analytics::equation_bound(c.n, F)) + "\n";
      }
      emit(data, c.out, out);
      if (!c.out.empty()) out << data;
      return kOk;
    }

    if (cross->parsed()) {
      auto opts = options_from(c);
      const auto t = analytics::extend_table(
          analytics::brute_force_table(6, opts), std::max(c.n, 6));
      const auto rows =
          analytics::cross_validate(n_min, c.n, t, brute_budget, opts);
      emit(analytics::cross_export(rows), c.out, out);
      int disagree = 0;
      for (const auto& r : rows) disagree += r.agree() ? 0 : 1;
      out << "# " << rows.size() << " rows, " << disagree
          << " discrepancies\n";
      return kOk;
    }

    if (fig->parsed()) {
      if (c.n < 6) throw UsageError("figure1 needs --n >= 6");
      auto f = simnet::worst_case_figure1(c.n);
      Common pc;
      pc.policy = fig_policy;
      const auto policy = parse_policy(pc);
      const auto report = simnet::run_round(f.scenario, f.timing, policy, seed);
      emit(simnet::to_records(report), c.out, out);
      const ProcessId P{1}, Q{4};
      for (const auto& rc : report.receipts) {
        if (rc.phase == 1 && ((rc.receiver == Q && rc.originator == P) ||
                              (rc.receiver == P && rc.originator == Q))) {
          out << "# " << (rc.receiver == Q ? "Q" : "P") << " received "
              << (rc.receiver == Q ? "P" : "Q") << "'s Phase-One message at local "
              << rc.local_time << " (2 RTTB = " << 2 * f.timing.rttb_ticks()
              << "), hops " << rc.hops << "\n";
        }
      }
      out << summarize_round(report, f.timing);
      return kOk;
    }
  } catch (const tolerance::BudgetExceeded& e) {
    err << "hopcast: " << e.what() << "\n";
    return kRefused;
  } catch (const UsageError& e) {
    err << "hopcast: " << e.what() << "\n" << app.help();
    return kUsage;
  } catch (const simnet::VersionMismatch& e) {
    err << "hopcast: " << e.what() << "\n";
    return kError;
  } catch (const std::invalid_argument& e) {
    err << "hopcast: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "hopcast: " << e.what() << "\n";
    return kError;
  }
  return kUsage;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("hopcast");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hopcast::cli
