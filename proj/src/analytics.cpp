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

#include "hopcast/analytics.hpp"

#include <algorithm>
#include <sstream>

namespace hopcast::analytics {

namespace {

std::string objective(int row) {
  if (row == 0) return "N to N";
  const std::string k = "(N-" + std::to_string(row) + ")";
  return k + " to " + k;
}

std::string cell_name(int row, int n) {
  return "(" + objective(row) + ", n=" + std::to_string(n) + ")";
}

}  // namespace

PatternConflict::PatternConflict(int row_, int n_, int computed_, int pattern_)
    : std::runtime_error("pattern conflict at " + cell_name(row_, n_) +
                         ": brute force f=" + std::to_string(computed_) +
                         ", pattern f=" + std::to_string(pattern_)),
      row(row_), n(n_), computed(computed_), pattern(pattern_) {}

MissingCell::MissingCell(int row_, int n_)
    : std::runtime_error("table has no cell " + cell_name(row_, n_)),
      row(row_), n(n_) {}

void RegressionTable::set_computed(int row, int n, int f) {
  Cell c{row, n, std::nullopt, f, CellSource::BruteForce};
  if (row > 0) c.delta = f - this->f(row - 1, n);
  put(c);
}

void RegressionTable::put(const Cell& c) {
  if (c.n < 3 || c.row < 0 || c.row >= rows_in(c.n)) {
    throw std::invalid_argument("no such cell " + cell_name(c.row, c.n));
  }
  cells_[{c.row, c.n}] = c;
}

const Cell* RegressionTable::find(int row, int n) const {
  auto it = cells_.find({row, n});
  return it == cells_.end() ? nullptr : &it->second;
}

int RegressionTable::f(int row, int n) const {
  const Cell* c = find(row, n);
  if (!c) throw MissingCell(row, n);
  return c->f;
}

int RegressionTable::max_n() const {
  int m = 0;
  for (const auto& [key, c] : cells_) m = std::max(m, c.n);
  return m;
}

bool RegressionTable::has_column(int n) const {
  for (int k = 0; k < rows_in(n); ++k) {
    if (!find(k, n)) return false;
  }
  return true;
}

std::vector<Cell> RegressionTable::cells() const {
  std::vector<Cell> out;
  for (const auto& [key, c] : cells_) out.push_back(c);
  return out;
}

int pattern_f0(int n) { return n - 2; }

int pattern_delta(int row, int n) {
  if (row < 1 || n < 2 * row || n < 3) {
    throw std::invalid_argument("no pattern for " + cell_name(row, n));
  }
  if (n == 2 * row) return 2 * row + 1;  // column before the Pattern-4 cell
  if (n == 2 * row + 1) return 2 * row;  // Pattern 4: N - F = F + 1
  return n - (2 * row + 1);              // Patterns 2 and 3
}

RegressionTable brute_force_table(int up_to_n, const tolerance::Options& opts) {
  RegressionTable t;
  for (int n = 3; n <= up_to_n; ++n) {
    for (int k = 0; k < RegressionTable::rows_in(n); ++k) {
      t.set_computed(k, n, tolerance::delivery_tolerance(n, n - k, opts));
    }
  }
  return t;
}

RegressionTable extend_table(const RegressionTable& computed, int up_to_n) {
  for (int n = 3; n <= 6; ++n) {
    if (!computed.has_column(n)) {
      throw std::invalid_argument("extend_table needs brute-forced columns 3..6");
    }
  }
  RegressionTable out;
  const int last = std::max(up_to_n, computed.max_n());
  for (int n = 3; n <= last; ++n) {
    for (int k = 0; k < RegressionTable::rows_in(n); ++k) {
      Cell c{k, n, std::nullopt, 0, CellSource::Pattern};
      if (k == 0) {
        c.f = pattern_f0(n);
      } else {
        c.delta = pattern_delta(k, n);
        c.f = out.f(k - 1, n) + *c.delta;
      }
      if (const Cell* known = computed.find(k, n)) {
        if (known->f != c.f) throw PatternConflict(k, n, known->f, c.f);
        out.put(*known);
      } else if (n <= up_to_n) {
        out.put(c);
      }
    }
  }
  return out;
}

int system_tolerance(int n, int faulty_processes, const RegressionTable& table) {
  if (n < 3 || faulty_processes < 0 || faulty_processes > max_faulty(n)) {
    throw std::invalid_argument("system_tolerance: need n >= 3, 0 <= F <= F_max");
  }
  return table.f(max_faulty(n) - faulty_processes, n - faulty_processes);
}

int equation_bound(int n, int faulty_processes) {
  if (n < 1 || faulty_processes < 0) {
    throw std::invalid_argument("equation_bound: need n >= 1, F >= 0");
  }
  const int c = n - 1;
  const int F = faulty_processes;
  int bound;
  if (n % 2 == 1) {
    const int h = c / 2;
    bound = F == 0 ? c + h + h * h : h + h * h - F * h;
  } else {
    const int h = (c + 1) / 2;
    bound = F == 0 ? h * h : h + h * h - (F + 1) * h;
  }
  return std::max(-1, bound - 1);
}

bool CrossRow::agree() const {
  return (!table || *table == equation) && (!brute || *brute == equation);
}

std::vector<CrossRow> cross_validate(int n_lo, int n_hi,
                                     const RegressionTable& table,
                                     std::uint64_t brute_budget,
                                     const tolerance::Options& opts) {
  std::vector<CrossRow> out;
  for (int n = std::max(3, n_lo); n <= n_hi; ++n) {
    for (int F = 0; F <= max_faulty(n); ++F) {
      CrossRow r;
      r.n = n;
      r.faulty_processes = F;
      r.equation = equation_bound(n, F);
      std::vector<std::string> notes;
      try {
        r.table = system_tolerance(n, F, table);
      } catch (const MissingCell& e) {
        notes.push_back(e.what());
      }
      if (brute_budget > 0) {
        tolerance::Options o = opts;
        o.mode = tolerance::Mode::consensus();
        o.budget = brute_budget;
        try {
          r.brute = tolerance::ensured_boundary(n, F, o);
        } catch (const tolerance::BudgetExceeded& e) {
          notes.push_back("brute force " + std::string(e.what()));
        }
      }
      for (std::size_t i = 0; i < notes.size(); ++i) {
        r.note += (i ? "; " : "") + notes[i];
      }
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::string table_export(const RegressionTable& t) {
  const int last = t.max_n();
  std::ostringstream out;
  out << "Delivery Type\tN";
  for (int n = 3; n <= last; ++n) out << '\t' << n;
  out << '\n';
  const int rows = RegressionTable::rows_in(last);
  for (int k = 0; k < rows; ++k) {
    for (int pass = k == 0 ? 1 : 0; pass < 2; ++pass) {
      out << objective(k) << '\t' << (pass == 0 ? "Delta" : "f");
      for (int n = 3; n <= last; ++n) {
        out << '\t';
        if (const Cell* c = t.find(k, n)) {
          if (pass == 1) {
            out << c->f;
          } else if (c->delta) {
            out << *c->delta;
          }
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string cells_export(const RegressionTable& t) {
  std::ostringstream out;
  out << "row\tobjective\tn\tdelta\tf\tsource\n";
  for (const Cell& c : t.cells()) {
    out << c.row << '\t' << objective(c.row) << '\t' << c.n << '\t';
    if (c.delta) out << *c.delta;
    out << '\t' << c.f << '\t'
        << (c.source == CellSource::BruteForce ? "brute-force" : "pattern")
        << '\n';
  }
  return out.str();
}

std::string curve_export(const RegressionTable& t, int n_lo, int n_hi) {
  std::ostringstream out;
  out << "n\tF\tf\n";
  for (int n = std::max(3, n_lo); n <= n_hi; ++n) {
    for (int F = 0; F <= max_faulty(n); ++F) {
      out << n << '\t' << F << '\t';
      try {
        out << system_tolerance(n, F, t);
      } catch (const MissingCell&) {
        out << "NA";
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string cross_export(const std::vector<CrossRow>& rows) {
  std::ostringstream out;
  out << "n\tF\tequation\ttable\tbrute\tagree\tnote\n";
  for (const auto& r : rows) {
    out << r.n << '\t' << r.faulty_processes << '\t' << r.equation << '\t';
    if (r.table) out << *r.table; else out << "NA";
    out << '\t';
    if (r.brute) out << *r.brute; else out << "NA";
    out << '\t' << (r.agree() ? "yes" : "NO") << '\t' << r.note << '\n';
  }
  return out.str();
}

}  // namespace hopcast::analytics
