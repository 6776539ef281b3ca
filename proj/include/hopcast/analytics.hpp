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

#ifndef HOPCAST_ANALYTICS_HPP_
#define HOPCAST_ANALYTICS_HPP_

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hopcast/tolerance.hpp"

namespace hopcast::analytics {

// Row k is delivery among n-k processes ("(N-k) to (N-k)").
enum class CellSource { BruteForce, Pattern };

struct Cell {
  int row = 0;
  int n = 0;
  std::optional<int> delta;  // absent on row 0
  int f = 0;
  CellSource source = CellSource::Pattern;

  friend bool operator==(const Cell&, const Cell&) = default;
};

class PatternConflict : public std::runtime_error {
 public:
  PatternConflict(int row, int n, int computed, int pattern);
  int row, n, computed, pattern;
};

class MissingCell : public std::runtime_error {
 public:
  MissingCell(int row, int n);
  int row, n;
};

class RegressionTable {
 public:
  // Rows present in column n: 0 .. n/2.
  static int rows_in(int n) { return n / 2 + 1; }

  // Records a brute-forced f; delta is derived from the row above.
  void set_computed(int row, int n, int f);
  void put(const Cell& c);

  const Cell* find(int row, int n) const;
  // Throws MissingCell.
  int f(int row, int n) const;
  int max_n() const;
  bool has_column(int n) const;
  std::vector<Cell> cells() const;  // ordered by (row, n)

  friend bool operator==(const RegressionTable&,
                         const RegressionTable&) = default;

 private:
  std::map<std::pair<int, int>, Cell> cells_;
};

// Pattern values. Row 0: f = n-2. Row k >= 1: delta.
int pattern_f0(int n);
int pattern_delta(int row, int n);

// Delivery tolerances for columns 3..up_to_n by exhaustive enumeration.
RegressionTable brute_force_table(int up_to_n,
                                  const tolerance::Options& opts = {});

// Fills columns up to up_to_n; brute-forced cells are checked, never replaced.
RegressionTable extend_table(const RegressionTable& computed, int up_to_n);

// f(row F_max-F, column n-F): the accumulated contributions from delivery
// among n-F down to delivery among n-F_max.
int system_tolerance(int n, int faulty_processes, const RegressionTable& table);

// Largest f below the closed-form bound for (n, F_t), or -1.
int equation_bound(int n, int faulty_processes);

struct CrossRow {
  int n = 0;
  int faulty_processes = 0;
  int equation = 0;
  std::optional<int> table;
  std::optional<int> brute;
  std::string note;  // why a column is missing

  bool agree() const;
};

// brute_budget == 0 skips enumeration entirely.
std::vector<CrossRow> cross_validate(int n_lo, int n_hi,
                                     const RegressionTable& table,
                                     std::uint64_t brute_budget,
                                     const tolerance::Options& opts = {});

// Same layout as the printed tables: one Delta row and one f row per
// objective, columns 3..max_n, tab separated.
std::string table_export(const RegressionTable& t);
// One line per cell: row, n, delta, f, source.
std::string cells_export(const RegressionTable& t);
// One line per (n, F): tolerated f from the table.
std::string curve_export(const RegressionTable& t, int n_lo, int n_hi);
std::string cross_export(const std::vector<CrossRow>& rows);

}  // namespace hopcast::analytics

#endif  // HOPCAST_ANALYTICS_HPP_
