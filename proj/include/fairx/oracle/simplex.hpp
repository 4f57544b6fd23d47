// Copyright 2026 The fairx Authors
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

#ifndef FAIRX_ORACLE_SIMPLEX_HPP
#define FAIRX_ORACLE_SIMPLEX_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "fairx/rational.hpp"

namespace fairx::oracle {

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

/// maximize objective . x  subject to  rows[k] . x (rel) rhs[k],  x >= 0.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<std::vector<Rational>> rows;
  std::vector<Relation> relations;
  std::vector<Rational> rhs;
  std::vector<Rational> objective;

  void add(std::vector<Rational> row, Relation rel, Rational b) {
    row.resize(variables);
    rows.push_back(std::move(row));
    relations.push_back(rel);
    rhs.push_back(std::move(b));
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  Rational value;
  std::vector<Rational> x;
};

namespace detail {

// Dense tableau; column `cols` holds the right-hand side.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : cols_(cols), t_(rows, std::vector<Rational>(cols + 1)), basis_(rows) {}

  std::vector<Rational>& row(std::size_t r) { return t_[r]; }
  std::size_t& basic(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return t_.size(); }
  const Rational& rhs(std::size_t r) const { return t_[r][cols_]; }

  void pivot(std::size_t r, std::size_t c) {
    Rational p = t_[r][c];
    for (auto& v : t_[r]) v /= p;
    for (std::size_t k = 0; k < t_.size(); ++k) {
      if (k == r || t_[k][c] == 0) continue;
      Rational f = t_[k][c];
      for (std::size_t j = 0; j <= cols_; ++j) {
        if (t_[r][j] != 0) t_[k][j] -= f * t_[r][j];
      }
    }
    basis_[r] = c;
  }

  // Maximizes cost . x over columns [0, allowed); Bland's rule.
  LpStatus optimize(const std::vector<Rational>& cost, std::size_t allowed) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < allowed && !enter; ++j) {
        Rational reduced = cost[j];
        for (std::size_t r = 0; r < t_.size(); ++r) {
          if (t_[r][j] != 0) reduced -= cost[basis_[r]] * t_[r][j];
        }
        if (reduced > 0) enter = j;
      }
      if (!enter) return LpStatus::kOptimal;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t r = 0; r < t_.size(); ++r) {
        if (t_[r][*enter] <= 0) continue;
        Rational ratio = t_[r][cols_] / t_[r][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[r] < basis_[*leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (!leave) return LpStatus::kUnbounded;
      pivot(*leave, *enter);
    }
  }

  Rational value(const std::vector<Rational>& cost) const {
    Rational v = 0;
    for (std::size_t r = 0; r < t_.size(); ++r) v += cost[basis_[r]] * t_[r][cols_];
    return v;
  }

 private:
  std::size_t cols_;
  std::vector<std::vector<Rational>> t_;
  std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Exact two-phase primal simplex.
inline LpResult solve(const LinearProgram& lp) {
  const std::size_t m = lp.rows.size();
  const std::size_t n = lp.variables;
  std::size_t slacks = 0;
  for (auto rel : lp.relations) slacks += rel != Relation::kEqual;
  const std::size_t structural = n + slacks;
  const std::size_t cols = structural + m;  // one artificial per row
  detail::Tableau tab(m, cols);

  std::size_t next_slack = n;
  for (std::size_t r = 0; r < m; ++r) {
    auto& row = tab.row(r);
    for (std::size_t j = 0; j < n; ++j) row[j] = lp.rows[r][j];
    if (lp.relations[r] == Relation::kLessEqual) row[next_slack++] = 1;
    if (lp.relations[r] == Relation::kGreaterEqual) row[next_slack++] = -1;
    row[cols] = lp.rhs[r];
    if (row[cols] < 0) {
      for (auto& v : row) v = -v;
    }
    row[structural + r] = 1;
    tab.basic(r) = structural + r;
  }

  std::vector<Rational> phase1(cols, Rational(0));
  for (std::size_t r = 0; r < m; ++r) phase1[structural + r] = -1;
  tab.optimize(phase1, cols);
  if (tab.value(phase1) != 0) return {LpStatus::kInfeasible, {}, {}};

  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basic(r) < structural) continue;
    for (std::size_t j = 0; j < structural; ++j) {
      if (tab.row(r)[j] != 0) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  std::vector<Rational> phase2(cols, Rational(0));
  for (std::size_t j = 0; j < n; ++j) phase2[j] = lp.objective.at(j);
  if (tab.optimize(phase2, structural) == LpStatus::kUnbounded) return {LpStatus::kUnbounded, {}, {}};

  LpResult out{LpStatus::kOptimal, tab.value(phase2), std::vector<Rational>(n, Rational(0))};
  for (std::size_t r = 0; r < m; ++r) {
    if (tab.basic(r) < n) out.x[tab.basic(r)] = tab.rhs(r);
  }
  return out;
}

}  // namespace fairx::oracle

#endif  // FAIRX_ORACLE_SIMPLEX_HPP
