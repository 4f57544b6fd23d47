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

#ifndef FAIRX_ORACLE_MAXMIN_PROGRAMMING_HPP
#define FAIRX_ORACLE_MAXMIN_PROGRAMMING_HPP

#include <optional>
#include <stdexcept>
#include <vector>

#include "fairx/market.hpp"
#include "fairx/oracle/simplex.hpp"

namespace fairx::oracle {

struct OracleResult {
  RatioVector ratios;
  Allocation allocation;
  std::vector<Rational> rounds;  // the value t reached in each round
  std::size_t lp_solves = 0;
};

namespace detail {

// Variables: one per market arc, then t. Free nodes need r_i >= t D_i,
// fixed nodes need r_i >= level_i D_i.
class MaxMinModel {
 public:
  explicit MaxMinModel(const MarketGraph& g) : g_(g), t_(2 * g.edge_count()) {}

  LinearProgram base(const std::vector<std::optional<Rational>>& fixed, const std::optional<Rational>& floor) const {
    LinearProgram lp;
    lp.variables = t_ + 1;
    lp.objective.assign(lp.variables, Rational(0));
    for (NodeIndex i = 0; i < g_.size(); ++i) {
      if (g_.is_isolated(i)) continue;
      std::vector<Rational> out(lp.variables);
      std::vector<Rational> in(lp.variables);
      for (const auto& nb : g_.neighbors(i)) {
        out[g_.arc(i, nb.node)] = 1;
        in[g_.arc(nb.node, i)] = 1;
      }
      lp.add(std::move(out), Relation::kEqual, g_.endowment(i));
      if (fixed[i]) {
        lp.add(std::move(in), Relation::kGreaterEqual, *fixed[i] * g_.endowment(i));
      } else {
        in[t_] = -g_.endowment(i);
        lp.add(std::move(in), Relation::kGreaterEqual, 0);
      }
    }
    if (floor) {
      std::vector<Rational> row(lp.variables);
      row[t_] = 1;
      lp.add(std::move(row), Relation::kGreaterEqual, *floor);
    }
    return lp;
  }

  std::size_t t_index() const { return t_; }

  Rational received(const std::vector<Rational>& x, NodeIndex i) const {
    Rational r = 0;
    for (const auto& nb : g_.neighbors(i)) r += x[g_.arc(nb.node, i)];
    return r;
  }

 private:
  const MarketGraph& g_;
  std::size_t t_;
};

inline LpResult require_optimal(LpResult res) {
  if (res.status != LpStatus::kOptimal) throw std::logic_error("max-min program lost feasibility");
  return res;
}

}  // namespace detail

/// Lex-optimal ratio vector by progressive filling with an exact LP: raise
/// the common floor t of the free nodes, then freeze every free node whose
/// ratio cannot exceed t in any allocation meeting that floor.
inline OracleResult maxmin_programming(const MarketGraph& g) {
  detail::MaxMinModel model(g);
  std::vector<std::optional<Rational>> fixed(g.size());
  std::vector<bool> free_node(g.size(), false);
  std::size_t remaining = 0;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    free_node[i] = !g.is_isolated(i);
    remaining += free_node[i];
  }
  OracleResult out;
  std::vector<Rational> last;
  while (remaining > 0) {
    auto lp = model.base(fixed, std::nullopt);
    lp.objective[model.t_index()] = 1;
    auto top = detail::require_optimal(solve(lp));
    ++out.lp_solves;
    const Rational t = top.value;
    out.rounds.push_back(t);
    last = top.x;

    std::vector<NodeIndex> freeze;
    for (NodeIndex i = 0; i < g.size(); ++i) {
      if (!free_node[i]) continue;
      auto probe = model.base(fixed, t);
      for (const auto& nb : g.neighbors(i)) probe.objective[g.arc(nb.node, i)] = 1;
      auto res = detail::require_optimal(solve(probe));
      ++out.lp_solves;
      if (res.value == t * g.endowment(i)) freeze.push_back(i);
    }
    if (freeze.empty()) throw std::logic_error("progressive filling froze no node");
    for (NodeIndex i : freeze) {
      fixed[i] = t;
      free_node[i] = false;
      --remaining;
    }
  }

  out.allocation = Allocation(g);
  if (!last.empty()) {
    for (std::size_t a = 0; a < 2 * g.edge_count(); ++a) out.allocation.arc_amount(a) = last[a];
  }
  out.ratios.values.assign(g.size(), Rational(0));
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (fixed[i]) out.ratios.values[i] = *fixed[i];
  }
  return out;
}

}  // namespace fairx::oracle

#endif  // FAIRX_ORACLE_MAXMIN_PROGRAMMING_HPP
