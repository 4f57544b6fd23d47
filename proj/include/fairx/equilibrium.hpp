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

#ifndef FAIRX_EQUILIBRIUM_HPP
#define FAIRX_EQUILIBRIUM_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fairx/lex_decomposition.hpp"
#include "fairx/market.hpp"
#include "fairx/structure_check.hpp"

namespace fairx {

enum class EquilibriumCondition { kReciprocity, kMinimumRatioPartner };

struct EquilibriumViolation {
  NodeIndex node;      // the node i the condition is stated for
  NodeIndex neighbor;  // the j on edge {i, j}
  EquilibriumCondition condition;
  std::string details;
};

struct EquilibriumReport {
  bool is_equilibrium = true;
  std::vector<EquilibriumViolation> violations;
};

/// Exchange equilibrium: for every i and neighbor j, d_ji = rho_i * d_ij;
/// and any j with d_ji > 0 has the smallest ratio among i's neighbors.
inline EquilibriumReport is_exchange_equilibrium(const MarketGraph& g, const Allocation& d) {
  auto rho = ratio_vector(g, received_vector(g, d));
  EquilibriumReport rep;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (g.is_isolated(i)) continue;
    Rational lowest = rho[g.neighbors(i).front().node];
    for (const auto& nb : g.neighbors(i)) lowest = std::min(lowest, rho[nb.node]);
    for (const auto& nb : g.neighbors(i)) {
      NodeIndex j = nb.node;
      const Rational& give = d.at(g, i, j);
      const Rational& get = d.at(g, j, i);
      if (get != rho[i] * give) {
        rep.violations.push_back({i, j, EquilibriumCondition::kReciprocity,
                                  "d(" + g.id(j) + "->" + g.id(i) + ")=" + to_string(get) + " but rho_" + g.id(i) +
                                      "*d(" + g.id(i) + "->" + g.id(j) + ")=" + to_string(Rational(rho[i] * give))});
      }
      if (get > 0 && rho[j] != lowest) {
        rep.violations.push_back({i, j, EquilibriumCondition::kMinimumRatioPartner,
                                  "'" + g.id(j) + "' serves '" + g.id(i) + "' with ratio " + to_string(rho[j]) +
                                      " above the neighborhood minimum " + to_string(lowest)});
      }
    }
  }
  rep.is_equilibrium = rep.violations.empty();
  return rep;
}

/// Observer for intermediate allocations of proportionalize (tests use it
/// to confirm the received vector never moves).
using CancelObserver = std::function<void(const Allocation&)>;

namespace detail {

// (i, j) is violated when l(i) * d_ij > d_ji.
inline bool over_gives(const MarketGraph& g, const Allocation& d, const RatioVector& rho, NodeIndex i, NodeIndex j) {
  return rho[i] * d.at(g, i, j) > d.at(g, j, i);
}

}  // namespace detail

/// Turns a lex-optimal allocation into one where every node reciprocates in
/// proportion to what it receives, by canceling cycles of violated links.
/// Received amounts are unchanged at every step. Throws NotLexOptimalInput
/// unless the input passes verify_theorem1.
inline Allocation proportionalize(const MarketGraph& g, const LexSolution& lex,
                                  const CancelObserver& observer = nullptr) {
  if (!verify_theorem1(g, lex.allocation).all_passed()) {
    throw Error(ErrorCode::kNotLexOptimalInput, "allocation fails the lex-optimal structure check");
  }
  const RatioVector& rho = lex.ratios;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (!g.is_isolated(i) && rho[i] <= 0) {
      throw Error(ErrorCode::kNotLexOptimalInput, "node '" + g.id(i) + "' has ratio 0");
    }
  }
  Allocation d = lex.allocation;
  const std::size_t bound = 2 * g.edge_count() + 1;
  for (std::size_t pass = 0; pass <= bound; ++pass) {
    // Lowest violated edge (i1 -> i0) starts the walk.
    std::optional<std::pair<NodeIndex, NodeIndex>> start;
    for (NodeIndex i = 0; i < g.size() && !start; ++i) {
      for (const auto& nb : g.neighbors(i)) {
        if (detail::over_gives(g, d, rho, i, nb.node)) {
          start = std::pair{i, nb.node};
          break;
        }
      }
    }
    if (!start) return d;

    // path[m] = i_m; (path[m], path[m-1]) is violated for m >= 1.
    std::vector<NodeIndex> path{start->second, start->first};
    std::vector<long> position(g.size(), -1);
    position[start->first] = 1;
    std::size_t cycle_begin = 0;
    while (true) {
      NodeIndex cur = path.back();
      std::optional<NodeIndex> next;
      for (const auto& nb : g.neighbors(cur)) {
        if (detail::over_gives(g, d, rho, nb.node, cur)) {
          next = nb.node;
          break;
        }
      }
      if (!next) throw std::logic_error("violated link chain broke at '" + g.id(cur) + "'");
      if (position[*next] >= 0) {
        cycle_begin = static_cast<std::size_t>(position[*next]);
        break;
      }
      position[*next] = static_cast<long>(path.size());
      path.push_back(*next);
    }
    std::vector<NodeIndex> cycle(path.begin() + static_cast<long>(cycle_begin), path.end());
    const std::size_t M = cycle.size();
    auto prev = [&](std::size_t m) { return cycle[(m + M - 1) % M]; };
    auto succ = [&](std::size_t m) { return cycle[(m + 1) % M]; };

    std::optional<Rational> delta;
    for (std::size_t m = 0; m < M; ++m) {
      NodeIndex node = cycle[m];
      Rational bound_m = (rho[node] * d.at(g, node, prev(m)) - d.at(g, prev(m), node)) / (rho[node] + 1);
      if (!delta || bound_m < *delta) delta = bound_m;
    }
    if (!delta || *delta <= 0) throw std::logic_error("cycle cancellation found no positive shift");
    for (std::size_t m = 0; m < M; ++m) {
      d.add(g, cycle[m], prev(m), -*delta);
      d.add(g, cycle[m], succ(m), *delta);
    }
    if (observer) observer(d);
  }
  throw std::logic_error("cycle cancellation exceeded its pass bound");
}

inline Allocation proportionalize(const MarketGraph& g, const Allocation& allocation,
                                  const CancelObserver& observer = nullptr) {
  return proportionalize(g, describe_allocation(g, allocation), observer);
}

}  // namespace fairx

#endif  // FAIRX_EQUILIBRIUM_HPP
