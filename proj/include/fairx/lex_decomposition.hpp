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

#ifndef FAIRX_LEX_DECOMPOSITION_HPP
#define FAIRX_LEX_DECOMPOSITION_HPP

#include <algorithm>
#include <span>
#include <stdexcept>
#include <vector>

#include "fairx/levels.hpp"
#include "fairx/market.hpp"
#include "fairx/maxmin_flow.hpp"

namespace fairx {

struct BottomLevel {
  NodeSet nodes;          // the lowest level set of the arena
  Rational level;         // its ratio
  Allocation allocation;  // reshaped max-min allocation
};

namespace detail {

class BottomLevelExtractor {
 public:
  BottomLevelExtractor(const MarketGraph& g, const MaxMinSolution& mm)
      : g_(g), lambda_(mm.lambda_star), d_(mm.allocation), arena_(mm.subset) {
    in_arena_ = membership(g.size(), arena_);
    received_.assign(g.size(), Rational(0));
    in_bottom_.assign(g.size(), false);
    Rational min_ratio;
    bool first = true;
    for (NodeIndex j : arena_) {
      received_[j] = d_.received(g, j);
      Rational ratio = received_[j] / g.endowment(j);
      if (first || ratio < min_ratio) min_ratio = ratio;
      first = false;
    }
    if (min_ratio != lambda_) {
      throw Error(ErrorCode::kNotOptimalInput,
                  "min ratio " + to_string(min_ratio) + " differs from lambda* " + to_string(lambda_));
    }
    if (lambda_ >= 1) {
      throw Error(ErrorCode::kNotOptimalInput, "lambda* = " + to_string(lambda_) + " leaves no bottom level");
    }
    for (NodeIndex j : arena_) in_bottom_[j] = received_[j] == lambda_ * g.endowment(j);
  }

  BottomLevel run() {
    while (separate_adjacent_pair()) {
    }
    while (drain_outside_flow()) {
    }
    BottomLevel out;
    for (NodeIndex j : arena_) {
      if (in_bottom_[j]) out.nodes.push_back(j);
    }
    out.level = lambda_;
    out.allocation = std::move(d_);
    check(out);
    return out;
  }

 private:
  // Loop 1: some i in L with an L-neighbor j still sends to j1 outside L.
  bool separate_adjacent_pair() {
    for (NodeIndex i : arena_) {
      if (!in_bottom_[i]) continue;
      for (const auto& to : g_.neighbors(i)) {
        NodeIndex j = to.node;
        if (!in_arena_[j] || !in_bottom_[j]) continue;
        for (const auto& from : g_.neighbors(i)) {
          NodeIndex j1 = from.node;
          if (!in_arena_[j1] || in_bottom_[j1] || d_.at(g_, i, j1) <= 0) continue;
          shift(i, j1, j);
          return true;
        }
      }
    }
    return false;
  }

  // Loop 2: some i in N(L) still sends to j1 outside L; redirect to the
  // lowest-index neighbor of i in L.
  bool drain_outside_flow() {
    for (NodeIndex i : arena_) {
      if (in_bottom_[i]) continue;
      std::optional<NodeIndex> target;
      for (const auto& nb : g_.neighbors(i)) {
        if (in_arena_[nb.node] && in_bottom_[nb.node]) {
          target = nb.node;
          break;
        }
      }
      if (!target) continue;
      for (const auto& from : g_.neighbors(i)) {
        NodeIndex j1 = from.node;
        if (!in_arena_[j1] || in_bottom_[j1] || d_.at(g_, i, j1) <= 0) continue;
        shift(i, j1, *target);
        return true;
      }
    }
    return false;
  }

  // Moves delta = min(d_{i,j1}, slack(j1)/2) from (i,j1) to (i,j), leaving
  // both receivers strictly above lambda*, and drops j from L.
  void shift(NodeIndex i, NodeIndex j1, NodeIndex j) {
    Rational slack = received_[j1] - lambda_ * g_.endowment(j1);
    if (slack <= 0) throw std::logic_error("donor receiver '" + g_.id(j1) + "' has no slack above lambda*");
    Rational delta = slack / 2;
    if (d_.at(g_, i, j1) < delta) delta = d_.at(g_, i, j1);
    d_.add(g_, i, j1, -delta);
    d_.add(g_, i, j, delta);
    received_[j1] -= delta;
    received_[j] += delta;
    in_bottom_[j] = false;
  }

  void check(const BottomLevel& out) const {
    if (out.nodes.empty()) throw std::logic_error("bottom level extraction emptied the candidate set");
    if (!is_independent(g_, out.nodes)) throw std::logic_error("extracted bottom level is not independent");
    auto top = outside_neighbors(g_, out.nodes, &in_arena_);
    Rational got = 0;
    for (NodeIndex j : out.nodes) got += received_[j];
    if (got != g_.total_endowment(top)) {
      throw std::logic_error("extracted bottom level does not absorb its neighbors' endowment");
    }
  }

  const MarketGraph& g_;
  Rational lambda_;
  Allocation d_;
  NodeSet arena_;
  std::vector<bool> in_arena_;
  std::vector<bool> in_bottom_;
  std::vector<Rational> received_;
};

}  // namespace detail

/// Reshapes a max-min optimal allocation until its bottom set is independent
/// and absorbs every unit its neighbors own; that set is the lowest
/// lex-optimal level of the arena `mm.subset`.
inline BottomLevel extract_bottom_level(const MarketGraph& g, const MaxMinSolution& mm) {
  return detail::BottomLevelExtractor(g, mm).run();
}

/// Flows on the edges between a bottom level and its partner top level:
/// bottom nodes ship all of D_i and each top node receives D_j / l_low; top
/// nodes ship all of D_j and each bottom node receives l_low * D_i.
inline Allocation pair_link_allocation(const MarketGraph& g, std::span<const NodeIndex> low,
                                       std::span<const NodeIndex> high, const Rational& l_low) {
  if (l_low <= 0) throw Error(ErrorCode::kInfeasibleTransport, "non-positive level " + to_string(l_low));
  NodeSet both = set_union(low, high);
  auto within = membership(g.size(), both);
  Rational l_high = 1 / l_low;

  auto leg = [&](std::span<const NodeIndex> senders, std::span<const NodeIndex> receivers,
                 const Rational& receive_ratio, Allocation& into) {
    std::vector<Rational> supply;
    std::vector<Rational> demand;
    for (NodeIndex i : senders) supply.push_back(g.endowment(i));
    for (NodeIndex j : receivers) demand.push_back(receive_ratio * g.endowment(j));
    if (sum(supply) != sum(demand)) {
      throw Error(ErrorCode::kInfeasibleTransport,
                  "supply " + to_string(sum(supply)) + " != demand " + to_string(sum(demand)));
    }
    auto res = transport(g, senders, supply, receivers, demand, &within);
    if (!res.saturated) {
      throw Error(ErrorCode::kInfeasibleTransport, "cross-level transport shipped only " + to_string(res.shipped));
    }
    for (std::size_t a = 0; a < res.arc_flow.size(); ++a) {
      if (res.arc_flow[a] != 0) into.arc_amount(a) = res.arc_flow[a];
    }
  };

  Allocation out(g);
  leg(low, high, l_high, out);
  leg(high, low, l_low, out);
  return out;
}

/// One pass of the peeling loop.
struct PeelStep {
  NodeSet arena;
  Rational lambda;
  std::vector<SearchStep> search;
  NodeSet bottom;   // empty when the arena closed at ratio 1
  NodeSet top;
};

struct LexSolution {
  Allocation allocation;
  ReceivedVector received;
  RatioVector ratios;
  LevelDecomposition decomposition;
  std::vector<PeelStep> peels;
};

/// Wraps an allocation with its derived vectors; no optimality claim.
inline LexSolution describe_allocation(const MarketGraph& g, Allocation allocation) {
  LexSolution s;
  s.received = received_vector(g, allocation);
  s.ratios = ratio_vector(g, s.received);
  s.decomposition = level_decomposition(g, s.ratios);
  s.allocation = std::move(allocation);
  return s;
}

namespace detail {

inline void copy_arcs_within(const MarketGraph& g, const Allocation& from, std::span<const NodeIndex> set,
                             Allocation& into) {
  auto in_set = membership(g.size(), set);
  for (NodeIndex i : set) {
    for (const auto& nb : g.neighbors(i)) {
      if (in_set[nb.node]) into.set(g, i, nb.node, from.at(g, i, nb.node));
    }
  }
}

inline void solve_component(const MarketGraph& g, NodeSet arena, Allocation& out, std::vector<PeelStep>& peels) {
  while (!arena.empty()) {
    require_no_isolated(g, arena);
    PeelStep step;
    step.arena = arena;
    if (arena.size() == 2) {
      // A single edge admits exactly one allocation.
      NodeIndex a = arena[0];
      NodeIndex b = arena[1];
      out.set(g, a, b, g.endowment(a));
      out.set(g, b, a, g.endowment(b));
      Rational ra = g.endowment(b) / g.endowment(a);
      Rational rb = g.endowment(a) / g.endowment(b);
      step.lambda = std::min(ra, rb);
      if (ra != rb) {
        step.bottom = {ra < rb ? a : b};
        step.top = {ra < rb ? b : a};
      }
      peels.push_back(std::move(step));
      return;
    }
    auto mm = solve_maxmin(g, arena);
    step.lambda = mm.lambda_star;
    step.search = mm.steps;
    if (mm.lambda_star == 1) {
      copy_arcs_within(g, mm.allocation, arena, out);
      peels.push_back(std::move(step));
      return;
    }
    auto bottom = extract_bottom_level(g, mm);
    auto in_arena = membership(g.size(), arena);
    NodeSet top = outside_neighbors(g, bottom.nodes, &in_arena);
    Allocation cross = pair_link_allocation(g, bottom.nodes, top, bottom.level);
    copy_arcs_within(g, cross, set_union(bottom.nodes, top), out);
    step.bottom = bottom.nodes;
    step.top = top;
    peels.push_back(std::move(step));
    arena = set_difference(arena, set_union(bottom.nodes, top));
  }
}

}  // namespace detail

/// Lex-optimal (max-min fair) allocation by level peeling: on each arena,
/// solve max-min, stop if every ratio is 1, otherwise extract the bottom
/// level, pair it with its arena neighbors at the reciprocal level, fix the
/// flows between the two, and recurse on what remains. Connected components
/// are solved independently; isolated nodes keep ratio 0.
inline LexSolution solve_lex_optimal(const MarketGraph& g) {
  Allocation allocation(g);
  std::vector<PeelStep> peels;
  for (auto& comp : g.components()) detail::solve_component(g, std::move(comp), allocation, peels);
  auto s = describe_allocation(g, std::move(allocation));
  s.peels = std::move(peels);
  return s;
}

}  // namespace fairx

#endif  // FAIRX_LEX_DECOMPOSITION_HPP
