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

#ifndef FAIRX_STRUCTURE_CHECK_HPP
#define FAIRX_STRUCTURE_CHECK_HPP

#include <string>
#include <utility>
#include <vector>

#include "fairx/levels.hpp"
#include "fairx/lex_decomposition.hpp"
#include "fairx/market.hpp"

namespace fairx {

/// Outcome of one structural property. `witness` lists the nodes of a
/// counterexample when the check fails.
struct Verdict {
  std::string property;
  bool passed = true;
  std::string detail;
  NodeSet witness;
};

struct StructureReport {
  std::vector<Verdict> verdicts;
  LevelDecomposition decomposition;
  ReceivedVector received;

  bool all_passed() const {
    for (const auto& v : verdicts) {
      if (!v.passed) return false;
    }
    return true;
  }

  const Verdict* find(const std::string& property) const {
    for (const auto& v : verdicts) {
      if (v.property == property) return &v;
    }
    return nullptr;
  }
};

namespace detail {

inline Verdict fail(std::string property, std::string detail, NodeSet witness) {
  return {std::move(property), false, std::move(detail), std::move(witness)};
}

inline std::string level_label(const LevelDecomposition& dec, std::size_t k) {
  return "l" + std::to_string(k + 1) + "=" + to_string(dec.levels[k]);
}

}  // namespace detail

/// Every recipient of node i sits on one level, and every neighbor i does
/// not serve sits on that level or above.
inline Verdict verify_neighbor_lemma(const MarketGraph& g, const Allocation& d) {
  const std::string name = "neighbor_lemma";
  auto r = received_vector(g, d);
  auto dec = level_decomposition(g, ratio_vector(g, r));
  for (NodeIndex i = 0; i < g.size(); ++i) {
    std::optional<NodeIndex> first;
    for (const auto& nb : g.neighbors(i)) {
      if (d.at(g, i, nb.node) <= 0) continue;
      if (!first) {
        first = nb.node;
      } else if (dec.level_of[nb.node] != dec.level_of[*first]) {
        return detail::fail(name, "node '" + g.id(i) + "' serves '" + g.id(*first) + "' and '" + g.id(nb.node) +
                                      "' on different levels",
                            {i, *first, nb.node});
      }
    }
    if (!first) continue;
    for (const auto& nb : g.neighbors(i)) {
      if (d.at(g, i, nb.node) > 0) continue;
      if (*dec.level_of[nb.node] < *dec.level_of[*first]) {
        return detail::fail(name, "node '" + g.id(i) + "' serves '" + g.id(*first) + "' but skips lower-level '" +
                                      g.id(nb.node) + "'",
                            {i, *first, nb.node});
      }
    }
  }
  return {name, true, "", {}};
}

/// Grouping of a decomposition: M_k = L_k u L_{K-k+1}, plus the middle
/// level alone when K is odd.
struct LevelGroup {
  NodeSet nodes;
  std::vector<std::size_t> levels;  // 0-based level indices, ascending
  std::vector<Rational> values;
};

inline std::vector<LevelGroup> groups(const LevelDecomposition& dec) {
  std::vector<LevelGroup> out;
  const std::size_t K = dec.K();
  for (std::size_t k = 0; k < K / 2; ++k) {
    out.push_back({set_union(dec.level_sets[k], dec.level_sets[dec.partner(k)]),
                   {k, dec.partner(k)},
                   {dec.levels[k], dec.levels[dec.partner(k)]}});
  }
  if (K % 2 == 1) out.push_back({dec.level_sets[K / 2], {K / 2}, {dec.levels[K / 2]}});
  return out;
}

/// Checks the level structure of a lex-optimal allocation on (g, d). When
/// K >= 2 and every verdict passes, the allocation is lex-optimal; when
/// K = 1 the single level must be 1. Q_k is recomputed from the ratio vector
/// alone.
inline StructureReport verify_theorem1(const MarketGraph& g, const Allocation& d) {
  StructureReport rep;
  rep.received = received_vector(g, d);
  rep.decomposition = level_decomposition(g, ratio_vector(g, rep.received));
  const auto& dec = rep.decomposition;
  const std::size_t K = dec.K();

  rep.verdicts.push_back(verify_neighbor_lemma(g, d));

  Verdict independent{"independent_bottom", true, "", {}};
  Verdict neighborhood{"neighborhood_top", true, "", {}};
  Verdict reciprocal{"reciprocal_levels", true, "", {}};
  Verdict balance{"balanced_exchange", true, "", {}};
  for (std::size_t k = 0; k < K / 2; ++k) {
    std::size_t top = dec.partner(k);
    const NodeSet& arena = dec.peeled[k];
    auto in_arena = membership(g.size(), arena);
    const NodeSet& low = dec.level_sets[k];

    if (independent.passed) {
      auto in_low = membership(g.size(), low);
      for (NodeIndex i : low) {
        for (const auto& nb : g.neighbors(i)) {
          if (in_low[nb.node]) {
            independent = detail::fail(independent.property,
                                       "level " + std::to_string(k + 1) + " has adjacent nodes '" + g.id(i) +
                                           "' and '" + g.id(nb.node) + "'",
                                       {i, nb.node});
            break;
          }
        }
        if (!independent.passed) break;
      }
    }
    if (neighborhood.passed) {
      NodeSet around = outside_neighbors(g, low, &in_arena);
      if (around != dec.level_sets[top]) {
        auto diff = set_union(set_difference(around, dec.level_sets[top]), set_difference(dec.level_sets[top], around));
        neighborhood = detail::fail(neighborhood.property,
                                    "neighbors of level " + std::to_string(k + 1) + " inside Q" +
                                        std::to_string(k + 1) + " differ from level " + std::to_string(top + 1),
                                    diff);
      }
    }
    if (reciprocal.passed && dec.levels[k] * dec.levels[top] != 1) {
      reciprocal = detail::fail(reciprocal.property,
                                detail::level_label(dec, k) + " times " + detail::level_label(dec, top) + " = " +
                                    to_string(Rational(dec.levels[k] * dec.levels[top])),
                                {});
    }
    if (balance.passed) {
      Rational got = 0;
      for (NodeIndex i : low) got += rep.received[i];
      Rational owned = g.total_endowment(dec.level_sets[top]);
      if (got != owned) {
        balance = detail::fail(balance.property,
                               "level " + std::to_string(k + 1) + " receives " + to_string(got) + " but level " +
                                   std::to_string(top + 1) + " owns " + to_string(owned),
                               {});
      }
    }
  }
  rep.verdicts.push_back(std::move(independent));
  rep.verdicts.push_back(std::move(neighborhood));
  rep.verdicts.push_back(std::move(reciprocal));
  rep.verdicts.push_back(std::move(balance));

  Verdict bounds{"level_bounds", true, "", {}};
  if (K == 1 && dec.levels[0] != 1) {
    bounds = detail::fail(bounds.property, "single level " + to_string(dec.levels[0]) + " is not 1", dec.level_sets[0]);
  } else if (K > 1 && !(dec.levels.front() < 1 && dec.levels.back() > 1)) {
    bounds = detail::fail(bounds.property, "levels do not straddle 1", {});
  }
  rep.verdicts.push_back(std::move(bounds));

  Verdict grouping{"grouping", true, "", {}};
  if (K >= 1) {
    auto gs = groups(dec);
    NodeSet covered;
    std::size_t total = 0;
    for (const auto& grp : gs) {
      covered = set_union(covered, grp.nodes);
      total += grp.nodes.size();
    }
    NodeSet lower;
    for (std::size_t k = 0; k < K / 2; ++k) lower = set_union(lower, dec.level_sets[k]);
    if (covered != g.non_isolated() || total != covered.size()) {
      grouping = detail::fail(grouping.property, "groups do not partition the non-isolated nodes", {});
    } else if (K % 2 == 1 && K > 1 && dec.levels[K / 2] != 1) {
      grouping = detail::fail(grouping.property, "middle level " + to_string(dec.levels[K / 2]) + " is not 1",
                              dec.level_sets[K / 2]);
    } else if (!is_independent(g, lower)) {
      grouping = detail::fail(grouping.property, "union of the lower half of the levels is not independent", {});
    }
  }
  rep.verdicts.push_back(std::move(grouping));

  Verdict isolation{"flow_isolation", true, "", {}};
  for (const auto& grp : groups(dec)) {
    auto f = in_out(g, d, grp.nodes);
    if (f.in_flow != 0 || f.out_flow != 0) {
      isolation = detail::fail(isolation.property,
                               "group exchanges with the rest: In=" + to_string(f.in_flow) + " Out=" +
                                   to_string(f.out_flow),
                               grp.nodes);
      break;
    }
  }
  rep.verdicts.push_back(std::move(isolation));
  return rep;
}

/// Edges unused in both directions whose endpoints lie in different groups.
inline std::vector<std::pair<NodeIndex, NodeIndex>> redundant_links(const MarketGraph& g, const LexSolution& lex) {
  std::vector<std::size_t> group_of(g.size(), static_cast<std::size_t>(-1));
  auto gs = groups(lex.decomposition);
  for (std::size_t m = 0; m < gs.size(); ++m) {
    for (NodeIndex i : gs[m].nodes) group_of[i] = m;
  }
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  for (const auto& [u, v] : g.edges()) {
    if (lex.allocation.at(g, u, v) != 0 || lex.allocation.at(g, v, u) != 0) continue;
    if (group_of[u] != group_of[v]) out.emplace_back(u, v);
  }
  return out;
}

/// Wraps `allocation` as a LexSolution after checking it is lex-optimal.
inline LexSolution certify_lex_optimal(const MarketGraph& g, Allocation allocation) {
  auto rep = verify_theorem1(g, allocation);
  if (!rep.all_passed()) {
    for (const auto& v : rep.verdicts) {
      if (!v.passed) throw Error(ErrorCode::kNotLexOptimalInput, v.property + ": " + v.detail);
    }
  }
  return describe_allocation(g, std::move(allocation));
}

}  // namespace fairx

#endif  // FAIRX_STRUCTURE_CHECK_HPP
