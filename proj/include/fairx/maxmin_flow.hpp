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

#ifndef FAIRX_MAXMIN_FLOW_HPP
#define FAIRX_MAXMIN_FLOW_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairx/market.hpp"
#include "fairx/max_flow.hpp"

namespace fairx {

/// Result of shipping supplies from sender copies to receiver copies over
/// market edges, with receiver demands as sink capacities.
struct TransportResult {
  bool saturated = false;        // every demand met
  Rational shipped;              // max-flow value
  std::vector<Rational> arc_flow;  // per market arc, sender -> receiver
  NodeSet deficient;             // receivers on the sink side of the min cut
};

/// Bipartite transport on the market's edges. `within` restricts which edges
/// may be used (both endpoints must be set); nullptr allows all. A receiver
/// on the sink side of the cut is unreachable from the source in the
/// residual graph, so `deficient` is the largest minimizing receiver set.
inline TransportResult transport(const MarketGraph& g, std::span<const NodeIndex> senders,
                                 std::span<const Rational> supply, std::span<const NodeIndex> receivers,
                                 std::span<const Rational> demand, const std::vector<bool>* within = nullptr) {
  Integer scale = 1;
  Rational total_supply = 0;
  Rational total_demand = 0;
  for (const auto& s : supply) {
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), s.get_den_mpz_t());
    total_supply += s;
  }
  for (const auto& d : demand) {
    if (d < 0) throw Error(ErrorCode::kNegativeLambda, "negative demand " + to_string(d));
    mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(), d.get_den_mpz_t());
    total_demand += d;
  }
  auto scaled = [&](const Rational& v) {
    Rational x = v * Rational(scale);
    return Integer(x.get_num());
  };

  const std::size_t source = 0;
  const std::size_t sink = 1;
  const std::size_t sender_base = 2;
  const std::size_t receiver_base = sender_base + senders.size();
  MaxFlow<Integer> net(receiver_base + receivers.size());

  std::vector<long> receiver_slot(g.size(), -1);
  for (std::size_t k = 0; k < receivers.size(); ++k) receiver_slot[receivers[k]] = static_cast<long>(k);

  Integer unbounded = scaled(total_supply) + 1;
  struct Link {
    std::size_t flow_arc;
    std::size_t market_arc;
  };
  std::vector<Link> links;
  for (std::size_t k = 0; k < senders.size(); ++k) {
    net.add_arc(source, sender_base + k, scaled(supply[k]));
    NodeIndex i = senders[k];
    if (within && !(*within)[i]) continue;
    for (const auto& nb : g.neighbors(i)) {
      long slot = receiver_slot[nb.node];
      if (slot < 0) continue;
      if (within && !(*within)[nb.node]) continue;
      std::size_t fa = net.add_arc(sender_base + k, receiver_base + static_cast<std::size_t>(slot), unbounded);
      links.push_back({fa, g.arc(i, nb.node)});
    }
  }
  for (std::size_t k = 0; k < receivers.size(); ++k) {
    net.add_arc(receiver_base + k, sink, scaled(demand[k]));
  }

  Integer value = net.run(source, sink);
  TransportResult res;
  res.shipped = Rational(value, scale);
  res.shipped.canonicalize();
  res.saturated = res.shipped == total_demand;
  res.arc_flow.assign(2 * g.edge_count(), Rational(0));
  for (const auto& link : links) {
    Rational f(net.flow(link.flow_arc), scale);
    f.canonicalize();
    res.arc_flow[link.market_arc] += f;
  }
  auto seen = net.reachable(source);
  for (std::size_t k = 0; k < receivers.size(); ++k) {
    if (!seen[receiver_base + k]) res.deficient.push_back(receivers[k]);
  }
  return res;
}

/// Hall-type certificate: the nodes adjacent to `sinks` hold `supply` in
/// total, strictly less than the `demand` the sinks require.
struct CutCertificate {
  NodeSet sinks;
  Rational supply;
  Rational demand;
};

/// Sum of D_i over nodes of `subset` adjacent to some node of `sinks`.
inline Rational adjacent_supply(const MarketGraph& g, std::span<const NodeIndex> subset,
                                std::span<const NodeIndex> sinks) {
  auto in_subset = membership(g.size(), subset);
  auto in_sinks = membership(g.size(), sinks);
  Rational total = 0;
  for (NodeIndex i : subset) {
    for (const auto& nb : g.neighbors(i)) {
      if (in_sinks[nb.node] && in_subset[nb.node]) {
        total += g.endowment(i);
        break;
      }
    }
  }
  return total;
}

struct DemandCheck {
  bool feasible = false;
  Allocation witness;            // meaningful when feasible
  std::optional<CutCertificate> cut;  // present when infeasible
};

inline void require_no_isolated(const MarketGraph& g, std::span<const NodeIndex> subset) {
  auto in_subset = membership(g.size(), subset);
  for (NodeIndex i : subset) {
    bool has = false;
    for (const auto& nb : g.neighbors(i)) has = has || in_subset[nb.node];
    if (!has) {
      throw Error(ErrorCode::kEmptyEdgeSet, "node '" + g.id(i) + "' has no neighbor inside the node set");
    }
  }
}

/// Decides whether an allocation on the subgraph induced by `subset` gives
/// every node j at least demand[j] (demand is indexed like `subset`). The
/// witness sends each sender's unrouted surplus to its lowest-index
/// neighbor in the subset, so it allocates every endowment exactly.
inline DemandCheck check_demands(const MarketGraph& g, std::span<const NodeIndex> subset,
                                 std::span<const Rational> demand) {
  require_no_isolated(g, subset);
  std::vector<Rational> supply;
  supply.reserve(subset.size());
  for (NodeIndex i : subset) supply.push_back(g.endowment(i));
  auto in_subset = membership(g.size(), subset);
  auto res = transport(g, subset, supply, subset, demand, &in_subset);

  DemandCheck out;
  out.feasible = res.saturated;
  if (!out.feasible) {
    CutCertificate cut;
    cut.sinks = res.deficient;
    cut.supply = adjacent_supply(g, subset, cut.sinks);
    cut.demand = 0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
      if (std::binary_search(cut.sinks.begin(), cut.sinks.end(), subset[k])) cut.demand += demand[k];
    }
    out.cut = std::move(cut);
    return out;
  }
  out.witness = Allocation(g);
  for (std::size_t a = 0; a < res.arc_flow.size(); ++a) out.witness.arc_amount(a) = res.arc_flow[a];
  for (NodeIndex i : subset) {
    Rational surplus = g.endowment(i) - out.witness.sent(g, i);
    if (surplus == 0) continue;
    for (const auto& nb : g.neighbors(i)) {
      if (in_subset[nb.node]) {
        out.witness.add(g, i, nb.node, surplus);
        break;
      }
    }
  }
  return out;
}

struct FeasibilityResult {
  bool feasible = false;
  std::optional<Allocation> witness;
  std::optional<CutCertificate> cut;
};

/// Is there an allocation with r_j >= lambda * D_j for every node of `subset`?
inline FeasibilityResult feasible_at(const MarketGraph& g, std::span<const NodeIndex> subset,
                                     const Rational& lambda) {
  if (lambda < 0) throw Error(ErrorCode::kNegativeLambda, "lambda = " + to_string(lambda));
  std::vector<Rational> demand;
  demand.reserve(subset.size());
  for (NodeIndex j : subset) demand.push_back(lambda * g.endowment(j));
  auto check = check_demands(g, subset, demand);
  FeasibilityResult out;
  out.feasible = check.feasible;
  if (check.feasible) {
    out.witness = std::move(check.witness);
  } else {
    out.cut = std::move(check.cut);
  }
  return out;
}

inline FeasibilityResult feasible_at(const MarketGraph& g, const Rational& lambda) {
  auto nodes = g.non_isolated();
  if (nodes.empty()) throw Error(ErrorCode::kEmptyEdgeSet, "market has no edges");
  return feasible_at(g, nodes, lambda);
}

/// One probe of the parametric search.
struct SearchStep {
  Rational value;
  bool feasible = false;
  std::optional<CutCertificate> cut;
};

struct LiftResult {
  Rational value;          // largest feasible t (or the first t <= 0 when stopped early)
  bool feasible = false;   // whether `value` itself is feasible
  Allocation witness;      // allocation achieving demands base + value * weight
  std::vector<SearchStep> steps;
};

/// Largest t with an allocation on G_subset meeting demands base_j + t*weight_j,
/// by Dinkelbach iteration on min cuts. Starts from the bound given by the
/// whole subset; each infeasible probe's deficient set T yields the next
/// candidate (D(N(T)) - base(T)) / weight(T), strictly smaller. With
/// `stop_at_nonpositive` the search gives up as soon as t <= 0.
inline LiftResult maximize_lift(const MarketGraph& g, std::span<const NodeIndex> subset,
                                std::span<const Rational> base, std::span<const Rational> weight,
                                bool stop_at_nonpositive) {
  require_no_isolated(g, subset);
  Rational base_total = sum(base);
  Rational weight_total = sum(weight);
  Rational t = (g.total_endowment(subset) - base_total) / weight_total;

  LiftResult out;
  std::vector<Rational> demand(subset.size());
  for (std::size_t guard = 0; guard <= subset.size() + 2; ++guard) {
    if (stop_at_nonpositive && t <= 0) {
      out.value = t;
      out.feasible = false;
      return out;
    }
    for (std::size_t k = 0; k < subset.size(); ++k) demand[k] = base[k] + t * weight[k];
    auto check = check_demands(g, subset, demand);
    out.steps.push_back({t, check.feasible, check.cut});
    if (check.feasible) {
      out.value = t;
      out.feasible = true;
      out.witness = std::move(check.witness);
      return out;
    }
    const auto& T = check.cut->sinks;
    Rational base_T = 0;
    Rational weight_T = 0;
    for (std::size_t k = 0; k < subset.size(); ++k) {
      if (std::binary_search(T.begin(), T.end(), subset[k])) {
        base_T += base[k];
        weight_T += weight[k];
      }
    }
    Rational next = (check.cut->supply - base_T) / weight_T;
    if (next >= t) {
      throw std::logic_error("parametric search did not decrease: " + to_string(next) + " >= " + to_string(t));
    }
    t = next;
  }
  throw std::logic_error("parametric search exceeded its iteration bound");
}

struct MaxMinSolution {
  NodeSet subset;
  Rational lambda_star;
  Allocation allocation;
  ReceivedVector received;
  std::vector<SearchStep> steps;
};

/// Maximizes min_j r_j / D_j over allocations on the subgraph induced by
/// `subset`. lambda* equals the minimum over sink sets T of
/// D(N(T)) / D(T) and never exceeds 1.
inline MaxMinSolution solve_maxmin(const MarketGraph& g, std::span<const NodeIndex> subset) {
  if (subset.empty()) throw Error(ErrorCode::kEmptyEdgeSet, "empty node set");
  std::vector<Rational> base(subset.size(), Rational(0));
  std::vector<Rational> weight;
  weight.reserve(subset.size());
  for (NodeIndex j : subset) weight.push_back(g.endowment(j));
  auto lift = maximize_lift(g, subset, base, weight, false);

  MaxMinSolution out;
  out.subset.assign(subset.begin(), subset.end());
  out.lambda_star = lift.value;
  out.allocation = std::move(lift.witness);
  out.steps = std::move(lift.steps);
  out.received.values.assign(g.size(), Rational(0));
  for (NodeIndex j : subset) out.received.values[j] = out.allocation.received(g, j);
  return out;
}

inline MaxMinSolution solve_maxmin(const MarketGraph& g) {
  auto nodes = g.non_isolated();
  if (nodes.empty()) throw Error(ErrorCode::kEmptyEdgeSet, "market has no edges");
  return solve_maxmin(g, nodes);
}

}  // namespace fairx

#endif  // FAIRX_MAXMIN_FLOW_HPP
