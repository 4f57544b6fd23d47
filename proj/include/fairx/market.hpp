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

#ifndef FAIRX_MARKET_HPP
#define FAIRX_MARKET_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "fairx/rational.hpp"

namespace fairx {

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;
/// Sorted, duplicate-free list of node indices.
using NodeSet = std::vector<NodeIndex>;

struct RawNode {
  std::string id;
  Rational endowment;
};

/// Unvalidated market as read from a file.
struct RawMarket {
  std::vector<RawNode> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

struct MarketError {
  ErrorCode code;
  std::string message;
};

struct Neighbor {
  NodeIndex node;
  EdgeIndex edge;
};

/// Undirected exchange graph with positive endowments. Node indices follow
/// declaration order; every "lowest id" rule in fairx means lowest index.
/// Edge e = {u, v} with u < v owns arcs 2e (u -> v) and 2e+1 (v -> u).
class MarketGraph {
 public:
  MarketGraph() = default;

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  const std::string& id(NodeIndex i) const { return nodes_.at(i).id; }
  const Rational& endowment(NodeIndex i) const { return nodes_.at(i).endowment; }
  std::span<const Neighbor> neighbors(NodeIndex i) const { return adjacency_.at(i); }
  const std::vector<std::pair<NodeIndex, NodeIndex>>& edges() const noexcept { return edges_; }

  bool is_isolated(NodeIndex i) const { return adjacency_.at(i).empty(); }

  std::optional<NodeIndex> index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<EdgeIndex> edge_between(NodeIndex i, NodeIndex j) const {
    for (const auto& nb : adjacency_.at(i)) {
      if (nb.node == j) return nb.edge;
    }
    return std::nullopt;
  }

  bool adjacent(NodeIndex i, NodeIndex j) const { return edge_between(i, j).has_value(); }

  /// Arc index for the directed pair i -> j over an existing edge.
  std::size_t arc(NodeIndex from, NodeIndex to) const {
    auto e = edge_between(from, to);
    if (!e) {
      throw Error(ErrorCode::kAllocationMismatch,
                  "no edge between '" + id(from) + "' and '" + id(to) + "'");
    }
    return 2 * *e + (from < to ? 0 : 1);
  }

  std::pair<NodeIndex, NodeIndex> arc_endpoints(std::size_t arc) const {
    const auto& [u, v] = edges_.at(arc / 2);
    return arc % 2 == 0 ? std::pair{u, v} : std::pair{v, u};
  }

  NodeSet non_isolated() const {
    NodeSet out;
    for (NodeIndex i = 0; i < size(); ++i) {
      if (!is_isolated(i)) out.push_back(i);
    }
    return out;
  }

  NodeSet all_nodes() const {
    NodeSet out(size());
    for (NodeIndex i = 0; i < size(); ++i) out[i] = i;
    return out;
  }

  /// Connected components with at least one edge, each sorted.
  std::vector<NodeSet> components() const {
    std::vector<NodeSet> out;
    std::vector<bool> seen(size(), false);
    for (NodeIndex s = 0; s < size(); ++s) {
      if (seen[s] || is_isolated(s)) continue;
      NodeSet comp;
      std::vector<NodeIndex> stack{s};
      seen[s] = true;
      while (!stack.empty()) {
        NodeIndex u = stack.back();
        stack.pop_back();
        comp.push_back(u);
        for (const auto& nb : adjacency_[u]) {
          if (!seen[nb.node]) {
            seen[nb.node] = true;
            stack.push_back(nb.node);
          }
        }
      }
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
    return out;
  }

  Rational total_endowment(std::span<const NodeIndex> set) const {
    Rational total = 0;
    for (NodeIndex i : set) total += endowment(i);
    return total;
  }

  friend std::variant<MarketGraph, std::vector<MarketError>> validate_market(const RawMarket& raw);

 private:
  std::vector<RawNode> nodes_;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Checks the model preconditions and builds adjacency. Isolated nodes are
/// legal; they receive nothing and carry ratio 0.
inline std::variant<MarketGraph, std::vector<MarketError>> validate_market(const RawMarket& raw) {
  std::vector<MarketError> errors;
  MarketGraph g;
  for (const auto& node : raw.nodes) {
    if (g.index_.count(node.id) != 0) {
      errors.push_back({ErrorCode::kDuplicateNode, "duplicate node '" + node.id + "'"});
      continue;
    }
    if (node.endowment <= 0) {
      errors.push_back({ErrorCode::kNonPositiveEndowment,
                        "node '" + node.id + "' has endowment " + to_string(node.endowment)});
    }
    g.index_.emplace(node.id, g.nodes_.size());
    g.nodes_.push_back(node);
  }
  g.adjacency_.assign(g.nodes_.size(), {});

  std::set<std::pair<NodeIndex, NodeIndex>> seen;
  for (const auto& [a, b] : raw.edges) {
    auto ia = g.index_of(a);
    auto ib = g.index_of(b);
    if (!ia || !ib) {
      errors.push_back({ErrorCode::kUnknownNode,
                        "edge {" + a + "," + b + "} references unknown node '" + (ia ? b : a) + "'"});
      continue;
    }
    if (*ia == *ib) {
      errors.push_back({ErrorCode::kSelfLoop, "self-loop at '" + a + "'"});
      continue;
    }
    auto key = std::minmax(*ia, *ib);
    if (!seen.insert(key).second) {
      errors.push_back({ErrorCode::kDuplicateEdge, "duplicate edge {" + a + "," + b + "}"});
      continue;
    }
    g.edges_.emplace_back(key.first, key.second);
  }
  std::sort(g.edges_.begin(), g.edges_.end());
  for (EdgeIndex e = 0; e < g.edges_.size(); ++e) {
    auto [u, v] = g.edges_[e];
    g.adjacency_[u].push_back({v, e});
    g.adjacency_[v].push_back({u, e});
  }
  for (auto& list : g.adjacency_) {
    std::sort(list.begin(), list.end(),
              [](const Neighbor& x, const Neighbor& y) { return x.node < y.node; });
  }
  if (!errors.empty()) return errors;
  return g;
}

/// Convenience for code paths that treat validation failure as exceptional.
inline MarketGraph make_market(const RawMarket& raw) {
  auto result = validate_market(raw);
  if (auto* errors = std::get_if<std::vector<MarketError>>(&result)) {
    throw Error(errors->front().code, errors->front().message);
  }
  return std::get<MarketGraph>(std::move(result));
}

/// Amount d_ij sent over each directed arc. Indexed by MarketGraph::arc.
class Allocation {
 public:
  Allocation() = default;
  explicit Allocation(const MarketGraph& market) : amounts_(2 * market.edge_count(), Rational(0)) {}

  std::size_t arc_count() const noexcept { return amounts_.size(); }

  const Rational& at(const MarketGraph& g, NodeIndex from, NodeIndex to) const {
    return amounts_.at(g.arc(from, to));
  }
  void set(const MarketGraph& g, NodeIndex from, NodeIndex to, Rational value) {
    amounts_.at(g.arc(from, to)) = std::move(value);
  }
  void add(const MarketGraph& g, NodeIndex from, NodeIndex to, const Rational& delta) {
    amounts_.at(g.arc(from, to)) += delta;
  }

  const Rational& arc_amount(std::size_t arc) const { return amounts_.at(arc); }
  Rational& arc_amount(std::size_t arc) { return amounts_.at(arc); }

  Rational sent(const MarketGraph& g, NodeIndex i) const {
    Rational total = 0;
    for (const auto& nb : g.neighbors(i)) total += amounts_[2 * nb.edge + (i < nb.node ? 0 : 1)];
    return total;
  }

  Rational received(const MarketGraph& g, NodeIndex i) const {
    Rational total = 0;
    for (const auto& nb : g.neighbors(i)) total += amounts_[2 * nb.edge + (nb.node < i ? 0 : 1)];
    return total;
  }

  friend bool operator==(const Allocation& a, const Allocation& b) { return a.amounts_ == b.amounts_; }

 private:
  std::vector<Rational> amounts_;
};

/// Problems that make an allocation unusable for `market`. Empty when the
/// allocation is nonnegative and every non-isolated node sends exactly D_i.
inline std::vector<std::string> allocation_issues(const MarketGraph& g, const Allocation& d) {
  std::vector<std::string> issues;
  if (d.arc_count() != 2 * g.edge_count()) {
    issues.push_back("allocation has " + std::to_string(d.arc_count()) + " arcs, market has " +
                     std::to_string(2 * g.edge_count()));
    return issues;
  }
  for (std::size_t a = 0; a < d.arc_count(); ++a) {
    if (d.arc_amount(a) < 0) {
      auto [u, v] = g.arc_endpoints(a);
      issues.push_back("negative amount on " + g.id(u) + "->" + g.id(v));
    }
  }
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (g.is_isolated(i)) continue;
    Rational s = d.sent(g, i);
    if (s != g.endowment(i)) {
      issues.push_back("node '" + g.id(i) + "' sends " + to_string(s) + " but has endowment " +
                       to_string(g.endowment(i)));
    }
  }
  return issues;
}

inline void require_valid(const MarketGraph& g, const Allocation& d) {
  auto issues = allocation_issues(g, d);
  if (!issues.empty()) throw Error(ErrorCode::kAllocationMismatch, issues.front());
}

struct ReceivedVector {
  std::vector<Rational> values;
  const Rational& operator[](NodeIndex i) const { return values.at(i); }
  friend bool operator==(const ReceivedVector&, const ReceivedVector&) = default;
};

struct RatioVector {
  std::vector<Rational> values;
  const Rational& operator[](NodeIndex i) const { return values.at(i); }
  friend bool operator==(const RatioVector&, const RatioVector&) = default;
};

inline ReceivedVector received_vector(const MarketGraph& g, const Allocation& d) {
  require_valid(g, d);
  ReceivedVector r;
  r.values.reserve(g.size());
  for (NodeIndex i = 0; i < g.size(); ++i) r.values.push_back(d.received(g, i));
  return r;
}

inline RatioVector ratio_vector(const MarketGraph& g, const ReceivedVector& r) {
  if (r.values.size() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "received vector size differs from node count");
  }
  RatioVector rho;
  rho.values.reserve(g.size());
  for (NodeIndex i = 0; i < g.size(); ++i) {
    rho.values.push_back(g.is_isolated(i) ? Rational(0) : Rational(r[i] / g.endowment(i)));
  }
  return rho;
}

struct FlowSummary {
  Rational in_flow;
  Rational out_flow;
};

inline std::vector<bool> membership(std::size_t n, std::span<const NodeIndex> set) {
  std::vector<bool> mask(n, false);
  for (NodeIndex i : set) {
    if (i >= n) throw Error(ErrorCode::kUnknownNode, "node index " + std::to_string(i) + " out of range");
    mask[i] = true;
  }
  return mask;
}

/// In(S): what S receives from outside; Out(S): what S sends outside.
inline FlowSummary in_out(const MarketGraph& g, const Allocation& d, std::span<const NodeIndex> set) {
  auto in_set = membership(g.size(), set);
  FlowSummary s{0, 0};
  for (NodeIndex i : set) {
    for (const auto& nb : g.neighbors(i)) {
      if (in_set[nb.node]) continue;
      s.in_flow += d.at(g, nb.node, i);
      s.out_flow += d.at(g, i, nb.node);
    }
  }
  return s;
}

struct ConservationReport {
  bool holds = true;
  Rational received_plus_out;   // sum_S r_i + Out(S)
  Rational endowment_plus_in;   // sum_S D_i + In(S)
  bool out_bounded = true;      // Out(S) <= sum_S D_i
  bool in_bounded = true;       // In(S) <= sum_S r_i
  std::vector<std::string> violations;
};

/// Checks sum_S r + Out(S) = sum_S D + In(S) and the two flow bounds for a
/// node set. Works on any nonnegative allocation; a mismatch means the
/// allocation does not satisfy full-endowment allocation on S.
inline ConservationReport conservation_check(const MarketGraph& g, const Allocation& d,
                                             std::span<const NodeIndex> set) {
  ConservationReport rep;
  auto flows = in_out(g, d, set);
  Rational received = 0;
  Rational endowment = 0;
  for (NodeIndex i : set) {
    received += d.received(g, i);
    if (!g.is_isolated(i)) endowment += g.endowment(i);
  }
  rep.received_plus_out = received + flows.out_flow;
  rep.endowment_plus_in = endowment + flows.in_flow;
  if (rep.received_plus_out != rep.endowment_plus_in) {
    rep.holds = false;
    rep.violations.push_back("sum r + Out = " + to_string(rep.received_plus_out) + " but sum D + In = " +
                             to_string(rep.endowment_plus_in));
  }
  if (flows.out_flow > endowment) {
    rep.out_bounded = false;
    rep.holds = false;
    rep.violations.push_back("Out(S) exceeds sum of endowments");
  }
  if (flows.in_flow > received) {
    rep.in_bounded = false;
    rep.holds = false;
    rep.violations.push_back("In(S) exceeds sum of received");
  }
  return rep;
}

/// N(S): neighbors of S outside S, restricted to `within` when given.
inline NodeSet outside_neighbors(const MarketGraph& g, std::span<const NodeIndex> set,
                                 const std::vector<bool>* within = nullptr) {
  auto in_set = membership(g.size(), set);
  std::vector<bool> hit(g.size(), false);
  for (NodeIndex i : set) {
    for (const auto& nb : g.neighbors(i)) {
      if (in_set[nb.node]) continue;
      if (within && !(*within)[nb.node]) continue;
      hit[nb.node] = true;
    }
  }
  NodeSet out;
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (hit[i]) out.push_back(i);
  }
  return out;
}

inline bool is_independent(const MarketGraph& g, std::span<const NodeIndex> set) {
  auto in_set = membership(g.size(), set);
  for (NodeIndex i : set) {
    for (const auto& nb : g.neighbors(i)) {
      if (in_set[nb.node]) return false;
    }
  }
  return true;
}

inline NodeSet set_difference(std::span<const NodeIndex> a, std::span<const NodeIndex> b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

inline NodeSet set_union(std::span<const NodeIndex> a, std::span<const NodeIndex> b) {
  NodeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace fairx

#endif  // FAIRX_MARKET_HPP
