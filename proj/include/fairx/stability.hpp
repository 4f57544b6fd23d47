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

#ifndef FAIRX_STABILITY_HPP
#define FAIRX_STABILITY_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairx/market.hpp"
#include "fairx/maxmin_flow.hpp"

namespace fairx {

enum class StabilityMode { kStrong, kWeak };

inline constexpr std::size_t kDefaultCoalitionCap = 16;

/// A coalition S and the edges of its induced subgraph.
struct Coalition {
  NodeSet members;
  std::vector<std::pair<NodeIndex, NodeIndex>> edges;
};

inline Coalition make_coalition(const MarketGraph& g, NodeSet members) {
  Coalition c;
  auto in_s = membership(g.size(), members);
  for (const auto& [u, v] : g.edges()) {
    if (in_s[u] && in_s[v]) c.edges.emplace_back(u, v);
  }
  c.members = std::move(members);
  return c;
}

/// A deviation: an allocation on G_S and what it gives the members.
struct Improvement {
  Allocation allocation;     // nonzero only on edges of G_S
  ReceivedVector received;   // entries outside S are 0
};

struct StabilityVerdict {
  StabilityMode mode = StabilityMode::kStrong;
  bool stable = true;
  std::optional<Coalition> blocking;
  std::optional<Improvement> improvement;
  std::size_t coalitions_checked = 0;
};

/// Finds an allocation on G_S that is at least as good as `baseline` for
/// every member and strictly better for one (strong mode), or strictly
/// better for all (weak mode). Members with no neighbor inside S receive 0.
inline std::optional<Improvement> coalition_improvement(const MarketGraph& g, std::span<const NodeIndex> members,
                                                        const ReceivedVector& baseline,
                                                        StabilityMode mode = StabilityMode::kStrong) {
  if (members.empty()) throw Error(ErrorCode::kUnknownNode, "empty coalition");
  if (baseline.values.size() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "baseline size differs from node count");
  }
  auto in_s = membership(g.size(), members);
  NodeSet active;
  for (NodeIndex i : members) {
    bool linked = false;
    for (const auto& nb : g.neighbors(i)) linked = linked || in_s[nb.node];
    if (linked) {
      active.push_back(i);
    } else if (mode == StabilityMode::kWeak || baseline[i] > 0) {
      return std::nullopt;
    }
  }
  if (active.empty()) return std::nullopt;

  // Internal totals are fixed: what the active members receive sums to
  // what they own.
  Rational owned = g.total_endowment(active);
  Rational wanted = 0;
  for (NodeIndex i : active) wanted += baseline[i];
  if (owned <= wanted) return std::nullopt;

  std::vector<Rational> base;
  base.reserve(active.size());
  for (NodeIndex i : active) base.push_back(baseline[i]);

  Allocation witness;
  if (mode == StabilityMode::kStrong) {
    auto check = check_demands(g, active, base);
    if (!check.feasible) return std::nullopt;
    witness = std::move(check.witness);
  } else {
    std::vector<Rational> weight;
    weight.reserve(active.size());
    for (NodeIndex i : active) weight.push_back(g.endowment(i));
    auto lift = maximize_lift(g, active, base, weight, true);
    if (!lift.feasible || lift.value <= 0) return std::nullopt;
    witness = std::move(lift.witness);
  }
  Improvement imp;
  imp.received.values.assign(g.size(), Rational(0));
  for (NodeIndex i : active) imp.received.values[i] = witness.received(g, i);
  imp.allocation = std::move(witness);
  return imp;
}

namespace detail {

// Visits subsets by increasing size, then lexicographically; stops when
// `visit` returns true.
template <typename Visit>
void for_each_subset(std::size_t n, Visit&& visit) {
  std::vector<NodeIndex> pick;
  for (std::size_t k = 1; k <= n; ++k) {
    pick.resize(k);
    for (std::size_t m = 0; m < k; ++m) pick[m] = m;
    while (true) {
      if (visit(pick)) return;
      std::size_t m = k;
      while (m > 0 && pick[m - 1] == n - k + (m - 1)) --m;
      if (m == 0) break;
      ++pick[m - 1];
      for (std::size_t t = m; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
}

inline StabilityVerdict stability_check(const MarketGraph& g, const ReceivedVector& r, StabilityMode mode,
                                        std::size_t cap) {
  if (g.size() > cap) {
    throw Error(ErrorCode::kInstanceTooLarge,
                std::to_string(g.size()) + " nodes exceed the coalition cap of " + std::to_string(cap));
  }
  if (r.values.size() != g.size()) throw Error(ErrorCode::kDimensionMismatch, "received vector size differs");
  StabilityVerdict verdict;
  verdict.mode = mode;
  for_each_subset(g.size(), [&](const std::vector<NodeIndex>& members) {
    ++verdict.coalitions_checked;
    auto imp = coalition_improvement(g, members, r, mode);
    if (!imp) return false;
    verdict.stable = false;
    verdict.blocking = make_coalition(g, members);
    verdict.improvement = std::move(imp);
    return true;
  });
  return verdict;
}

}  // namespace detail

/// No coalition can make one member strictly better off without making
/// another worse off. Enumerates all 2^N - 1 coalitions (grand coalition
/// included, which also certifies Pareto efficiency).
inline StabilityVerdict strong_stability_check(const MarketGraph& g, const ReceivedVector& r,
                                               std::size_t cap = kDefaultCoalitionCap) {
  return detail::stability_check(g, r, StabilityMode::kStrong, cap);
}

/// Core membership: no coalition can make every member strictly better off.
inline StabilityVerdict weak_stability_check(const MarketGraph& g, const ReceivedVector& r,
                                             std::size_t cap = kDefaultCoalitionCap) {
  return detail::stability_check(g, r, StabilityMode::kWeak, cap);
}

}  // namespace fairx

#endif  // FAIRX_STABILITY_HPP
