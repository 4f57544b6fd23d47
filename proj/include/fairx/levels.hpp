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

#ifndef FAIRX_LEVELS_HPP
#define FAIRX_LEVELS_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include "fairx/market.hpp"

namespace fairx {

enum class LexOrder { kLess, kEqual, kGreater };

/// Compares the ascending-sorted copies of two vectors; the first differing
/// component decides.
inline LexOrder lex_compare(std::span<const Rational> x, std::span<const Rational> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "lex_compare on vectors of different length");
  }
  std::vector<Rational> sx(x.begin(), x.end());
  std::vector<Rational> sy(y.begin(), y.end());
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  for (std::size_t k = 0; k < sx.size(); ++k) {
    if (sx[k] < sy[k]) return LexOrder::kLess;
    if (sx[k] > sy[k]) return LexOrder::kGreater;
  }
  return LexOrder::kEqual;
}

inline LexOrder lex_compare(const RatioVector& x, const RatioVector& y) {
  return lex_compare(std::span<const Rational>(x.values), std::span<const Rational>(y.values));
}

/// Distinct ratio levels of the non-isolated nodes and the sets derived from
/// them. Level numbers are 0-based here (level 0 is the lowest).
struct LevelDecomposition {
  std::vector<Rational> levels;              // strictly increasing
  std::vector<NodeSet> level_sets;           // level_sets[k] = {i : rho_i = levels[k]}
  std::vector<std::optional<std::size_t>> level_of;  // nullopt for isolated nodes
  std::vector<NodeSet> peeled;               // peeled[k] = N minus the k outer level pairs, k < ceil(K/2)
  std::vector<NodeSet> groups;               // groups[k] = L_k u L_{K-1-k}; middle level alone when K odd

  std::size_t K() const noexcept { return levels.size(); }

  /// Index of the level paired with k (K-1-k).
  std::size_t partner(std::size_t k) const noexcept { return levels.size() - 1 - k; }
};

inline LevelDecomposition level_decomposition(const MarketGraph& g, const RatioVector& rho) {
  if (rho.values.size() != g.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "ratio vector size differs from node count");
  }
  LevelDecomposition dec;
  dec.level_of.assign(g.size(), std::nullopt);
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (!g.is_isolated(i)) dec.levels.push_back(rho[i]);
  }
  std::sort(dec.levels.begin(), dec.levels.end());
  dec.levels.erase(std::unique(dec.levels.begin(), dec.levels.end()), dec.levels.end());
  dec.level_sets.assign(dec.levels.size(), {});
  for (NodeIndex i = 0; i < g.size(); ++i) {
    if (g.is_isolated(i)) continue;
    auto it = std::lower_bound(dec.levels.begin(), dec.levels.end(), rho[i]);
    auto k = static_cast<std::size_t>(it - dec.levels.begin());
    dec.level_of[i] = k;
    dec.level_sets[k].push_back(i);
  }

  const std::size_t K = dec.K();
  NodeSet remaining = g.non_isolated();
  for (std::size_t k = 0; k < (K + 1) / 2; ++k) {
    dec.peeled.push_back(remaining);
    remaining = set_difference(remaining, dec.level_sets[k]);
    if (dec.partner(k) != k) remaining = set_difference(remaining, dec.level_sets[dec.partner(k)]);
  }
  for (std::size_t k = 0; k < K / 2; ++k) {
    dec.groups.push_back(set_union(dec.level_sets[k], dec.level_sets[dec.partner(k)]));
  }
  if (K % 2 == 1) dec.groups.push_back(dec.level_sets[K / 2]);
  return dec;
}

}  // namespace fairx

#endif  // FAIRX_LEVELS_HPP
