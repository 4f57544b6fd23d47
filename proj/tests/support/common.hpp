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

#ifndef FAIRX_TESTS_COMMON_HPP
#define FAIRX_TESTS_COMMON_HPP

#include <initializer_list>
#include <string>
#include <tuple>
#include <vector>

#include "fairx/fairx.hpp"
#include "fairx/io.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fairx::testing {

inline Rational q(const char* text) { return parse_rational(text); }

inline MarketGraph fixture_market(const std::string& name) { return io::load_market(fixture(name + ".json")); }

inline NodeSet node_set(const MarketGraph& g, std::initializer_list<const char*> ids) {
  NodeSet s;
  for (const char* id : ids) s.push_back(*g.index_of(id));
  std::sort(s.begin(), s.end());
  return s;
}

inline std::vector<Rational> rationals(std::initializer_list<const char*> values) {
  std::vector<Rational> out;
  for (const char* v : values) out.push_back(q(v));
  return out;
}

inline Allocation flows(const MarketGraph& g,
                        std::initializer_list<std::tuple<const char*, const char*, const char*>> arcs) {
  Allocation d(g);
  for (const auto& [from, to, amount] : arcs) d.set(g, *g.index_of(from), *g.index_of(to), q(amount));
  return d;
}

inline MarketGraph market(std::initializer_list<std::pair<const char*, const char*>> nodes,
                          std::initializer_list<std::pair<const char*, const char*>> edges) {
  RawMarket raw;
  for (const auto& [id, d] : nodes) raw.nodes.push_back({id, q(d)});
  for (const auto& [a, b] : edges) raw.edges.emplace_back(a, b);
  return make_market(raw);
}

/// Triangle with unit endowments.
inline MarketGraph triangle() { return market({{"a", "1"}, {"b", "1"}, {"c", "1"}}, {{"a", "b"}, {"b", "c"}, {"a", "c"}}); }

}  // namespace fairx::testing

#endif  // FAIRX_TESTS_COMMON_HPP
