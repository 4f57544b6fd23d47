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


#include <gtest/gtest.h>

#include "common.hpp"
#include "fairx/oracle/maxmin_programming.hpp"

namespace fairx::testing {
namespace {

Allocation load_alloc(const MarketGraph& g, const std::string& name) { return io::load_allocation(g, fixture(name + ".json")); }

TEST(NeighborCondition, HoldsForSolverOutput) {
  for (const char* name : {"star", "two_node", "fig3", "k4", "complete6", "cycle4", "path4"}) {
    auto g = fixture_market(name);
    EXPECT_TRUE(verify_neighbor_lemma(g, solve_lex_optimal(g).allocation).passed) << name;
  }
}

TEST(NeighborCondition, ChainOnPathFailsAtB) {
  auto g = fixture_market("path4");
  auto v = verify_neighbor_lemma(g, load_alloc(g, "path4_chain_alloc"));
  EXPECT_FALSE(v.passed);
  EXPECT_FALSE(v.detail.empty());
  EXPECT_TRUE(std::binary_search(v.witness.begin(), v.witness.end(), *g.index_of("b")));
}

TEST(NeighborCondition, SingleLevelPasses) {
  auto g = fixture_market("cycle4");
  auto d = load_alloc(g, "cycle4_one_way_alloc");
  EXPECT_EQ(level_decomposition(g, ratio_vector(g, received_vector(g, d))).K(), 1u);
  EXPECT_TRUE(verify_neighbor_lemma(g, d).passed);
}

TEST(StructureCheck, SixNodeExample) {
  auto g = fixture_market("fig3");
  auto rep = verify_theorem1(g, solve_lex_optimal(g).allocation);
  EXPECT_TRUE(rep.all_passed());
  const auto& dec = rep.decomposition;
  ASSERT_EQ(dec.K(), 3u);
  EXPECT_EQ(dec.levels[0] * dec.levels[2], 1);
  EXPECT_EQ(dec.levels[1], 1);
  for (const char* p : {"neighbor_lemma", "independent_bottom", "neighborhood_top", "reciprocal_levels",
                        "balanced_exchange", "level_bounds", "grouping", "flow_isolation"}) {
    ASSERT_NE(rep.find(p), nullptr) << p;
    EXPECT_TRUE(rep.find(p)->passed) << p;
  }
}

TEST(StructureCheck, ChainOnPathFails) {
  auto g = fixture_market("path4");
  auto rep = verify_theorem1(g, load_alloc(g, "path4_chain_alloc"));
  EXPECT_FALSE(rep.all_passed());
  EXPECT_FALSE(rep.find("neighborhood_top")->passed);
  EXPECT_FALSE(rep.find("neighbor_lemma")->passed);
}

TEST(StructureCheck, FeasibleButNotOptimal) {
  auto g = fixture_market("fig3");
  auto d = load_alloc(g, "fig3_bad_alloc");
  EXPECT_TRUE(allocation_issues(g, d).empty());
  EXPECT_FALSE(verify_theorem1(g, d).all_passed());
}

TEST(Groups, SixNodeExampleHasTwo) {
  auto g = fixture_market("fig3");
  auto gs = groups(solve_lex_optimal(g).decomposition);
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_EQ(gs[0].nodes, node_set(g, {"1", "2", "5", "6"}));
  EXPECT_EQ(gs[0].levels, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(gs[1].nodes, node_set(g, {"3", "4"}));
  EXPECT_EQ(gs[1].values, rationals({"1"}));
}

TEST(Groups, SingleLevelIsOneGroup) {
  auto g = triangle();
  auto gs = groups(solve_lex_optimal(g).decomposition);
  ASSERT_EQ(gs.size(), 1u);
  EXPECT_EQ(gs[0].nodes.size(), 3u);
}

TEST(Groups, SixLevelsPairOutsideIn) {
  // Thirteen nodes on six reciprocal levels.
  LevelDecomposition dec;
  dec.levels = rationals({"1/4", "50/117", "10/13", "13/10", "117/50", "4"});
  dec.level_sets = {{11, 12}, {3, 5, 7, 9}, {1}, {0}, {2, 4, 6, 8}, {10}};
  auto gs = groups(dec);
  ASSERT_EQ(gs.size(), 3u);
  EXPECT_EQ(gs[0].nodes, (NodeSet{10, 11, 12}));
  EXPECT_EQ(gs[1].nodes, (NodeSet{2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_EQ(gs[2].nodes, (NodeSet{0, 1}));
  for (const auto& grp : gs) {
    ASSERT_EQ(grp.values.size(), 2u);
    EXPECT_EQ(grp.values[0] * grp.values[1], 1);
  }
}

TEST(RedundantLinks, Fixtures) {
  auto g = fixture_market("fig3");
  auto links = redundant_links(g, solve_lex_optimal(g));
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(g.id(links[0].first), "2");
  EXPECT_EQ(g.id(links[0].second), "4");
  for (const char* name : {"two_node", "star"}) {
    auto h = fixture_market(name);
    EXPECT_TRUE(redundant_links(h, solve_lex_optimal(h)).empty()) << name;
  }
}

TEST(RedundantLinks, RemovingThemKeepsTheRatios) {
  TestRng rng(51);
  for (int trial = 0; trial < 60; ++trial) {
    auto raw = random_connected(rng, {3, 9, 1, 100, 40});
    auto g = make_market(raw);
    auto s = solve_lex_optimal(g);
    auto links = redundant_links(g, s);
    if (links.empty()) continue;
    RawMarket pruned;
    pruned.nodes = raw.nodes;
    for (const auto& [u, v] : g.edges()) {
      if (std::find(links.begin(), links.end(), std::pair{u, v}) == links.end()) pruned.edges.emplace_back(g.id(u), g.id(v));
    }
    EXPECT_EQ(solve_lex_optimal(make_market(pruned)).ratios, s.ratios);
  }
}

TEST(StructureCheck, OtherOptimalAllocationsPass) {
  TestRng rng(52);
  for (int trial = 0; trial < 60; ++trial) {
    auto g = make_market(random_connected(rng, {2, 6, 1, 100, 40}));
    auto alt = oracle::maxmin_programming(g);
    EXPECT_TRUE(verify_theorem1(g, alt.allocation).all_passed());
    EXPECT_EQ(certify_lex_optimal(g, alt.allocation).ratios, solve_lex_optimal(g).ratios);
  }
}

TEST(StructureCheck, PassingAllocationsAreLexOptimal) {
  TestRng rng(53);
  int passing = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto g = make_market(random_connected(rng, {2, 4, 1, 4, 50}));
    auto d = random_allocation(rng, g);
    if (!verify_theorem1(g, d).all_passed()) continue;
    ++passing;
    EXPECT_EQ(ratio_vector(g, received_vector(g, d)), solve_lex_optimal(g).ratios);
  }
  RecordProperty("passing", passing);
}

TEST(CompleteGraphs, AtMostTwoLevels) {
  TestRng rng(54);
  for (int trial = 0; trial < 150; ++trial) {
    auto g = make_market(random_complete(rng, 2, 8, 100));
    auto s = solve_lex_optimal(g);
    NodeIndex heavy = 0;
    for (NodeIndex i = 1; i < g.size(); ++i) {
      if (g.endowment(i) > g.endowment(heavy)) heavy = i;
    }
    Rational rest = g.total_endowment(g.all_nodes()) - g.endowment(heavy);
    const auto& dec = s.decomposition;
    ASSERT_LE(dec.K(), 2u);
    EXPECT_EQ(dec.K() == 2, g.endowment(heavy) > rest);
    if (dec.K() == 2) {
      EXPECT_EQ(dec.level_sets[0], NodeSet{heavy});
      EXPECT_EQ(dec.levels[0], rest / g.endowment(heavy));
    }
  }
}

TEST(CertifyLexOptimal, RejectsNonOptimal) {
  auto g = fixture_market("fig3");
  try {
    certify_lex_optimal(g, load_alloc(g, "fig3_bad_alloc"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotLexOptimalInput);
  }
  auto s = certify_lex_optimal(g, solve_lex_optimal(g).allocation);
  EXPECT_EQ(s.decomposition.K(), 3u);
}

}  // namespace
}  // namespace fairx::testing
