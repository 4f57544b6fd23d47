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

namespace fairx::testing {
namespace {

ErrorCode first_error(const RawMarket& raw) {
  auto res = validate_market(raw);
  auto* errors = std::get_if<std::vector<MarketError>>(&res);
  if (!errors) ADD_FAILURE() << "market unexpectedly valid";
  return errors ? errors->front().code : ErrorCode::kParse;
}

TEST(ParseRational, AcceptsFractionsDecimalsAndExponents) {
  EXPECT_EQ(q("10/3"), Rational(10, 3));
  EXPECT_EQ(q("6/4"), Rational(3, 2));
  EXPECT_EQ(q("6/4").get_den(), 2);
  EXPECT_EQ(q("-2"), Rational(-2));
  EXPECT_EQ(q("0.5"), Rational(1, 2));
  EXPECT_EQ(q("2.5e-1"), Rational(1, 4));
  EXPECT_EQ(q("1e2"), Rational(100));
  EXPECT_EQ(q(" 7 "), Rational(7));
}

TEST(ParseRational, RejectsMalformedText) {
  for (const char* bad : {"", "abc", "1/0", "1/-2", "1.2.3", "--1", "3/", "/4", "1e"}) {
    try {
      parse_rational(bad);
      ADD_FAILURE() << "accepted '" << bad << "'";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kParse) << bad;
    }
  }
}

TEST(ParseRational, RenderingRoundTrips) {
  for (const char* text : {"10/3", "-7/2", "0", "494/25", "250/247"}) {
    EXPECT_EQ(to_string(q(text)), text);
    EXPECT_EQ(q(to_string(q(text)).c_str()), q(text));
  }
}

TEST(ValidateMarket, MinimalTwoNodeMarket) {
  auto g = market({{"1", "10"}, {"2", "30"}}, {{"1", "2"}});
  EXPECT_EQ(g.size(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.adjacent(0, 1));
  EXPECT_EQ(g.id(1), "2");
}

TEST(ValidateMarket, RejectsNonPositiveEndowment) {
  RawMarket raw{{{"1", 0}, {"2", 1}}, {{"1", "2"}}};
  EXPECT_EQ(first_error(raw), ErrorCode::kNonPositiveEndowment);
  raw.nodes[0].endowment = -3;
  EXPECT_EQ(first_error(raw), ErrorCode::kNonPositiveEndowment);
}

TEST(ValidateMarket, RejectsStructuralErrors) {
  EXPECT_EQ(first_error({{{"1", 1}, {"2", 1}}, {{"1", "1"}}}), ErrorCode::kSelfLoop);
  EXPECT_EQ(first_error({{{"1", 1}, {"2", 1}}, {{"1", "2"}, {"2", "1"}}}), ErrorCode::kDuplicateEdge);
  EXPECT_EQ(first_error({{{"1", 1}, {"1", 2}}, {}}), ErrorCode::kDuplicateNode);
  EXPECT_EQ(first_error({{{"1", 1}, {"2", 1}}, {{"1", "9"}}}), ErrorCode::kUnknownNode);
}

TEST(ValidateMarket, ReportsEveryProblem) {
  RawMarket raw{{{"1", 0}, {"2", -1}, {"3", 1}}, {{"3", "3"}}};
  auto res = validate_market(raw);
  ASSERT_TRUE(std::holds_alternative<std::vector<MarketError>>(res));
  EXPECT_EQ(std::get<std::vector<MarketError>>(res).size(), 3u);
  EXPECT_THROW(make_market(raw), Error);
}

TEST(ValidateMarket, IsolatedNodeGetsRatioZero) {
  auto g = market({{"1", "1"}, {"2", "1"}, {"3", "1"}}, {{"1", "2"}});
  EXPECT_TRUE(g.is_isolated(2));
  auto d = flows(g, {{"1", "2", "1"}, {"2", "1", "1"}});
  auto rho = ratio_vector(g, received_vector(g, d));
  EXPECT_EQ(rho[2], 0);
  EXPECT_EQ(rho[0], 1);
}

TEST(ReceivedVector, TwoNodeMarket) {
  auto g = fixture_market("two_node");
  auto d = flows(g, {{"a", "b", "10"}, {"b", "a", "30"}});
  auto r = received_vector(g, d);
  EXPECT_EQ(r.values, rationals({"30", "10"}));
}

TEST(ReceivedVector, StarSplitsCenterEvenly) {
  auto g = fixture_market("star");
  auto d = flows(g, {{"x", "hub", "1"},
                     {"y", "hub", "1"},
                     {"z", "hub", "1"},
                     {"hub", "x", "1/3"},
                     {"hub", "y", "1/3"},
                     {"hub", "z", "1/3"}});
  auto r = received_vector(g, d);
  EXPECT_EQ(r.values, rationals({"3", "1/3", "1/3", "1/3"}));
}

TEST(ReceivedVector, RejectsAllocationBreakingFullAllocation) {
  auto g = fixture_market("two_node");
  auto d = flows(g, {{"a", "b", "5"}, {"b", "a", "30"}});
  try {
    received_vector(g, d);
    FAIL() << "accepted partial allocation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAllocationMismatch);
  }
  Allocation wrong_size;
  EXPECT_THROW(received_vector(g, wrong_size), Error);
  EXPECT_THROW(g.arc(0, 0), Error);
}

TEST(ReceivedVector, TotalsMatchEndowmentsOnRandomAllocations) {
  TestRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = make_market(random_market(rng, {1, 9, 1, 100, 35}));
    auto d = random_allocation(rng, g);
    auto r = received_vector(g, d);
    EXPECT_EQ(sum(r.values), g.total_endowment(g.non_isolated()));
    for (NodeIndex i = 0; i < g.size(); ++i) {
      if (g.is_isolated(i)) {
        EXPECT_EQ(r[i], 0);
      }
    }
  }
}

TEST(RatioVector, ExactDivision) {
  auto g = fixture_market("two_node");
  EXPECT_EQ(ratio_vector(g, {rationals({"30", "10"})}).values, rationals({"3", "1/3"}));
  EXPECT_EQ(ratio_vector(g, {rationals({"10", "30"})}).values, rationals({"1", "1"}));
  EXPECT_THROW(ratio_vector(g, {rationals({"1"})}), Error);
}

TEST(RatioVector, SixNodeAllocation) {
  auto g = fixture_market("fig3");
  auto d = flows(g, {{"1", "2", "40"},
                     {"2", "1", "20"},
                     {"3", "4", "10"},
                     {"4", "3", "10"},
                     {"5", "6", "30"},
                     {"6", "5", "60"}});
  EXPECT_EQ(ratio_vector(g, received_vector(g, d)).values, rationals({"1/2", "2", "1", "1", "2", "1/2"}));
}

TEST(InOut, TwoNodeAndWholeMarket) {
  auto g = fixture_market("two_node");
  auto d = flows(g, {{"a", "b", "10"}, {"b", "a", "30"}});
  NodeSet s{0};
  auto f = in_out(g, d, s);
  EXPECT_EQ(f.in_flow, 30);
  EXPECT_EQ(f.out_flow, 10);
  auto all = in_out(g, d, g.all_nodes());
  EXPECT_EQ(all.in_flow, 0);
  EXPECT_EQ(all.out_flow, 0);
  NodeSet bogus{7};
  EXPECT_THROW(in_out(g, d, bogus), Error);
}

TEST(InOut, StarCenter) {
  auto g = fixture_market("star");
  auto d = flows(g, {{"x", "hub", "1"},
                     {"y", "hub", "1"},
                     {"z", "hub", "1"},
                     {"hub", "x", "1/3"},
                     {"hub", "y", "1/3"},
                     {"hub", "z", "1/3"}});
  auto f = in_out(g, d, node_set(g, {"hub"}));
  EXPECT_EQ(f.in_flow, 3);
  EXPECT_EQ(f.out_flow, 1);
}

TEST(InOut, ComplementIdentityOnRandomAllocations) {
  TestRng rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = make_market(random_market(rng, {2, 9, 1, 50, 40}));
    auto d = random_allocation(rng, g);
    auto s = random_subset(rng, g.size());
    auto c = set_difference(g.all_nodes(), s);
    auto fs = in_out(g, d, s);
    auto fc = in_out(g, d, c);
    EXPECT_EQ(fs.in_flow, fc.out_flow);
    EXPECT_EQ(fs.out_flow, fc.in_flow);
  }
}

TEST(Conservation, HoldsForEverySubsetOfRandomAllocations) {
  TestRng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = make_market(random_market(rng, {1, 7, 1, 100, 40}));
    auto d = random_allocation(rng, g);
    for (std::uint32_t mask = 0; mask < (1u << g.size()); ++mask) {
      NodeSet s;
      for (NodeIndex i = 0; i < g.size(); ++i) {
        if (mask & (1u << i)) s.push_back(i);
      }
      auto rep = conservation_check(g, d, s);
      ASSERT_TRUE(rep.holds) << rep.violations.front();
      EXPECT_EQ(rep.received_plus_out, rep.endowment_plus_in);
    }
  }
}

TEST(Conservation, StarLeavesSendEverythingOut) {
  auto g = fixture_market("star");
  auto d = flows(g, {{"x", "hub", "1"},
                     {"y", "hub", "1"},
                     {"z", "hub", "1"},
                     {"hub", "x", "1/3"},
                     {"hub", "y", "1/3"},
                     {"hub", "z", "1/3"}});
  auto leaves = node_set(g, {"x", "y", "z"});
  auto rep = conservation_check(g, d, leaves);
  EXPECT_TRUE(rep.holds);
  EXPECT_EQ(in_out(g, d, leaves).out_flow, g.total_endowment(leaves));
}

TEST(Conservation, CorruptedAllocationIsReported) {
  auto g = fixture_market("two_node");
  auto d = flows(g, {{"a", "b", "5"}, {"b", "a", "30"}});
  auto rep = conservation_check(g, d, NodeSet{0});
  EXPECT_FALSE(rep.holds);
  EXPECT_EQ(rep.received_plus_out, 35);
  EXPECT_EQ(rep.endowment_plus_in, 40);
  EXPECT_FALSE(rep.violations.empty());
}

TEST(LexCompare, Examples) {
  EXPECT_EQ(lex_compare(RatioVector{rationals({"1", "2"})}, RatioVector{rationals({"2", "1"})}), LexOrder::kEqual);
  EXPECT_EQ(lex_compare(RatioVector{rationals({"1/2", "2"})}, RatioVector{rationals({"1", "1"})}), LexOrder::kLess);
  EXPECT_EQ(lex_compare(RatioVector{rationals({"1", "1", "2"})}, RatioVector{rationals({"1", "1", "1"})}),
            LexOrder::kGreater);
  EXPECT_THROW(lex_compare(RatioVector{rationals({"1"})}, RatioVector{rationals({"1", "1"})}), Error);
}

TEST(LexCompare, TotalPreorderOnRandomVectors) {
  TestRng rng(14);
  auto draw = [&] {
    RatioVector v;
    for (int k = 0; k < 4; ++k) v.values.emplace_back(rng.between(0, 5), rng.between(1, 3));
    for (auto& x : v.values) x.canonicalize();
    return v;
  };
  auto flip = [](LexOrder o) {
    return o == LexOrder::kLess ? LexOrder::kGreater : o == LexOrder::kGreater ? LexOrder::kLess : o;
  };
  for (int trial = 0; trial < 500; ++trial) {
    auto x = draw();
    auto y = draw();
    auto z = draw();
    EXPECT_EQ(lex_compare(x, x), LexOrder::kEqual);
    EXPECT_EQ(lex_compare(x, y), flip(lex_compare(y, x)));
    if (lex_compare(x, y) != LexOrder::kGreater && lex_compare(y, z) != LexOrder::kGreater) {
      EXPECT_NE(lex_compare(x, z), LexOrder::kGreater);
    }
    auto sx = x.values;
    auto sy = y.values;
    std::sort(sx.begin(), sx.end());
    std::sort(sy.begin(), sy.end());
    EXPECT_EQ(lex_compare(x, y) == LexOrder::kEqual, sx == sy);
  }
}

TEST(LevelDecomposition, TwoNode) {
  auto g = fixture_market("two_node");
  auto dec = level_decomposition(g, {rationals({"3", "1/3"})});
  EXPECT_EQ(dec.K(), 2u);
  EXPECT_EQ(dec.level_sets[0], NodeSet{1});
  EXPECT_EQ(dec.level_sets[1], NodeSet{0});
}

TEST(LevelDecomposition, AllOnes) {
  auto g = triangle();
  auto dec = level_decomposition(g, {rationals({"1", "1", "1"})});
  EXPECT_EQ(dec.K(), 1u);
  EXPECT_EQ(dec.level_sets[0], g.all_nodes());
  EXPECT_EQ(dec.groups.size(), 1u);
}

TEST(LevelDecomposition, SixNodeLevelsAndGroups) {
  auto g = fixture_market("fig3");
  auto dec = level_decomposition(g, {rationals({"1/2", "2", "1", "1", "2", "1/2"})});
  ASSERT_EQ(dec.K(), 3u);
  EXPECT_EQ(dec.levels, rationals({"1/2", "1", "2"}));
  EXPECT_EQ(dec.level_sets[0], node_set(g, {"1", "6"}));
  EXPECT_EQ(dec.level_sets[1], node_set(g, {"3", "4"}));
  EXPECT_EQ(dec.level_sets[2], node_set(g, {"2", "5"}));
  ASSERT_EQ(dec.groups.size(), 2u);
  EXPECT_EQ(dec.groups[0], node_set(g, {"1", "6", "2", "5"}));
  EXPECT_EQ(dec.groups[1], node_set(g, {"3", "4"}));
  ASSERT_EQ(dec.peeled.size(), 2u);
  EXPECT_EQ(dec.peeled[0], g.all_nodes());
  EXPECT_EQ(dec.peeled[1], node_set(g, {"3", "4"}));
  EXPECT_EQ(*dec.level_of[3], 1u);
}

TEST(LevelDecomposition, SkipsIsolatedNodes) {
  auto g = market({{"1", "1"}, {"2", "1"}, {"3", "1"}}, {{"1", "2"}});
  auto dec = level_decomposition(g, {rationals({"1", "1", "0"})});
  EXPECT_EQ(dec.K(), 1u);
  EXPECT_FALSE(dec.level_of[2].has_value());
}

TEST(LevelBounds, HoldOnRandomSolvedMarkets) {
  TestRng rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = make_market(random_connected(rng, {2, 8, 1, 60, 30}));
    auto dec = solve_lex_optimal(g).decomposition;
    if (dec.K() == 1) {
      EXPECT_EQ(dec.levels[0], 1);
    } else {
      EXPECT_LT(dec.levels.front(), 1);
      EXPECT_GT(dec.levels.back(), 1);
    }
  }
}

}  // namespace
}  // namespace fairx::testing
