#include <gtest/gtest.h>

#include <random>

#include "builders.hpp"
#include "longtie/error.hpp"
#include "longtie/tie_range.hpp"
#include "oracles.hpp"

using namespace longtie;
using namespace testing_support;

TEST(TieRange, TriangleEdgesHaveRangeTwo) {
  auto g = complete_graph(3);
  for (auto e : g.edges()) EXPECT_EQ(tie_range(g, e.u, e.v), TieRange::exact(2));
}

TEST(TieRange, FourCycleEdgesHaveRangeThree) {
  auto g = cycle_graph(4);
  for (auto e : g.edges()) EXPECT_EQ(tie_range(g, e.u, e.v), TieRange::exact(3));
}

TEST(TieRange, BridgeIsInfinite) {
  auto g = graph_of(4, {{0, 1}, {1, 2}, {1, 3}});
  for (auto e : g.edges()) EXPECT_TRUE(tie_range(g, e.u, e.v).is_infinite());
}

TEST(TieRange, PetersenEdgesAllHaveRangeFour) {
  auto g = petersen();
  ASSERT_EQ(g.num_edges(), 15u);
  for (auto r : tie_range_all(g)) EXPECT_EQ(r.range, TieRange::exact(4));
  for (auto e : g.edges()) EXPECT_EQ(*oracle::distance_without_edge(g, e.u, e.v), 4u);
}

TEST(TieRange, LongCyclesSaturateAtCap) {
  EXPECT_EQ(tie_range(cycle_graph(6), 0, 1), TieRange::exact(5));
  EXPECT_EQ(tie_range(cycle_graph(7), 0, 1), TieRange::at_least(6));
  EXPECT_EQ(tie_range(cycle_graph(40), 0, 1), TieRange::at_least(6));
  EXPECT_EQ(tie_range(cycle_graph(40), 0, 1, kUncapped), TieRange::exact(39));
  EXPECT_EQ(range_bin(tie_range(cycle_graph(7), 0, 1)), RangeBin::R6Plus);
}

TEST(TieRange, MisuseIsRejected) {
  auto g = cycle_graph(5);
  EXPECT_THROW(tie_range(g, 0, 2), InvalidArgument);
  EXPECT_THROW(tie_range(g, 0, 1, 1), InvalidArgument);
  EXPECT_THROW(tie_range(g, 0, 99), InvalidArgument);
}

TEST(TieRange, Encoding) {
  EXPECT_EQ(TieRange::exact(3).to_string(), "3");
  EXPECT_EQ(TieRange::at_least(6).to_string(), "6+");
  EXPECT_EQ(TieRange::infinite().to_string(), "inf");
  EXPECT_STREQ(bin_name(RangeBin::R6Plus), "6+");
  EXPECT_STREQ(bin_name(RangeBin::Infinite), "inf");
}

TEST(TieRange, Classification) {
  EXPECT_EQ(classify(RangeBin::R2), TieClass::Short);
  EXPECT_EQ(classify(RangeBin::R3), TieClass::Mid);
  EXPECT_EQ(classify(RangeBin::R4), TieClass::Mid);
  EXPECT_EQ(classify(RangeBin::R5), TieClass::Long);
  EXPECT_EQ(classify(RangeBin::R6Plus), TieClass::Long);
  EXPECT_FALSE(classify(RangeBin::Infinite).has_value());
}

TEST(TieRangeAll, EmptyGraph) {
  EXPECT_TRUE(tie_range_all(Graph{}).empty());
  EXPECT_TRUE(tie_range_all(Graph::from_edges(10, std::span<const Edge>{})).empty());
}

TEST(TieRangeAll, MatchesOracleOnRandomGraphs) {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 40; ++rep) {
    const NodeIndex n = 5 + static_cast<NodeIndex>(rng() % 60);
    const double p = (1.0 + static_cast<double>(rng() % 8)) / n;
    auto g = gnp(n, p, rng());
    for (std::uint32_t cap : {2u, 3u, 4u, 6u, 9u}) {
      auto all = tie_range_all(g, cap);
      ASSERT_EQ(all.size(), g.num_edges());
      for (const auto& r : all) ASSERT_EQ(r.range, oracle::tie_range(g, r.edge.u, r.edge.v, cap)) << "cap " << cap;
    }
  }
}

TEST(TieRangeAll, RangeTwoIffCommonNeighbor) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = gnp(50, 0.08, seed);
    for (const auto& r : tie_range_all(g))
      EXPECT_EQ(r.range == TieRange::exact(2), common_neighbor_count(g, r.edge.u, r.edge.v) > 0);
  }
}

TEST(TieRangeAll, AddingAnEdgeNeverIncreasesRange) {
  std::mt19937_64 rng(8);
  for (int rep = 0; rep < 30; ++rep) {
    auto g = gnp(30, 0.1, rng());
    auto before = tie_range_all(g, kUncapped);
    auto edges = g.edges();
    NodeIndex a = rng() % 30, b = rng() % 30;
    if (a == b || g.has_edge(a, b)) continue;
    edges.push_back(make_edge(a, b));
    auto h = Graph::from_edges(30, std::span<const Edge>(edges));
    auto after = tie_range_all(h, kUncapped);
    for (const auto& r : before) {
      auto it = std::find_if(after.begin(), after.end(), [&](const RangedEdge& x) { return x.edge == r.edge; });
      ASSERT_NE(it, after.end());
      EXPECT_LE(it->range.distance, r.range.distance);
    }
  }
}

TEST(TieRangeAll, IndependentOfThreadCount) {
  auto g = gnp(400, 0.01, 77);
  auto one = tie_range_all(g, kDefaultCap, 1);
  auto four = tie_range_all(g, kDefaultCap, 4);
  ASSERT_EQ(one.size(), four.size());
  for (std::size_t k = 0; k < one.size(); ++k) {
    EXPECT_EQ(one[k].edge, four[k].edge);
    EXPECT_EQ(one[k].range, four[k].range);
  }
}

TEST(TieRangeAll, BridgesMatchInfiniteRanges) {
  auto g = gnp(80, 0.03, 4);
  auto flags = find_bridges(g);
  for (const auto& r : tie_range_all(g)) {
    const bool bridge = flags[static_cast<std::size_t>(g.find(r.edge.u, r.edge.v))] != 0;
    EXPECT_EQ(bridge, !oracle::distance_without_edge(g, r.edge.u, r.edge.v).has_value());
  }
}

TEST(RangeDistribution, KFourIsAllRangeTwo) {
  auto d = range_distribution(complete_graph(4));
  EXPECT_EQ(d.total, 6u);
  EXPECT_EQ(d.counts[bin_index(RangeBin::R2)], 6u);
  EXPECT_DOUBLE_EQ(d.proportions[bin_index(RangeBin::R2)], 1.0);
}

TEST(RangeDistribution, CountsMatchOracleRecount) {
  auto g = gnp(120, 0.025, 31);
  auto d = range_distribution(g);
  std::array<std::size_t, kNumRangeBins> expect{};
  for (auto e : g.edges()) ++expect[bin_index(range_bin(oracle::tie_range(g, e.u, e.v, kDefaultCap)))];
  EXPECT_EQ(d.counts, expect);
  EXPECT_EQ(d.total, g.num_edges());
  double sum = 0.0;
  for (double p : d.proportions) sum += p;
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(DropRandom, FloorRuleAndDeterminism) {
  auto g = gnp(40, 0.15, 1);
  std::vector<Edge> es = g.edges();
  es.resize(100);
  auto h = Graph::from_edges(40, std::span<const Edge>(es));
  ASSERT_EQ(h.num_edges(), 100u);
  auto dropped = drop_random(h, 0.05, DropTarget::Edges, 9);
  EXPECT_EQ(dropped.num_edges(), 95u);
  EXPECT_TRUE(dropped == drop_random(h, 0.05, DropTarget::Edges, 9));
  EXPECT_TRUE(h == drop_random(h, 0.009, DropTarget::Edges, 9));
  EXPECT_EQ(dropped.num_nodes(), h.num_nodes());
  for (auto e : dropped.edges()) EXPECT_TRUE(h.has_edge(e.u, e.v));
}

TEST(DropRandom, NodeDropRemovesIncidentEdges) {
  auto g = gnp(60, 0.1, 2);
  auto gone = sample_drop_set(60, 0.1, 5);
  ASSERT_EQ(gone.size(), 6u);
  auto h = drop_random(g, 0.1, DropTarget::Nodes, 5);
  for (auto x : gone) EXPECT_EQ(h.degree(static_cast<NodeIndex>(x)), 0u);
  std::size_t kept = 0;
  for (auto e : g.edges())
    if (!std::binary_search(gone.begin(), gone.end(), e.u) && !std::binary_search(gone.begin(), gone.end(), e.v)) {
      ++kept;
      EXPECT_TRUE(h.has_edge(e.u, e.v));
    }
  EXPECT_EQ(h.num_edges(), kept);
  EXPECT_THROW(drop_random(g, 0.0, DropTarget::Nodes, 1), InvalidArgument);
  EXPECT_THROW(drop_random(g, 1.0, DropTarget::Nodes, 1), InvalidArgument);
}

TEST(DropRandom, SampleIsRoughlyUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t s = 0; s < 4000; ++s)
    for (auto k : sample_drop_set(20, 0.25, s)) ++hits[k];
  for (int h : hits) EXPECT_NEAR(h, 1000, 150);
}
