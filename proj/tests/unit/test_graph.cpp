#include <gtest/gtest.h>

#include "builders.hpp"
#include "longtie/error.hpp"
#include "longtie/graph.hpp"

using namespace longtie;
using testing_support::graph_of;

TEST(Graph, EmptyGraphHasNoEdges) {
  Graph g;
  EXPECT_EQ(g.num_nodes(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
  EXPECT_TRUE(g.edges().empty());
}

TEST(Graph, NeighborListsAreSortedAndSymmetric) {
  auto g = graph_of(5, {{3, 1}, {0, 4}, {1, 0}, {4, 3}, {2, 1}});
  EXPECT_EQ(g.num_edges(), 5u);
  for (NodeIndex x = 0; x < 5; ++x) {
    auto nb = g.neighbors(x);
    EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
    for (auto y : nb) EXPECT_TRUE(g.has_edge(y, x));
  }
  EXPECT_EQ(g.degree(1), 3u);
  EXPECT_FALSE(g.has_edge(2, 3));
}

TEST(Graph, DuplicateWeightedEdgesAreSummed) {
  std::vector<WeightedEdge> es{{{0, 1}, {2, 10}}, {{0, 1}, {3, 5}}, {{1, 2}, {1, 1}}};
  auto g = Graph::from_edges(3, es);
  EXPECT_EQ(g.num_edges(), 2u);
  EXPECT_EQ(g.weight(1, 0), (EdgeWeight{5, 15}));
}

TEST(Graph, SelfLoopIsRejected) {
  std::vector<Edge> es{{2, 2}};
  EXPECT_THROW(Graph::from_edges(3, es), InvalidArgument);
}

TEST(Graph, EdgesComeOutOrderedWithUBelowV) {
  auto g = graph_of(4, {{3, 2}, {1, 0}, {2, 0}});
  auto es = g.edges();
  ASSERT_EQ(es.size(), 3u);
  EXPECT_TRUE(std::is_sorted(es.begin(), es.end()));
  for (auto e : es) EXPECT_LT(e.u, e.v);
}

TEST(Graph, CommonNeighbors) {
  auto g = graph_of(5, {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3}, {3, 4}});
  EXPECT_EQ(common_neighbor_count(g, 0, 1), 2u);
  EXPECT_EQ(common_neighbors(g, 0, 1), (std::vector<NodeIndex>{2, 3}));
  EXPECT_EQ(common_neighbor_count(g, 2, 4), 0u);
}
