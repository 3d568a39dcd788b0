#pragma once

#include <random>
#include <string>
#include <vector>

#include "longtie/graph.hpp"
#include "longtie/temporal_graph.hpp"

namespace testing_support {

using longtie::Edge;
using longtie::Graph;
using longtie::NodeIndex;

inline Graph graph_of(NodeIndex n, std::initializer_list<std::pair<NodeIndex, NodeIndex>> edges) {
  std::vector<Edge> es;
  for (auto [a, b] : edges) es.push_back(longtie::make_edge(a, b));
  return Graph::from_edges(n, std::span<const Edge>(es));
}

inline Graph complete_graph(NodeIndex n) {
  std::vector<Edge> es;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = i + 1; j < n; ++j) es.push_back({i, j});
  return Graph::from_edges(n, std::span<const Edge>(es));
}

inline Graph cycle_graph(NodeIndex n) {
  std::vector<Edge> es;
  for (NodeIndex i = 0; i < n; ++i) es.push_back(longtie::make_edge(i, (i + 1) % n));
  return Graph::from_edges(n, std::span<const Edge>(es));
}

inline Graph petersen() {
  std::vector<Edge> es;
  for (NodeIndex i = 0; i < 5; ++i) {
    es.push_back(longtie::make_edge(i, (i + 1) % 5));          // outer cycle
    es.push_back(longtie::make_edge(i, i + 5));                // spokes
    es.push_back(longtie::make_edge(5 + i, 5 + (i + 2) % 5));  // inner pentagram
  }
  return Graph::from_edges(10, std::span<const Edge>(es));
}

/// G(n, p) with independent coin flips.
inline Graph gnp(NodeIndex n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<Edge> es;
  for (NodeIndex i = 0; i < n; ++i)
    for (NodeIndex j = i + 1; j < n; ++j)
      if (coin(rng)) es.push_back({i, j});
  return Graph::from_edges(n, std::span<const Edge>(es));
}

/// Random monthly event stream over `nodes` labels. Each directed pair is
/// active in a month with probability `p`; weights are small random integers.
inline std::vector<longtie::InteractionEvent> random_events(int nodes, int months, double p, std::uint64_t seed,
                                                            bool allow_zero_duration = true) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_int_distribution<int> secs(0, 900);
  std::vector<longtie::InteractionEvent> out;
  for (int m = 0; m < months; ++m)
    for (int a = 0; a < nodes; ++a)
      for (int b = 0; b < nodes; ++b) {
        if (a == b || !coin(rng)) continue;
        longtie::InteractionEvent e{"n" + std::to_string(a), "n" + std::to_string(b), m, small(rng), small(rng), 0};
        e.duration_s = e.calls > 0 ? secs(rng) : 0;
        if (!allow_zero_duration && e.calls > 0 && e.duration_s == 0) e.duration_s = 1;
        if (e.calls == 0 && e.texts == 0) e.texts = 1;
        out.push_back(e);
      }
  return out;
}

}  // namespace testing_support
