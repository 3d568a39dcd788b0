#include "longtie/graph.hpp"

#include <algorithm>

#include "longtie/error.hpp"

namespace longtie {

Graph Graph::from_edges(NodeIndex num_nodes, std::span<const WeightedEdge> edges) {
  std::vector<WeightedEdge> canon;
  canon.reserve(edges.size());
  for (const auto& e : edges) {
    if (e.edge.u == e.edge.v) throw InvalidArgument("self-loop on node " + std::to_string(e.edge.u));
    if (e.edge.u >= num_nodes || e.edge.v >= num_nodes) throw InvalidArgument("edge endpoint out of range");
    canon.push_back({make_edge(e.edge.u, e.edge.v), e.weight});
  }
  std::sort(canon.begin(), canon.end(), [](const auto& a, const auto& b) { return a.edge < b.edge; });
  std::vector<WeightedEdge> merged;
  merged.reserve(canon.size());
  for (const auto& e : canon) {
    if (!merged.empty() && merged.back().edge == e.edge) {
      merged.back().weight.frequency += e.weight.frequency;
      merged.back().weight.duration += e.weight.duration;
    } else {
      merged.push_back(e);
    }
  }

  Graph g;
  g.offsets_.assign(std::size_t{num_nodes} + 1, 0);
  for (const auto& e : merged) {
    ++g.offsets_[e.edge.u + 1];
    ++g.offsets_[e.edge.v + 1];
  }
  for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
  g.neighbors_.resize(merged.size() * 2);
  g.weights_.resize(merged.size() * 2);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Smaller partners first (edges sorted by u), then larger partners (sorted by v):
  // each list comes out ascending.
  for (const auto& e : merged) {
    auto pv = cursor[e.edge.v]++;
    g.neighbors_[pv] = e.edge.u;
    g.weights_[pv] = e.weight;
  }
  for (const auto& e : merged) {
    auto pu = cursor[e.edge.u]++;
    g.neighbors_[pu] = e.edge.v;
    g.weights_[pu] = e.weight;
  }
  return g;
}

Graph Graph::from_edges(NodeIndex num_nodes, std::span<const Edge> edges) {
  std::vector<WeightedEdge> w;
  w.reserve(edges.size());
  for (auto e : edges) w.push_back({e, EdgeWeight{1, 0}});
  auto g = from_edges(num_nodes, w);
  // Duplicate unweighted edges should not accumulate frequency.
  for (auto& x : g.weights_) x.frequency = 1;
  return g;
}

std::ptrdiff_t Graph::find(NodeIndex x, NodeIndex y) const {
  auto nb = neighbors(x);
  auto it = std::lower_bound(nb.begin(), nb.end(), y);
  if (it == nb.end() || *it != y) return -1;
  return static_cast<std::ptrdiff_t>(offsets_[x] + (it - nb.begin()));
}

EdgeWeight Graph::weight(NodeIndex x, NodeIndex y) const {
  auto p = find(x, y);
  return p < 0 ? EdgeWeight{} : weights_[static_cast<std::size_t>(p)];
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (NodeIndex x = 0; x < num_nodes(); ++x)
    for (auto y : neighbors(x))
      if (x < y) out.push_back({x, y});
  return out;
}

std::vector<WeightedEdge> Graph::weighted_edges() const {
  std::vector<WeightedEdge> out;
  out.reserve(num_edges());
  for (NodeIndex x = 0; x < num_nodes(); ++x) {
    auto nb = neighbors(x);
    auto w = weights(x);
    for (std::size_t k = 0; k < nb.size(); ++k)
      if (x < nb[k]) out.push_back({{x, nb[k]}, w[k]});
  }
  return out;
}

std::size_t common_neighbor_count(const Graph& g, NodeIndex a, NodeIndex b) {
  auto na = g.neighbors(a), nb = g.neighbors(b);
  std::size_t i = 0, j = 0, n = 0;
  while (i < na.size() && j < nb.size()) {
    if (na[i] < nb[j]) ++i;
    else if (nb[j] < na[i]) ++j;
    else { ++n; ++i; ++j; }
  }
  return n;
}

std::vector<NodeIndex> common_neighbors(const Graph& g, NodeIndex a, NodeIndex b) {
  auto na = g.neighbors(a), nb = g.neighbors(b);
  std::vector<NodeIndex> out;
  std::set_intersection(na.begin(), na.end(), nb.begin(), nb.end(), std::back_inserter(out));
  return out;
}

}  // namespace longtie
