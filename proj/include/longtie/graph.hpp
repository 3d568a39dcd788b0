#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace longtie {

using NodeIndex = std::uint32_t;

/// Undirected edge with `u < v`.
struct Edge {
  NodeIndex u = 0;
  NodeIndex v = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(NodeIndex a, NodeIndex b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::uint64_t edge_key(Edge e) { return (std::uint64_t{e.u} << 32) | e.v; }
inline Edge edge_from_key(std::uint64_t k) {
  return Edge{static_cast<NodeIndex>(k >> 32), static_cast<NodeIndex>(k & 0xffffffffu)};
}

/// Symmetric edge weights: frequency (calls + texts) and duration (seconds).
struct EdgeWeight {
  std::uint64_t frequency = 0;
  std::uint64_t duration = 0;
  friend bool operator==(const EdgeWeight&, const EdgeWeight&) = default;
};

struct WeightedEdge {
  Edge edge;
  EdgeWeight weight;
};

/// Simple undirected graph in compressed sparse row form. Neighbor lists are
/// sorted and free of self-loops and duplicates. Immutable after construction.
class Graph {
 public:
  Graph() = default;

  /// Builds from an arbitrary edge list; duplicates are merged by summing
  /// weights, self-loops are rejected.
  static Graph from_edges(NodeIndex num_nodes, std::span<const WeightedEdge> edges);
  static Graph from_edges(NodeIndex num_nodes, std::span<const Edge> edges);

  NodeIndex num_nodes() const { return static_cast<NodeIndex>(offsets_.empty() ? 0 : offsets_.size() - 1); }
  std::size_t num_edges() const { return neighbors_.size() / 2; }

  std::span<const NodeIndex> neighbors(NodeIndex x) const {
    return {neighbors_.data() + offsets_[x], neighbors_.data() + offsets_[x + 1]};
  }
  /// Weights aligned with `neighbors(x)`.
  std::span<const EdgeWeight> weights(NodeIndex x) const {
    return {weights_.data() + offsets_[x], weights_.data() + offsets_[x + 1]};
  }
  std::size_t degree(NodeIndex x) const { return offsets_[x + 1] - offsets_[x]; }

  /// Position of `y` in the adjacency array of `x`, or -1.
  std::ptrdiff_t find(NodeIndex x, NodeIndex y) const;
  bool has_edge(NodeIndex x, NodeIndex y) const { return find(x, y) >= 0; }
  EdgeWeight weight(NodeIndex x, NodeIndex y) const;

  /// Edges with u < v in lexicographic order.
  std::vector<Edge> edges() const;
  std::vector<WeightedEdge> weighted_edges() const;

  std::size_t adjacency_offset(NodeIndex x) const { return offsets_[x]; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::size_t> offsets_{0};
  std::vector<NodeIndex> neighbors_;
  std::vector<EdgeWeight> weights_;
};

/// Number of common neighbors of `a` and `b` (sorted-list intersection).
std::size_t common_neighbor_count(const Graph& g, NodeIndex a, NodeIndex b);
std::vector<NodeIndex> common_neighbors(const Graph& g, NodeIndex a, NodeIndex b);

}  // namespace longtie
