#include "longtie/tie_range.hpp"

#include <algorithm>
#include <numeric>

#include "longtie/error.hpp"
#include "longtie/parallel.hpp"
#include "longtie/random.hpp"

namespace longtie {

std::string TieRange::to_string() const {
  if (is_infinite()) return "inf";
  return std::to_string(distance) + (saturated ? "+" : "");
}

RangeBin range_bin(TieRange r) {
  if (r.is_infinite()) return RangeBin::Infinite;
  if (r.distance >= 6) return RangeBin::R6Plus;
  if (r.saturated) throw InvalidArgument("tie range saturated below 6 cannot be binned: " + r.to_string());
  switch (r.distance) {
    case 2: return RangeBin::R2;
    case 3: return RangeBin::R3;
    case 4: return RangeBin::R4;
    case 5: return RangeBin::R5;
    default: throw InvalidArgument("tie range below 2: " + r.to_string());
  }
}

const char* bin_name(RangeBin b) {
  static constexpr const char* names[] = {"2", "3", "4", "5", "6+", "inf"};
  return names[bin_index(b)];
}

std::optional<TieClass> classify(RangeBin b) {
  switch (b) {
    case RangeBin::R2: return TieClass::Short;
    case RangeBin::R3:
    case RangeBin::R4: return TieClass::Mid;
    case RangeBin::R5:
    case RangeBin::R6Plus: return TieClass::Long;
    case RangeBin::Infinite: return std::nullopt;
  }
  return std::nullopt;
}

namespace {

/// Scratch space for one bidirectional search. Visit marks are stamped so the
/// arrays never need clearing between edges.
class PairSearch {
 public:
  explicit PairSearch(NodeIndex n) : stamp_(n, 0), side_(n, 0), depth_(n, 0) {}

  /// Distance between u and v avoiding edge {u,v}, if it is <= max_len.
  std::optional<std::uint32_t> run(const Graph& g, NodeIndex u, NodeIndex v, std::uint32_t max_len) {
    if (++cur_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0);
      cur_ = 1;
    }
    front_[0].assign(1, u);
    front_[1].assign(1, v);
    visit(u, 0, 0);
    visit(v, 1, 0);
    std::uint32_t depth[2] = {0, 0};
    std::size_t work[2] = {g.degree(u), g.degree(v)};
    while (depth[0] + depth[1] + 1 <= max_len) {
      const int s = work[0] <= work[1] ? 0 : 1;
      next_.clear();
      std::size_t next_work = 0;
      for (NodeIndex x : front_[s]) {
        for (NodeIndex y : g.neighbors(x)) {
          if ((x == u && y == v) || (x == v && y == u)) continue;
          if (stamp_[y] == cur_) {
            if (side_[y] != s) return depth[s] + 1 + depth_[y];
            continue;
          }
          visit(y, s, depth[s] + 1);
          next_.push_back(y);
          next_work += g.degree(y);
        }
      }
      if (next_.empty()) return std::nullopt;
      std::swap(front_[s], next_);
      work[s] = next_work;
      ++depth[s];
    }
    return std::nullopt;
  }

 private:
  void visit(NodeIndex x, int side, std::uint32_t d) {
    stamp_[x] = cur_;
    side_[x] = static_cast<std::uint8_t>(side);
    depth_[x] = d;
  }

  std::vector<std::uint32_t> stamp_;
  std::vector<std::uint8_t> side_;
  std::vector<std::uint32_t> depth_;
  std::vector<NodeIndex> front_[2];
  std::vector<NodeIndex> next_;
  std::uint32_t cur_ = 0;
};

bool has_common_neighbor(const Graph& g, NodeIndex a, NodeIndex b) {
  auto na = g.neighbors(a), nb = g.neighbors(b);
  if (na.size() > nb.size()) std::swap(na, nb);
  // Galloping is not worth it at social-network degrees; a merge is enough.
  std::size_t i = 0, j = 0;
  while (i < na.size() && j < nb.size()) {
    if (na[i] < nb[j]) ++i;
    else if (nb[j] < na[i]) ++j;
    else return true;
  }
  return false;
}

bool reachable_without_edge(const Graph& g, NodeIndex u, NodeIndex v) {
  std::vector<char> seen(g.num_nodes(), 0);
  std::vector<NodeIndex> stack{u};
  seen[u] = 1;
  while (!stack.empty()) {
    NodeIndex x = stack.back();
    stack.pop_back();
    for (NodeIndex y : g.neighbors(x)) {
      if ((x == u && y == v) || (x == v && y == u)) continue;
      if (y == v) return true;
      if (!seen[y]) {
        seen[y] = 1;
        stack.push_back(y);
      }
    }
  }
  return false;
}

void check_cap(std::uint32_t cap) {
  if (cap < 2) throw InvalidArgument("tie-range cap must be at least 2");
}

TieRange range_for(const Graph& g, NodeIndex u, NodeIndex v, std::uint32_t cap, bool is_bridge, PairSearch& search) {
  if (is_bridge) return TieRange::infinite();
  if (has_common_neighbor(g, u, v)) return cap <= 2 ? TieRange::at_least(2) : TieRange::exact(2);
  if (cap <= 3) return TieRange::at_least(cap);
  if (auto d = search.run(g, u, v, cap - 1)) return TieRange::exact(*d);
  return TieRange::at_least(cap);
}

}  // namespace

TieRange tie_range(const Graph& g, NodeIndex u, NodeIndex v, std::uint32_t cap) {
  check_cap(cap);
  if (u >= g.num_nodes() || v >= g.num_nodes() || !g.has_edge(u, v))
    throw InvalidArgument("(" + std::to_string(u) + ", " + std::to_string(v) + ") is not an edge");
  PairSearch search(g.num_nodes());
  const bool bridge = !reachable_without_edge(g, u, v);
  return range_for(g, u, v, cap, bridge, search);
}

std::vector<char> find_bridges(const Graph& g) {
  const NodeIndex n = g.num_nodes();
  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> disc(n, kUnseen), low(n, 0);
  std::vector<char> bridge(g.num_edges() * 2, 0);
  struct Frame {
    NodeIndex node;
    NodeIndex parent;
    std::size_t next;  // next neighbor position to examine
  };
  std::vector<Frame> stack;
  std::uint32_t timer = 0;
  for (NodeIndex root = 0; root < n; ++root) {
    if (disc[root] != kUnseen) continue;
    disc[root] = low[root] = timer++;
    stack.push_back({root, root, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      auto nb = g.neighbors(f.node);
      if (f.next < nb.size()) {
        NodeIndex y = nb[f.next++];
        if (y == f.parent && f.node != f.parent) continue;  // simple graph: one parent edge
        if (disc[y] == kUnseen) {
          disc[y] = low[y] = timer++;
          stack.push_back({y, f.node, 0});
        } else {
          low[f.node] = std::min(low[f.node], disc[y]);
        }
      } else {
        const NodeIndex x = f.node, p = f.parent;
        stack.pop_back();
        if (x != p) {
          low[p] = std::min(low[p], low[x]);
          if (low[x] > disc[p]) {
            bridge[static_cast<std::size_t>(g.find(p, x))] = 1;
            bridge[static_cast<std::size_t>(g.find(x, p))] = 1;
          }
        }
      }
    }
  }
  return bridge;
}

std::vector<RangedEdge> tie_range_all(const Graph& g, std::uint32_t cap, unsigned threads) {
  check_cap(cap);
  const auto edges = g.edges();
  std::vector<RangedEdge> out(edges.size());
  if (edges.empty()) return out;
  const auto bridge = find_bridges(g);
  if (threads == 0) threads = default_threads();
  std::vector<PairSearch> scratch;
  scratch.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) scratch.emplace_back(g.num_nodes());
  parallel_for(
      edges.size(), threads,
      [&](unsigned w, std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) {
          const auto [u, v] = edges[k];
          const bool is_bridge = bridge[static_cast<std::size_t>(g.find(u, v))] != 0;
          out[k] = {edges[k], range_for(g, u, v, cap, is_bridge, scratch[w])};
        }
      },
      256);
  return out;
}

RangeDistribution range_distribution(std::span<const RangedEdge> ranges) {
  RangeDistribution d;
  for (const auto& r : ranges) ++d.counts[bin_index(range_bin(r.range))];
  d.total = ranges.size();
  if (d.total > 0)
    for (std::size_t b = 0; b < kNumRangeBins; ++b)
      d.proportions[b] = static_cast<double>(d.counts[b]) / static_cast<double>(d.total);
  return d;
}

RangeDistribution range_distribution(const Graph& g, std::uint32_t cap, unsigned threads) {
  if (cap < kDefaultCap) throw InvalidArgument("range_distribution needs cap >= 6 to separate the classes");
  auto r = tie_range_all(g, cap, threads);
  return range_distribution(r);
}

std::vector<std::size_t> sample_drop_set(std::size_t population, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InvalidArgument("drop fraction must be in (0, 1)");
  const auto k = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(population)));
  std::vector<std::size_t> idx(population);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  // Partial Fisher-Yates: the first k slots become the sample.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

Graph drop_random(const Graph& g, double fraction, DropTarget what, std::uint64_t seed) {
  auto edges = g.weighted_edges();
  if (what == DropTarget::Edges) {
    auto drop = sample_drop_set(edges.size(), fraction, seed);
    std::vector<char> gone(edges.size(), 0);
    for (auto k : drop) gone[k] = 1;
    std::vector<WeightedEdge> kept;
    kept.reserve(edges.size() - drop.size());
    for (std::size_t k = 0; k < edges.size(); ++k)
      if (!gone[k]) kept.push_back(edges[k]);
    return Graph::from_edges(g.num_nodes(), kept);
  }
  auto drop = sample_drop_set(g.num_nodes(), fraction, seed);
  std::vector<char> gone(g.num_nodes(), 0);
  for (auto k : drop) gone[k] = 1;
  std::erase_if(edges, [&](const auto& e) { return gone[e.edge.u] || gone[e.edge.v]; });
  return Graph::from_edges(g.num_nodes(), edges);
}

}  // namespace longtie
