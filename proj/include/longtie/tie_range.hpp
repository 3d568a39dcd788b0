#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longtie/graph.hpp"

namespace longtie {

/// Length of the second shortest path of a tie: the distance between its
/// endpoints once the tie itself is removed.
struct TieRange {
  static constexpr std::uint32_t kInfinite = std::numeric_limits<std::uint32_t>::max();

  std::uint32_t distance = kInfinite;  // exact distance, or the cap when saturated
  bool saturated = false;              // actual distance >= `distance` and finite

  static TieRange exact(std::uint32_t d) { return {d, false}; }
  static TieRange at_least(std::uint32_t d) { return {d, true}; }
  static TieRange infinite() { return {kInfinite, false}; }

  bool is_infinite() const { return distance == kInfinite; }
  /// "2", "6+", "inf".
  std::string to_string() const;
  friend bool operator==(const TieRange&, const TieRange&) = default;
};

inline constexpr std::uint32_t kDefaultCap = 6;
inline constexpr std::uint32_t kUncapped = std::numeric_limits<std::uint32_t>::max() - 1;

/// Range classes used by all analytics: 2, 3, 4, 5, 6+ and infinite.
enum class RangeBin : std::uint8_t { R2 = 0, R3, R4, R5, R6Plus, Infinite };
inline constexpr std::size_t kNumRangeBins = 6;
inline constexpr std::size_t kNumFiniteBins = 5;
inline constexpr std::array<RangeBin, kNumRangeBins> kAllRangeBins{RangeBin::R2, RangeBin::R3, RangeBin::R4,
                                                                   RangeBin::R5, RangeBin::R6Plus, RangeBin::Infinite};

RangeBin range_bin(TieRange r);
const char* bin_name(RangeBin b);  // "2", "3", "4", "5", "6+", "inf"
inline std::size_t bin_index(RangeBin b) { return static_cast<std::size_t>(b); }

enum class TieClass { Short, Mid, Long };
/// Short for 2, Mid for 3-4, Long for 5 and 6+; infinite ranges are unclassified.
std::optional<TieClass> classify(RangeBin b);
inline std::optional<TieClass> classify(TieRange r) { return classify(range_bin(r)); }

/// Tie range of the edge {u, v}. Distances >= cap come back saturated at cap.
/// Throws InvalidArgument when {u, v} is not an edge or cap < 2.
TieRange tie_range(const Graph& g, NodeIndex u, NodeIndex v, std::uint32_t cap = kDefaultCap);

struct RangedEdge {
  Edge edge;
  TieRange range;
};

/// Tie range of every edge, in `g.edges()` order. `threads == 0` uses all cores.
std::vector<RangedEdge> tie_range_all(const Graph& g, std::uint32_t cap = kDefaultCap, unsigned threads = 1);

/// Marks bridges; the result is aligned with the adjacency arrays of `g`.
std::vector<char> find_bridges(const Graph& g);

struct RangeDistribution {
  std::array<std::size_t, kNumRangeBins> counts{};
  std::array<double, kNumRangeBins> proportions{};
  std::size_t total = 0;
};

RangeDistribution range_distribution(std::span<const RangedEdge> ranges);
RangeDistribution range_distribution(const Graph& g, std::uint32_t cap = kDefaultCap, unsigned threads = 1);

enum class DropTarget { Nodes, Edges };

/// Removes floor(fraction * population) uniformly chosen nodes or edges. Node
/// indices are preserved; dropped nodes lose all incident edges.
Graph drop_random(const Graph& g, double fraction, DropTarget what, std::uint64_t seed);

/// The indices removed by drop_random for a population of `population` items.
std::vector<std::size_t> sample_drop_set(std::size_t population, double fraction, std::uint64_t seed);

}  // namespace longtie
