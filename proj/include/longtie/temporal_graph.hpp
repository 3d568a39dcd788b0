#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "longtie/graph.hpp"

namespace longtie {

/// One monthly aggregated directed interaction record. Counts are signed so
/// that malformed input can be represented and rejected at ingestion.
struct InteractionEvent {
  std::string caller;
  std::string callee;
  std::int64_t month = 0;
  std::int64_t calls = 0;       // zero-duration calls already excluded upstream
  std::int64_t texts = 0;
  std::int64_t duration_s = 0;
  friend bool operator==(const InteractionEvent&, const InteractionEvent&) = default;
};

struct PhaseConfig {
  int window_months = 3;
  int total_months = 24;

  int num_phases() const { return total_months / window_months; }
  /// Throws InvalidArgument unless both are positive and the window divides the total.
  void validate() const;
  int phase_of_month(std::int64_t month) const { return static_cast<int>(month / window_months); }
};

struct DirectedWeight {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  EdgeWeight weight;
  friend bool operator==(const DirectedWeight&, const DirectedWeight&) = default;
};

/// Directed frequency/duration weights for one phase plus the undirected view.
class PhaseSnapshot {
 public:
  PhaseSnapshot() = default;
  /// `directed` may contain duplicates (summed) and zero entries (dropped).
  PhaseSnapshot(int index, NodeIndex num_nodes, std::vector<DirectedWeight> directed);

  int index() const { return index_; }
  NodeIndex num_nodes() const { return undirected_.num_nodes(); }
  /// Sorted by (src, dst); every entry has a nonzero weight.
  std::span<const DirectedWeight> directed() const { return directed_; }
  EdgeWeight directed_weight(NodeIndex src, NodeIndex dst) const;
  std::uint64_t frequency(NodeIndex src, NodeIndex dst) const { return directed_weight(src, dst).frequency; }
  std::uint64_t duration(NodeIndex src, NodeIndex dst) const { return directed_weight(src, dst).duration; }
  /// Symmetric view: edge {i,j} iff F_ij + F_ji > 0.
  const Graph& undirected() const { return undirected_; }

  friend bool operator==(const PhaseSnapshot&, const PhaseSnapshot&) = default;

 private:
  int index_ = 0;
  std::vector<DirectedWeight> directed_;
  Graph undirected_;
};

/// Builds the symmetric graph with F~ = F_ij + F_ji and D~ = D_ij + D_ji,
/// keeping only pairs with F~ > 0.
Graph undirected_view(NodeIndex num_nodes, std::span<const DirectedWeight> directed);
inline const Graph& undirected_view(const PhaseSnapshot& snap) { return snap.undirected(); }

/// Ordered phases over a shared node universe. Immutable.
class TemporalNetwork {
 public:
  TemporalNetwork() = default;
  TemporalNetwork(PhaseConfig config, std::vector<std::string> labels, std::vector<PhaseSnapshot> phases);

  const PhaseConfig& config() const { return config_; }
  NodeIndex num_nodes() const { return static_cast<NodeIndex>(labels_.size()); }
  int num_phases() const { return static_cast<int>(phases_.size()); }
  const PhaseSnapshot& phase(int t) const { return phases_.at(static_cast<std::size_t>(t)); }
  std::span<const PhaseSnapshot> phases() const { return phases_; }
  const std::string& label(NodeIndex i) const { return labels_[i]; }
  std::span<const std::string> labels() const { return labels_; }
  std::optional<NodeIndex> index_of(const std::string& label) const;

  friend bool operator==(const TemporalNetwork& a, const TemporalNetwork& b) {
    return a.config_.window_months == b.config_.window_months &&
           a.config_.total_months == b.config_.total_months && a.labels_ == b.labels_ && a.phases_ == b.phases_;
  }

 private:
  PhaseConfig config_;
  std::vector<std::string> labels_;
  std::vector<PhaseSnapshot> phases_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Total order on node labels: all-digit labels first, compared numerically
/// (by length, then digits); the rest lexicographically.
bool label_less(const std::string& a, const std::string& b);

/// Aggregates events into phases. F_ij = calls + texts, D_ij = call seconds.
/// Calls on a record with zero duration do not count toward frequency.
/// Throws InvalidArgument naming the offending record index on malformed input.
TemporalNetwork ingest_events(std::span<const InteractionEvent> events, const PhaseConfig& config);

enum class FilterMode { Fixpoint, SinglePass };

/// Keeps nodes with at least one incident interaction in every phase. In
/// Fixpoint mode the filter is re-applied until no further node is removed.
TemporalNetwork filter_active_nodes(const TemporalNetwork& net, FilterMode mode = FilterMode::Fixpoint);

/// True when both networks have the same phase count and, per phase, the same
/// directed weights keyed by node label. Nodes without interactions are ignored.
bool same_interactions(const TemporalNetwork& a, const TemporalNetwork& b);

// CSV with header `caller,callee,month,calls,texts,duration_s`.
inline constexpr const char* kEventCsvHeader = "caller,callee,month,calls,texts,duration_s";
std::vector<InteractionEvent> read_events_csv(std::istream& in);
std::vector<InteractionEvent> read_events_csv_file(const std::string& path);
void write_events_csv(std::ostream& out, std::span<const InteractionEvent> events);

/// Per-phase directed weights as `phase,caller,callee,frequency,duration_s`.
void write_snapshots_csv(std::ostream& out, const TemporalNetwork& net);

}  // namespace longtie
