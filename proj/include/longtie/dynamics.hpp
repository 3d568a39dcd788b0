#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "longtie/stats.hpp"
#include "longtie/temporal_graph.hpp"
#include "longtie/tie_range.hpp"

namespace longtie {

enum class Metric { Frequency, Duration };
const char* metric_name(Metric m);

/// How strength values enter the statistics.
enum class Transform { Log1p, Raw };

/// Per-pair view of one tie across all phases.
struct TieTrajectory {
  Edge pair;
  std::vector<bool> present;               // F~ > 0 in the phase
  std::vector<std::uint64_t> frequency;    // y^F_t
  std::vector<std::uint64_t> duration;     // y^D_t
  std::vector<std::optional<RangeBin>> range;  // defined iff present
  std::vector<bool> is_new;                // present at t and absent at t-1 (false at t = 0)
};

/// Every pair that is present in at least one phase, with per-phase weights and
/// range classes. Tie ids index pairs in ascending (u, v) order.
class TieTable {
 public:
  static TieTable build(const TemporalNetwork& net, unsigned threads = 1);

  std::size_t num_ties() const { return pairs_.size(); }
  int num_phases() const { return static_cast<int>(bins_.size()); }
  Edge pair(std::size_t k) const { return pairs_[k]; }
  std::optional<std::size_t> find(Edge e) const;

  bool present(int t, std::size_t k) const { return bins_[idx(t)][k] != kAbsent; }
  std::optional<RangeBin> bin(int t, std::size_t k) const {
    auto b = bins_[idx(t)][k];
    if (b == kAbsent) return std::nullopt;
    return static_cast<RangeBin>(b);
  }
  std::uint64_t frequency(int t, std::size_t k) const { return freq_[idx(t)][k]; }
  std::uint64_t duration(int t, std::size_t k) const { return dur_[idx(t)][k]; }
  std::uint64_t raw(int t, std::size_t k, Metric m) const {
    return m == Metric::Frequency ? frequency(t, k) : duration(t, k);
  }
  double value(int t, std::size_t k, Metric m, Transform tr = Transform::Log1p) const;

  TieTrajectory trajectory(std::size_t k) const;
  /// Tie ids present in phase t.
  std::vector<std::size_t> present_at(int t) const;

 private:
  static constexpr std::uint8_t kAbsent = 0xff;
  std::size_t idx(int t) const;

  std::vector<Edge> pairs_;
  std::vector<std::vector<std::uint64_t>> freq_;
  std::vector<std::vector<std::uint64_t>> dur_;
  std::vector<std::vector<std::uint8_t>> bins_;
};

enum class Conditioning {
  Unconditional,  // dissolved ties contribute log1p(0) = 0
  Surviving,      // only ties present in the phase
};

/// Mean of log1p(metric) per phase for ties grouped by their range class at
/// the baseline phase. by_bin[b][t]; an entry with n == 0 is absent.
struct StrengthSeries {
  int baseline = 0;
  Metric metric = Metric::Frequency;
  Conditioning conditioning = Conditioning::Unconditional;
  std::array<std::vector<MeanCi>, kNumRangeBins> by_bin;
};

/// `subset` restricts the ties considered (ids into the table); empty span means all.
StrengthSeries strength_series(const TieTable& table, int baseline, Metric metric,
                               Conditioning conditioning = Conditioning::Unconditional,
                               std::optional<std::span<const std::size_t>> subset = std::nullopt);

/// Persistence/increment decomposition of E[y_t | y_b > 0].
struct Decomposition {
  std::size_t n_baseline = 0;  // ties with y_b > 0
  std::size_t n_persisting = 0;  // ... and y_t > 0
  double persistence = 0.0;  // P[y_t > 0 | y_b > 0]
  double mean_baseline_given_both = 0.0;  // E[y_b | y_t > 0, y_b > 0]
  double increment = 0.0;  // E[y_t - y_b | y_t > 0, y_b > 0]
  double conditional_mean = 0.0;  // E[y_t | y_b > 0], computed directly
  MeanCi persistence_ci;  // of the 0/1 persistence indicator
  MeanCi increment_ci;
  bool present() const { return n_baseline > 0; }
  /// (E[y_b|both] + E[dy|both]) * P, the right-hand side of the identity.
  double recomposed() const { return (mean_baseline_given_both + increment) * persistence; }
};

/// Decomposition over paired observations (y_b[k], y_t[k]). Pairs with
/// y_b <= 0 are ignored. Throws InvalidArgument when no pair has y_b > 0.
Decomposition decompose(std::span<const double> y_base, std::span<const double> y_t);

/// Decomposition over all ties with positive metric at `baseline`.
Decomposition decompose(const TieTable& table, int baseline, int t, Metric metric,
                        Transform transform = Transform::Log1p,
                        std::optional<std::span<const std::size_t>> subset = std::nullopt);

/// The same, split by range class at the baseline. Classes without baseline
/// ties are left absent.
std::array<Decomposition, kNumRangeBins> decompose_by_range(
    const TieTable& table, int baseline, int t, Metric metric, Transform transform = Transform::Log1p,
    std::optional<std::span<const std::size_t>> subset = std::nullopt);

/// Range-class transitions between two phases for ties present in both with
/// finite range in both. Rows/columns: 2, 3, 4, 5, 6+.
struct TransitionMatrix {
  int from_phase = 0;
  int to_phase = 0;
  std::array<std::array<std::size_t, kNumFiniteBins>, kNumFiniteBins> counts{};
  std::array<std::array<double, kNumFiniteBins>, kNumFiniteBins> probabilities{};
  std::array<std::size_t, kNumFiniteBins> row_counts{};
  std::size_t excluded_infinite = 0;  // present in both, infinite in at least one
  std::size_t dissolved = 0;          // present at from_phase only
};

TransitionMatrix transition_matrix(const TieTable& table, int phase_a, int phase_b);

/// One (r_t, r_{t+1}) cell of the joint range/strength evolution.
struct JointCell {
  std::size_t count = 0;
  MeanCi log_duration_next;   // log1p duration at t+1
  MeanCi log_frequency_next;  // log1p frequency at t+1
  std::optional<double> persistence_next;  // share still present at t+2
  bool present() const { return count > 0; }
};

struct JointEvolution {
  int phase = 0;
  bool has_persistence = false;  // t + 2 exists
  std::array<std::array<JointCell, kNumRangeBins>, kNumRangeBins> cells;
};

JointEvolution joint_evolution(const TieTable& table, int t);

struct Lifespan {
  Edge pair;
  int phases = 0;
};

/// Number of phases in which each pair interacts; pairs never present are absent.
std::vector<Lifespan> lifespan(const TieTable& table);
/// Mean lifespan of ties present at `reference`, by their range class there.
std::array<MeanCi, kNumRangeBins> lifespan_by_range(const TieTable& table, int reference);

struct DegreeRate {
  std::size_t degree = 0;
  std::size_t incident_ties = 0;  // summed over nodes of that degree
  std::size_t long_ties = 0;      // finite range >= 5
  double rate = 0.0;
};

struct DegreeAnalysis {
  int phase = 0;
  std::vector<DegreeRate> rates;  // ascending degree
  std::size_t median_degree = 0;  // lower median over nodes with degree > 0
  /// Ties with an endpoint of degree <= median / > median. A tie can be in both.
  std::vector<std::size_t> low_ties;
  std::vector<std::size_t> high_ties;
  std::array<StrengthSeries, 2> low_series;   // frequency, duration
  std::array<StrengthSeries, 2> high_series;  // empty when no node is above the median
};

DegreeAnalysis degree_analysis(const TieTable& table, const TemporalNetwork& net, int phase);

struct NewExistingProfiles {
  int reference = 0;
  std::vector<std::size_t> new_ties;
  std::vector<std::size_t> existing_ties;
  std::array<StrengthSeries, 2> new_series;       // frequency, duration
  std::array<StrengthSeries, 2> existing_series;
  /// decompositions[metric][t - reference - 1] for t > reference.
  std::array<std::vector<std::array<Decomposition, kNumRangeBins>>, 2> new_decomposition;
  std::array<std::vector<std::array<Decomposition, kNumRangeBins>>, 2> existing_decomposition;
};

/// Splits ties present at `reference` (>= 1) by presence at reference - 1.
NewExistingProfiles new_existing_profiles(const TieTable& table, int reference);

}  // namespace longtie
