#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "longtie/graph.hpp"
#include "longtie/stats.hpp"
#include "longtie/temporal_graph.hpp"
#include "longtie/tie_range.hpp"

namespace longtie {

/// N x K latent endowment vectors, row-major.
class Endowments {
 public:
  Endowments() = default;
  Endowments(NodeIndex nodes, std::size_t dims, double fill = 0.0);

  NodeIndex nodes() const { return nodes_; }
  std::size_t dims() const { return dims_; }
  std::span<const double> row(NodeIndex i) const { return {data_.data() + std::size_t{i} * dims_, dims_}; }
  std::span<double> row(NodeIndex i) { return {data_.data() + std::size_t{i} * dims_, dims_}; }
  double operator()(NodeIndex i, std::size_t k) const { return data_[std::size_t{i} * dims_ + k]; }
  double& operator()(NodeIndex i, std::size_t k) { return data_[std::size_t{i} * dims_ + k]; }
  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  /// Throws InvalidArgument on a non-finite entry or K == 0.
  void validate() const;

  friend bool operator==(const Endowments&, const Endowments&) = default;

 private:
  NodeIndex nodes_ = 0;
  std::size_t dims_ = 0;
  std::vector<double> data_;
};

/// i.i.d. lognormal(mu, sigma) entries.
Endowments lognormal_endowments(NodeIndex nodes, std::size_t dims, double mu, double sigma, std::uint64_t seed);

struct ModelParams {
  double delta = 0.2;          // depreciation of friends-of-friends value, in (0, 1)
  double q = 0.9;              // meeting probability of connected pairs
  std::uint32_t walk_len = 6;  // longest random walk counted by the meeting proximity
  double meeting_scale = 1.0;  // beta
  std::optional<double> c_init;  // investment in brand-new ties; default: median positive c*
  double duration_scale = 10.0;  // S: duration = expm1(c * S) seconds

  void validate() const;
};

/// Row i of sum_{l=2..L} P^l for the random-walk matrix of `g`; isolated
/// nodes carry a self-loop.
std::vector<double> walk_sum_row(const Graph& g, NodeIndex i, std::uint32_t walk_len);

/// p_ij: q for pairs connected in `prev`, otherwise beta * (sum_l P^l)_ij clamped to [0, 1].
double meeting_probability(NodeIndex i, NodeIndex j, const Graph& prev, const ModelParams& params);

/// Largest beta <= params.meeting_scale keeping every non-edge pair probability
/// (the symmetrized proximity used by `step`) at most 1.
double calibrated_meeting_scale(const Graph& prev, const ModelParams& params);

struct Benefit {
  double direct = 0.0;
  double indirect = 0.0;
  double total = 0.0;
};

/// Value of j to i: ReLU surpluses of j (direct) plus delta-discounted ReLU
/// surpluses of each of j's neighbors in `prev` (indirect).
Benefit benefit(NodeIndex i, NodeIndex j, const Endowments& w, const Graph& prev, double delta);

/// Indirect benefit restricted to the common neighbors of i and j.
double common_neighbor_benefit(NodeIndex i, NodeIndex j, const Endowments& w, const Graph& prev, double delta);

/// Maximizer of sum_j (c_j b_j - c_j^2) subject to sum_j c_j^2 = 1, c >= 0:
/// c = b / ||b||. All zero when no benefit is positive.
std::vector<double> optimal_investment(std::span<const double> benefits);

/// sum_j (c_j b_j - c_j^2).
double investment_utility(std::span<const double> c, std::span<const double> benefits);

struct Investment {
  NodeIndex to = 0;
  double c = 0.0;
};

/// c*_ij over `candidates`, in candidate order.
std::vector<Investment> optimal_investment(NodeIndex i, std::span<const NodeIndex> candidates, const Endowments& w,
                                           const Graph& prev, double delta);

/// Model state at the end of a phase. `graph` is the undirected tie set
/// M u N; the sets are symmetric.
struct SimState {
  int phase = -1;  // -1 for the initial graph
  Graph graph;
  std::vector<std::vector<NodeIndex>> new_friends;  // M_i, sorted
  std::vector<std::vector<NodeIndex>> existing;     // N_i, sorted
  std::vector<std::vector<Investment>> investment;  // c_ij for every current tie, sorted by `to`
  double c_init_used = 0.0;

  NodeIndex num_nodes() const { return graph.num_nodes(); }
  double c(NodeIndex i, NodeIndex j) const;
};

/// State whose ties are all existing, with unit-norm uniform investments.
SimState initial_state(const Graph& initial);

/// One phase: meeting draws, then the choice procedure over surviving
/// existing ties. A tie stays existing only if both endpoints invest in it.
/// Randomness is a pure function of (seed, phase, pair).
SimState step(const SimState& state, const Endowments& w, const ModelParams& params, std::uint64_t seed);

/// Directed interaction weights emitted by a state: D_ij = max(1, round(expm1(c_ij S))),
/// F_ij = 1 + D_ij / 300.
std::vector<DirectedWeight> emit_interactions(const SimState& state, const ModelParams& params);
EdgeWeight interaction_for(double c, const ModelParams& params);

struct Simulation {
  TemporalNetwork network;
  std::vector<SimState> states;  // states[t] produced phase t
};

/// Runs T steps from `initial`. Node labels default to "0".."N-1".
Simulation simulate(const Graph& initial, const Endowments& w, const ModelParams& params, int phases,
                    std::uint64_t seed, int window_months = 3, std::vector<std::string> labels = {});

/// Events whose ingestion reproduces `net` (one record per directed pair and
/// phase, in the first month of the phase).
std::vector<InteractionEvent> network_to_events(const TemporalNetwork& net);

struct BenefitByRange {
  std::array<MeanCi, kNumRangeBins> total;   // (a)
  std::array<MeanCi, kNumRangeBins> direct;  // (b)
  std::map<std::size_t, MeanCi> common_neighbor_indirect;  // (c), keyed by common-neighbor count >= 1
};

/// Benefit averages over both directions of every tie of `g`, grouped by the
/// tie's range in `g`.
BenefitByRange benefit_by_range(const Graph& g, const Endowments& w, double delta, unsigned threads = 1);
BenefitByRange benefit_by_range(const Graph& g, std::span<const RangedEdge> ranges, const Endowments& w,
                                double delta);

}  // namespace longtie
