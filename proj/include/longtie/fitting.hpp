#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "longtie/formation_model.hpp"
#include "longtie/random.hpp"
#include "longtie/temporal_graph.hpp"

namespace longtie {

enum class LossKind { Absolute, Squared };

struct FitConfig {
  std::size_t dims = 4;
  double delta = 0.2;
  std::vector<double> delta_grid{0.05, 0.1, 0.2, 0.3, 0.4, 0.5};
  int max_epochs = 500;
  std::size_t nodes_per_epoch = 1000;
  std::size_t test_nodes = 1000;  // capped at a fifth of the eligible nodes
  std::size_t batch_size = 100;
  double learning_rate = 0.01;
  double weight_decay = 1e-4;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double init_sd = 0.1;
  int target_phase = 1;      // targets at t, candidates from t - 1 (0-based phases)
  bool pool_phases = false;  // use every consecutive phase pair instead
  LossKind loss = LossKind::Absolute;
  int plateau_epochs = 20;
  double plateau_tolerance = 1e-3;  // relative improvement
  std::uint64_t seed = 0;
  unsigned threads = 1;

  void validate() const;
};

/// c_ij = log1p(D_ij^t) / sum_j' log1p(D_ij'^t) over candidates j (neighbors of
/// i at t - 1), in candidate order. nullopt when the denominator is zero.
std::optional<std::vector<Investment>> target_investment(const TemporalNetwork& net, NodeIndex i, int t);

/// Softmax of total benefits over `candidates`.
std::vector<double> predicted_investment(const Endowments& w, NodeIndex i, std::span<const NodeIndex> candidates,
                                         const Graph& prev, double delta);

/// One node's training example for a phase pair.
struct FitTask {
  NodeIndex node = 0;
  int target_phase = 0;
  std::size_t graph_slot = 0;         // index into FitProblem::prev_graph
  std::vector<NodeIndex> candidates;  // neighbors at t - 1
  std::vector<char> survived;         // still a neighbor at t
  std::optional<std::vector<double>> targets;
};

/// All tasks for the configured phase pair(s).
class FitProblem {
 public:
  FitProblem(const TemporalNetwork& net, std::span<const int> target_phases);
  static FitProblem for_config(const TemporalNetwork& net, const FitConfig& config);

  NodeIndex num_nodes() const { return num_nodes_; }
  std::span<const FitTask> tasks() const { return tasks_; }
  const Graph& prev_graph(const FitTask& task) const { return graphs_[task.graph_slot]; }
  /// Nodes with candidates but no defined targets (every candidate silent at t).
  std::size_t skipped_targets() const { return skipped_targets_; }

 private:
  NodeIndex num_nodes_ = 0;
  std::vector<Graph> graphs_;
  std::vector<FitTask> tasks_;
  std::size_t skipped_targets_ = 0;
};

struct LossValue {
  double positive = 0.0;
  double negative = 0.0;
  double total() const { return positive + negative; }
  std::size_t tasks = 0;
  std::size_t no_candidates = 0;  // contributed 0
  std::size_t no_targets = 0;     // positive part skipped
};

/// L_pos + L_neg summed over `task_ids`.
LossValue loss(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids, double delta,
               LossKind kind = LossKind::Absolute);

/// Loss over the nodes `sampled` for target phase t. Nodes without candidates
/// contribute zero.
LossValue loss(const Endowments& w, const TemporalNetwork& net, int t, std::span<const NodeIndex> sampled,
               double delta, LossKind kind = LossKind::Absolute);

/// Loss and its gradient with respect to every endowment entry.
LossValue loss_and_gradient(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids,
                            double delta, LossKind kind, Endowments& gradient);

/// Draws items with probability proportional to degree^(3/4).
class DegreeSampler {
 public:
  explicit DegreeSampler(std::span<const std::size_t> degrees);
  std::size_t operator()(Rng& rng) { return dist_(rng); }
  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  std::discrete_distribution<std::size_t> dist_;
};

/// Per-row Adam with decoupled bias correction; rows without gradient are left alone.
class SparseAdam {
 public:
  SparseAdam(NodeIndex rows, std::size_t dims, const FitConfig& config);
  /// Applies one update to the rows listed in `touched`.
  void step(Endowments& w, const Endowments& gradient, std::span<const NodeIndex> touched);

 private:
  std::size_t dims_;
  double lr_, beta1_, beta2_, eps_, decay_;
  std::vector<double> m_, v_;
  std::vector<std::uint32_t> steps_;
};

struct CurvePoint {
  int epoch = 0;
  double train_loss = 0.0;  // per task, over the epoch's samples
  double test_loss = 0.0;   // per task, over the held-out nodes
};

enum class StopReason { MaxEpochs, Plateau, Diverged };
const char* stop_reason_name(StopReason r);

struct FitResult {
  Endowments w;
  double delta = 0.0;
  std::vector<CurvePoint> curve;
  StopReason stop = StopReason::MaxEpochs;
  std::vector<std::size_t> test_tasks;
  std::vector<std::size_t> train_tasks;
  std::size_t skipped_targets = 0;
  double final_test_loss() const { return curve.empty() ? 0.0 : curve.back().test_loss; }
};

/// Minibatch Adam on the loss with degree^(3/4) node sampling.
FitResult fit(const TemporalNetwork& net, const FitConfig& config);
FitResult fit(const FitProblem& problem, const FitConfig& config);

/// Mean per-task loss over `task_ids`.
double mean_loss(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids, double delta,
                 LossKind kind = LossKind::Absolute);

/// i.i.d. N(0, sd) endowments, the fitting initialization.
Endowments gaussian_endowments(NodeIndex nodes, std::size_t dims, double sd, std::uint64_t seed);

struct GridRow {
  double delta = 0.0;
  double final_test_loss = 0.0;
  int epochs = 0;
};

struct GridSearchResult {
  double best_delta = 0.0;
  std::vector<GridRow> rows;
  FitResult best_fit;
};

/// One fit per grid value with a shared seed; picks the lowest held-out loss.
GridSearchResult grid_search_delta(const TemporalNetwork& net, const FitConfig& config);

struct DimensionRow {
  std::size_t dims = 0;
  double final_train_loss = 0.0;
  double final_test_loss = 0.0;
  int epochs = 0;
  BenefitByRange benefits;  // on the candidate phase graph
};

/// Repeats the fit for every K in `dims` (each within [2, 8]).
std::vector<DimensionRow> dimension_sweep(const TemporalNetwork& net, std::span<const std::size_t> dims,
                                          const FitConfig& config);

void write_learning_curve_csv(std::ostream& out, std::span<const CurvePoint> curve);

/// JSON checkpoint with W (rows keyed by node label), delta, config and losses.
void write_checkpoint(std::ostream& out, const FitResult& result, std::span<const std::string> labels,
                      const FitConfig& config);

struct Checkpoint {
  Endowments w;
  std::vector<std::string> labels;
  double delta = 0.0;
  int epoch = 0;
};
Checkpoint read_checkpoint(std::istream& in);

}  // namespace longtie
