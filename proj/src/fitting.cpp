#include "longtie/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include "longtie/config.hpp"
#include "longtie/error.hpp"
#include "longtie/parallel.hpp"

namespace longtie {

void FitConfig::validate() const {
  if (dims < 1) throw InvalidArgument("fit.dims must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("fit.delta must be in (0, 1)");
  for (double d : delta_grid)
    if (!(d > 0.0 && d < 1.0)) throw InvalidArgument("every delta_grid value must be in (0, 1)");
  if (max_epochs < 0) throw InvalidArgument("fit.max_epochs must be >= 0");
  if (nodes_per_epoch == 0 || batch_size == 0) throw InvalidArgument("nodes_per_epoch and batch_size must be positive");
  if (!(learning_rate >= 0.0)) throw InvalidArgument("learning_rate must be >= 0");
  if (!(weight_decay >= 0.0)) throw InvalidArgument("weight_decay must be >= 0");
  if (!(init_sd >= 0.0)) throw InvalidArgument("init_sd must be >= 0");
  if (target_phase < 1) throw InvalidArgument("target_phase must be >= 1 (candidates come from the previous phase)");
  if (plateau_epochs < 1) throw InvalidArgument("plateau_epochs must be >= 1");
}

std::optional<std::vector<Investment>> target_investment(const TemporalNetwork& net, NodeIndex i, int t) {
  if (t < 1 || t >= net.num_phases()) throw InvalidArgument("target phase out of range");
  const auto candidates = net.phase(t - 1).undirected().neighbors(i);
  const auto& now = net.phase(t);
  std::vector<Investment> out;
  double denom = 0.0;
  for (auto j : candidates) {
    const double x = std::log1p(static_cast<double>(now.duration(i, j)));
    out.push_back({j, x});
    denom += x;
  }
  if (denom <= 0.0) return std::nullopt;
  for (auto& c : out) c.c /= denom;
  return out;
}

namespace {

std::vector<double> softmax(std::span<const double> b) {
  std::vector<double> out(b.size());
  if (b.empty()) return out;
  const double peak = *std::max_element(b.begin(), b.end());
  double z = 0.0;
  for (std::size_t j = 0; j < b.size(); ++j) z += (out[j] = std::exp(b[j] - peak));
  for (auto& x : out) x /= z;
  return out;
}

}  // namespace

std::vector<double> predicted_investment(const Endowments& w, NodeIndex i, std::span<const NodeIndex> candidates,
                                         const Graph& prev, double delta) {
  std::vector<double> b;
  b.reserve(candidates.size());
  for (auto j : candidates) b.push_back(benefit(i, j, w, prev, delta).total);
  return softmax(b);
}

FitProblem::FitProblem(const TemporalNetwork& net, std::span<const int> target_phases) : num_nodes_(net.num_nodes()) {
  for (int t : target_phases) {
    if (t < 1 || t >= net.num_phases())
      throw InvalidArgument("target phase " + std::to_string(t) + " needs phases t-1 and t to exist");
    const auto slot = graphs_.size();
    graphs_.push_back(net.phase(t - 1).undirected());
    const auto& prev = graphs_.back();
    const auto& now = net.phase(t).undirected();
    for (NodeIndex i = 0; i < net.num_nodes(); ++i) {
      const auto nb = prev.neighbors(i);
      if (nb.empty()) continue;
      FitTask task;
      task.node = i;
      task.target_phase = t;
      task.graph_slot = slot;
      task.candidates.assign(nb.begin(), nb.end());
      for (auto j : nb) task.survived.push_back(now.has_edge(i, j) ? 1 : 0);
      if (auto c = target_investment(net, i, t)) {
        task.targets.emplace();
        for (const auto& x : *c) task.targets->push_back(x.c);
      } else {
        ++skipped_targets_;
      }
      tasks_.push_back(std::move(task));
    }
  }
}

FitProblem FitProblem::for_config(const TemporalNetwork& net, const FitConfig& config) {
  if (net.num_phases() < 2) throw InvalidArgument("fitting needs at least two phases");
  std::vector<int> phases;
  if (config.pool_phases) {
    for (int t = 1; t < net.num_phases(); ++t) phases.push_back(t);
  } else {
    phases.push_back(config.target_phase);
  }
  return FitProblem(net, phases);
}

namespace {

struct Contribution {
  NodeIndex row;
  std::uint32_t dim;
  double value;
};

struct TaskResult {
  double positive = 0.0;
  double negative = 0.0;
  bool no_candidates = false;
  bool no_targets = false;
  std::vector<Contribution> grad;
};

/// Loss of one task and, when `want_grad`, its gradient contributions.
TaskResult evaluate_task(const FitTask& task, const Graph& prev, const Endowments& w, double delta, LossKind kind,
                         bool want_grad) {
  TaskResult r;
  const auto n = task.candidates.size();
  if (n == 0) {
    r.no_candidates = true;
    return r;
  }
  const NodeIndex i = task.node;
  const std::size_t dims = w.dims();
  std::vector<double> b(n);
  for (std::size_t a = 0; a < n; ++a) b[a] = benefit(i, task.candidates[a], w, prev, delta).total;
  const auto chat = softmax(b);

  std::size_t n_pos = 0, n_neg = 0;
  for (std::size_t a = 0; a < n; ++a) (task.survived[a] ? n_pos : n_neg) += 1;
  const bool use_pos = n_pos > 0 && task.targets.has_value();
  if (n_pos > 0 && !task.targets) r.no_targets = true;

  std::vector<double> dchat(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    if (task.survived[a]) {
      if (!use_pos) continue;
      const double diff = chat[a] - (*task.targets)[a];
      if (kind == LossKind::Absolute) {
        r.positive += std::abs(diff) / static_cast<double>(n_pos);
        dchat[a] = (diff > 0 ? 1.0 : diff < 0 ? -1.0 : 0.0) / static_cast<double>(n_pos);
      } else {
        r.positive += diff * diff / static_cast<double>(n_pos);
        dchat[a] = 2.0 * diff / static_cast<double>(n_pos);
      }
    } else {
      if (kind == LossKind::Absolute) {
        r.negative += chat[a] / static_cast<double>(n_neg);
        dchat[a] = 1.0 / static_cast<double>(n_neg);
      } else {
        r.negative += chat[a] * chat[a] / static_cast<double>(n_neg);
        dchat[a] = 2.0 * chat[a] / static_cast<double>(n_neg);
      }
    }
  }
  if (!want_grad) return r;

  // Softmax Jacobian: dL/db_a = chat_a (g_a - sum_m chat_m g_m).
  double mean_g = 0.0;
  for (std::size_t a = 0; a < n; ++a) mean_g += chat[a] * dchat[a];
  const auto wi = w.row(i);
  for (std::size_t a = 0; a < n; ++a) {
    const double db = chat[a] * (dchat[a] - mean_g);
    if (db == 0.0) continue;
    const NodeIndex j = task.candidates[a];
    const auto wj = w.row(j);
    for (std::size_t k = 0; k < dims; ++k)
      if (wj[k] > wi[k]) {
        r.grad.push_back({j, static_cast<std::uint32_t>(k), db});
        r.grad.push_back({i, static_cast<std::uint32_t>(k), -db});
      }
    const double ddb = delta * db;
    for (auto l : prev.neighbors(j)) {
      if (l == i) continue;
      const auto wl = w.row(l);
      for (std::size_t k = 0; k < dims; ++k)
        if (wl[k] > wi[k]) {
          r.grad.push_back({l, static_cast<std::uint32_t>(k), ddb});
          r.grad.push_back({i, static_cast<std::uint32_t>(k), -ddb});
        }
    }
  }
  return r;
}

/// Evaluates tasks in parallel, reduces in task order.
LossValue evaluate(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> ids, double delta,
                   LossKind kind, Endowments* gradient, std::vector<NodeIndex>* touched, unsigned threads) {
  std::vector<TaskResult> results(ids.size());
  parallel_for(
      ids.size(), threads,
      [&](unsigned, std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
          const auto& task = problem.tasks()[ids[s]];
          results[s] = evaluate_task(task, problem.prev_graph(task), w, delta, kind, gradient != nullptr);
        }
      },
      16);
  LossValue lv;
  CompensatedSum pos, neg;
  std::vector<char> seen;
  if (touched) seen.assign(w.nodes(), 0);
  for (const auto& r : results) {
    ++lv.tasks;
    pos.add(r.positive);
    neg.add(r.negative);
    lv.no_candidates += r.no_candidates ? 1 : 0;
    lv.no_targets += r.no_targets ? 1 : 0;
    if (!gradient) continue;
    for (const auto& c : r.grad) {
      (*gradient)(c.row, c.dim) += c.value;
      if (touched && !seen[c.row]) {
        seen[c.row] = 1;
        touched->push_back(c.row);
      }
    }
  }
  lv.positive = pos.value();
  lv.negative = neg.value();
  if (touched) std::sort(touched->begin(), touched->end());
  return lv;
}

}  // namespace

LossValue loss(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids, double delta,
               LossKind kind) {
  return evaluate(problem, w, task_ids, delta, kind, nullptr, nullptr, 1);
}

LossValue loss(const Endowments& w, const TemporalNetwork& net, int t, std::span<const NodeIndex> sampled,
               double delta, LossKind kind) {
  if (sampled.empty()) throw InvalidArgument("loss needs at least one sampled node");
  const int phases[] = {t};
  FitProblem problem(net, phases);
  std::vector<std::size_t> by_node(net.num_nodes(), SIZE_MAX);
  for (std::size_t k = 0; k < problem.tasks().size(); ++k) by_node[problem.tasks()[k].node] = k;
  std::vector<std::size_t> ids;
  std::size_t empty = 0;
  for (auto i : sampled) {
    if (i >= net.num_nodes()) throw InvalidArgument("sampled node out of range");
    if (by_node[i] == SIZE_MAX) ++empty;
    else ids.push_back(by_node[i]);
  }
  auto lv = loss(problem, w, ids, delta, kind);
  lv.tasks += empty;
  lv.no_candidates += empty;
  return lv;
}

LossValue loss_and_gradient(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids,
                            double delta, LossKind kind, Endowments& gradient) {
  gradient = Endowments(w.nodes(), w.dims());
  return evaluate(problem, w, task_ids, delta, kind, &gradient, nullptr, 1);
}

double mean_loss(const FitProblem& problem, const Endowments& w, std::span<const std::size_t> task_ids, double delta,
                 LossKind kind) {
  if (task_ids.empty()) return 0.0;
  return loss(problem, w, task_ids, delta, kind).total() / static_cast<double>(task_ids.size());
}

DegreeSampler::DegreeSampler(std::span<const std::size_t> degrees) {
  weights_.reserve(degrees.size());
  for (auto d : degrees) weights_.push_back(std::pow(static_cast<double>(d), 0.75));
  if (weights_.empty() || std::accumulate(weights_.begin(), weights_.end(), 0.0) <= 0.0)
    throw InvalidArgument("degree sampler needs at least one positive degree");
  dist_ = std::discrete_distribution<std::size_t>(weights_.begin(), weights_.end());
}

SparseAdam::SparseAdam(NodeIndex rows, std::size_t dims, const FitConfig& config)
    : dims_(dims),
      lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_epsilon),
      decay_(config.weight_decay),
      m_(std::size_t{rows} * dims, 0.0),
      v_(std::size_t{rows} * dims, 0.0),
      steps_(rows, 0) {}

void SparseAdam::step(Endowments& w, const Endowments& gradient, std::span<const NodeIndex> touched) {
  for (auto r : touched) {
    const auto t = ++steps_[r];
    const double c1 = 1.0 - std::pow(beta1_, t);
    const double c2 = 1.0 - std::pow(beta2_, t);
    for (std::size_t k = 0; k < dims_; ++k) {
      const std::size_t p = std::size_t{r} * dims_ + k;
      const double g = gradient(r, k) + decay_ * w(r, k);
      m_[p] = beta1_ * m_[p] + (1.0 - beta1_) * g;
      v_[p] = beta2_ * v_[p] + (1.0 - beta2_) * g * g;
      w(r, k) -= lr_ * (m_[p] / c1) / (std::sqrt(v_[p] / c2) + eps_);
    }
  }
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::MaxEpochs: return "max_epochs";
    case StopReason::Plateau: return "plateau";
    case StopReason::Diverged: return "diverged";
  }
  return "?";
}

Endowments gaussian_endowments(NodeIndex nodes, std::size_t dims, double sd, std::uint64_t seed) {
  Endowments w(nodes, dims);
  Rng rng(seed);
  std::normal_distribution<double> law(0.0, 1.0);
  for (double& x : w.data()) x = sd * law(rng);
  return w;
}

FitResult fit(const TemporalNetwork& net, const FitConfig& config) {
  config.validate();
  return fit(FitProblem::for_config(net, config), config);
}

FitResult fit(const FitProblem& problem, const FitConfig& config) {
  config.validate();
  const auto tasks = problem.tasks();
  if (tasks.empty()) throw InvalidArgument("no node has candidates in the training phase");

  // Held-out split by node.
  std::vector<NodeIndex> nodes;
  for (const auto& t : tasks) nodes.push_back(t.node);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  Rng split_rng(derive_seed(config.seed, 1));
  std::shuffle(nodes.begin(), nodes.end(), split_rng);
  std::size_t n_test = std::min(config.test_nodes, nodes.size() / 5);
  if (n_test == 0 && nodes.size() >= 2 && config.test_nodes > 0) n_test = 1;
  std::vector<char> is_test(problem.num_nodes(), 0);
  for (std::size_t k = 0; k < n_test; ++k) is_test[nodes[k]] = 1;

  FitResult result;
  result.delta = config.delta;
  result.skipped_targets = problem.skipped_targets();
  for (std::size_t k = 0; k < tasks.size(); ++k) (is_test[tasks[k].node] ? result.test_tasks : result.train_tasks).push_back(k);
  if (result.train_tasks.empty()) throw InvalidArgument("no training nodes left after the held-out split");

  std::vector<std::size_t> degrees;
  for (auto k : result.train_tasks) degrees.push_back(tasks[k].candidates.size());
  DegreeSampler sampler(degrees);
  Rng rng(derive_seed(config.seed, 3));

  Endowments w = gaussian_endowments(problem.num_nodes(), config.dims, config.init_sd, derive_seed(config.seed, 2));
  Endowments last_good = w;
  Endowments grad(w.nodes(), w.dims());
  SparseAdam adam(w.nodes(), w.dims(), config);

  std::vector<std::size_t> batch;
  std::vector<NodeIndex> touched;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    CompensatedSum train;
    bool finite = true;
    for (std::size_t drawn = 0; drawn < config.nodes_per_epoch && finite;) {
      batch.clear();
      for (; batch.size() < config.batch_size && drawn < config.nodes_per_epoch; ++drawn)
        batch.push_back(result.train_tasks[sampler(rng)]);
      touched.clear();
      const auto lv = evaluate(problem, w, batch, config.delta, config.loss, &grad, &touched, config.threads);
      train.add(lv.total());
      if (!std::isfinite(lv.total())) {
        finite = false;
        break;
      }
      adam.step(w, grad, touched);
      for (auto r : touched)
        for (std::size_t k = 0; k < w.dims(); ++k) grad(r, k) = 0.0;
    }
    const double test = mean_loss(problem, w, result.test_tasks, config.delta, config.loss);
    if (!finite || !std::isfinite(test) ||
        !std::all_of(w.data().begin(), w.data().end(), [](double x) { return std::isfinite(x); })) {
      w = last_good;
      result.stop = StopReason::Diverged;
      break;
    }
    last_good = w;
    result.curve.push_back({epoch, train.value() / static_cast<double>(config.nodes_per_epoch), test});

    const auto e = result.curve.size();
    const auto window = static_cast<std::size_t>(config.plateau_epochs);
    if (!result.test_tasks.empty() && e > window) {
      double before = INFINITY, recent = INFINITY;
      for (std::size_t k = 0; k < e - window; ++k) before = std::min(before, result.curve[k].test_loss);
      for (std::size_t k = e - window; k < e; ++k) recent = std::min(recent, result.curve[k].test_loss);
      if (recent > before * (1.0 - config.plateau_tolerance)) {
        result.stop = StopReason::Plateau;
        break;
      }
    }
  }
  result.w = std::move(w);
  return result;
}

GridSearchResult grid_search_delta(const TemporalNetwork& net, const FitConfig& config) {
  if (config.delta_grid.empty()) throw InvalidArgument("delta grid is empty");
  const auto problem = FitProblem::for_config(net, config);
  GridSearchResult out;
  double best = INFINITY;
  for (double d : config.delta_grid) {
    FitConfig c = config;
    c.delta = d;
    auto r = fit(problem, c);
    const double loss_d = r.final_test_loss();
    out.rows.push_back({d, loss_d, static_cast<int>(r.curve.size())});
    if (loss_d < best) {
      best = loss_d;
      out.best_delta = d;
      out.best_fit = std::move(r);
    }
  }
  return out;
}

std::vector<DimensionRow> dimension_sweep(const TemporalNetwork& net, std::span<const std::size_t> dims,
                                          const FitConfig& config) {
  if (dims.empty()) throw InvalidArgument("dimension sweep needs at least one K");
  for (auto k : dims)
    if (k < 2 || k > 8) throw InvalidArgument("dimension " + std::to_string(k) + " outside [2, 8]");
  const auto problem = FitProblem::for_config(net, config);
  const auto& graph = net.phase(config.pool_phases ? net.num_phases() - 2 : config.target_phase - 1).undirected();
  const auto ranges = tie_range_all(graph, kDefaultCap, config.threads);
  std::vector<DimensionRow> out;
  for (auto k : dims) {
    FitConfig c = config;
    c.dims = k;
    auto r = fit(problem, c);
    DimensionRow row;
    row.dims = k;
    row.epochs = static_cast<int>(r.curve.size());
    if (!r.curve.empty()) {
      row.final_train_loss = r.curve.back().train_loss;
      row.final_test_loss = r.curve.back().test_loss;
    }
    row.benefits = benefit_by_range(graph, ranges, r.w, c.delta);
    out.push_back(std::move(row));
  }
  return out;
}

void write_learning_curve_csv(std::ostream& out, std::span<const CurvePoint> curve) {
  out << "epoch,train_loss,test_loss\n";
  out.precision(17);
  for (const auto& p : curve) out << p.epoch << ',' << p.train_loss << ',' << p.test_loss << '\n';
}

void write_checkpoint(std::ostream& out, const FitResult& result, std::span<const std::string> labels,
                      const FitConfig& config) {
  if (labels.size() != result.w.nodes()) throw InvalidArgument("label count does not match W");
  nlohmann::json j;
  j["format"] = "longtie-endowments";
  j["version"] = 1;
  j["dims"] = result.w.dims();
  j["delta"] = result.delta;
  j["epoch"] = result.curve.empty() ? 0 : result.curve.back().epoch;
  j["train_loss"] = result.curve.empty() ? 0.0 : result.curve.back().train_loss;
  j["test_loss"] = result.final_test_loss();
  j["stop"] = stop_reason_name(result.stop);
  j["config"] = config;
  j["labels"] = std::vector<std::string>(labels.begin(), labels.end());
  auto& rows = j["W"] = nlohmann::json::array();
  for (NodeIndex i = 0; i < result.w.nodes(); ++i) {
    auto r = result.w.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  out << j.dump(1) << '\n';
}

Checkpoint read_checkpoint(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("checkpoint is not valid JSON: ") + e.what());
  }
  if (j.value("format", "") != "longtie-endowments") throw InvalidArgument("not an endowment checkpoint");
  Checkpoint c;
  c.labels = j.at("labels").get<std::vector<std::string>>();
  const auto dims = j.at("dims").get<std::size_t>();
  c.w = Endowments(static_cast<NodeIndex>(c.labels.size()), dims);
  const auto& rows = j.at("W");
  if (rows.size() != c.labels.size()) throw InvalidArgument("checkpoint W has the wrong number of rows");
  for (NodeIndex i = 0; i < c.labels.size(); ++i) {
    const auto r = rows[i].get<std::vector<double>>();
    if (r.size() != dims) throw InvalidArgument("checkpoint row has the wrong dimension");
    std::copy(r.begin(), r.end(), c.w.row(i).begin());
  }
  c.delta = j.at("delta").get<double>();
  c.epoch = j.value("epoch", 0);
  return c;
}

}  // namespace longtie
