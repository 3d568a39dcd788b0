#include "longtie/formation_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "longtie/error.hpp"
#include "longtie/random.hpp"

namespace longtie {

Endowments::Endowments(NodeIndex nodes, std::size_t dims, double fill)
    : nodes_(nodes), dims_(dims), data_(std::size_t{nodes} * dims, fill) {}

void Endowments::validate() const {
  if (dims_ == 0) throw InvalidArgument("endowment dimension must be at least 1");
  for (double x : data_)
    if (!std::isfinite(x)) throw InvalidArgument("non-finite endowment entry");
}

Endowments lognormal_endowments(NodeIndex nodes, std::size_t dims, double mu, double sigma, std::uint64_t seed) {
  Endowments w(nodes, dims);
  Rng rng(seed);
  std::lognormal_distribution<double> law(mu, sigma);
  for (double& x : w.data()) x = law(rng);
  return w;
}

void ModelParams::validate() const {
  if (!(delta > 0.0 && delta < 1.0)) throw InvalidArgument("delta must be in (0, 1)");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidArgument("q must be in [0, 1]");
  if (walk_len < 2) throw InvalidArgument("walk_len must be at least 2");
  if (!(meeting_scale >= 0.0) || !std::isfinite(meeting_scale)) throw InvalidArgument("meeting_scale must be >= 0");
  if (c_init && !(*c_init > 0.0)) throw InvalidArgument("c_init must be positive");
  if (!(duration_scale > 0.0)) throw InvalidArgument("duration_scale must be positive");
}

std::vector<double> walk_sum_row(const Graph& g, NodeIndex i, std::uint32_t walk_len) {
  const NodeIndex n = g.num_nodes();
  std::vector<double> x(n, 0.0), y(n, 0.0), acc(n, 0.0);
  x[i] = 1.0;
  for (std::uint32_t l = 1; l <= walk_len; ++l) {
    std::fill(y.begin(), y.end(), 0.0);
    for (NodeIndex m = 0; m < n; ++m) {
      if (x[m] == 0.0) continue;
      const auto nb = g.neighbors(m);
      if (nb.empty()) {
        y[m] += x[m];
        continue;
      }
      const double share = x[m] / static_cast<double>(nb.size());
      for (auto k : nb) y[k] += share;
    }
    std::swap(x, y);
    if (l >= 2)
      for (NodeIndex m = 0; m < n; ++m) acc[m] += x[m];
  }
  return acc;
}

double meeting_probability(NodeIndex i, NodeIndex j, const Graph& prev, const ModelParams& params) {
  if (i == j) throw InvalidArgument("meeting_probability needs distinct nodes");
  if (prev.has_edge(i, j)) return params.q;
  const auto row = walk_sum_row(prev, i, params.walk_len);
  return std::clamp(params.meeting_scale * row[j], 0.0, 1.0);
}

namespace {

/// Symmetrized proximity (p_ij + p_ji) / 2 / beta for a non-edge, using
/// detailed balance d_i P^l_ij = d_j P^l_ji of the simple random walk.
double pair_proximity(const std::vector<double>& row_i, NodeIndex i, NodeIndex j, const Graph& g) {
  const auto di = g.degree(i), dj = g.degree(j);
  if (di == 0 || dj == 0) return 0.0;
  return 0.5 * row_i[j] * (1.0 + static_cast<double>(di) / static_cast<double>(dj));
}

constexpr std::uint64_t kTagKeep = 0x6b656570;  // existing-pair Bern(q) draw
constexpr std::uint64_t kTagMeet = 0x6d656574;  // new-pair meeting draw

}  // namespace

double calibrated_meeting_scale(const Graph& prev, const ModelParams& params) {
  double peak = 0.0;
  for (NodeIndex i = 0; i < prev.num_nodes(); ++i) {
    if (prev.degree(i) == 0) continue;
    const auto row = walk_sum_row(prev, i, params.walk_len);
    for (NodeIndex j = i + 1; j < prev.num_nodes(); ++j)
      if (!prev.has_edge(i, j)) peak = std::max(peak, pair_proximity(row, i, j, prev));
  }
  if (peak * params.meeting_scale <= 1.0) return params.meeting_scale;
  return 1.0 / peak;
}

Benefit benefit(NodeIndex i, NodeIndex j, const Endowments& w, const Graph& prev, double delta) {
  const auto wi = w.row(i);
  auto surplus = [&](NodeIndex x) {
    const auto wx = w.row(x);
    double s = 0.0;
    for (std::size_t k = 0; k < wi.size(); ++k) s += std::max(0.0, wx[k] - wi[k]);
    return s;
  };
  Benefit b;
  b.direct = surplus(j);
  for (auto l : prev.neighbors(j))
    if (l != i) b.indirect += surplus(l);
  b.indirect *= delta;
  b.total = b.direct + b.indirect;
  return b;
}

double common_neighbor_benefit(NodeIndex i, NodeIndex j, const Endowments& w, const Graph& prev, double delta) {
  const auto wi = w.row(i);
  double s = 0.0;
  for (auto l : common_neighbors(prev, i, j)) {
    const auto wl = w.row(l);
    for (std::size_t k = 0; k < wi.size(); ++k) s += std::max(0.0, wl[k] - wi[k]);
  }
  return delta * s;
}

std::vector<double> optimal_investment(std::span<const double> benefits) {
  double norm2 = 0.0;
  for (double b : benefits) {
    if (b < 0.0) throw InvalidArgument("benefits must be non-negative");
    norm2 += b * b;
  }
  std::vector<double> c(benefits.size(), 0.0);
  if (norm2 == 0.0) return c;
  const double inv = 1.0 / std::sqrt(norm2);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = benefits[j] * inv;
  return c;
}

double investment_utility(std::span<const double> c, std::span<const double> benefits) {
  if (c.size() != benefits.size()) throw InvalidArgument("investment and benefit sizes differ");
  double u = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) u += c[j] * benefits[j] - c[j] * c[j];
  return u;
}

std::vector<Investment> optimal_investment(NodeIndex i, std::span<const NodeIndex> candidates, const Endowments& w,
                                           const Graph& prev, double delta) {
  std::vector<double> b;
  b.reserve(candidates.size());
  for (auto j : candidates) b.push_back(benefit(i, j, w, prev, delta).total);
  const auto c = optimal_investment(b);
  std::vector<Investment> out;
  out.reserve(candidates.size());
  for (std::size_t k = 0; k < candidates.size(); ++k) out.push_back({candidates[k], c[k]});
  return out;
}

double SimState::c(NodeIndex i, NodeIndex j) const {
  const auto& row = investment.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j, [](const Investment& a, NodeIndex x) { return a.to < x; });
  return it != row.end() && it->to == j ? it->c : 0.0;
}

SimState initial_state(const Graph& initial) {
  SimState s;
  s.graph = initial;
  const NodeIndex n = initial.num_nodes();
  s.new_friends.assign(n, {});
  s.existing.assign(n, {});
  s.investment.assign(n, {});
  for (NodeIndex i = 0; i < n; ++i) {
    const auto nb = initial.neighbors(i);
    s.existing[i].assign(nb.begin(), nb.end());
    const double c = nb.empty() ? 0.0 : 1.0 / std::sqrt(static_cast<double>(nb.size()));
    for (auto j : nb) s.investment[i].push_back({j, c});
  }
  return s;
}

SimState step(const SimState& state, const Endowments& w, const ModelParams& params, std::uint64_t seed) {
  params.validate();
  const Graph& prev = state.graph;
  const NodeIndex n = prev.num_nodes();
  if (w.nodes() != n) throw InvalidArgument("endowment rows do not match the node count");
  const int phase = state.phase + 1;
  const auto phase_tag = static_cast<std::uint64_t>(phase);

  // Meeting procedure, existing pairs: Bern(q).
  auto kept = [&](NodeIndex i, NodeIndex j) {
    return counter_uniform(seed ^ kTagKeep, phase_tag, i < j ? i : j, i < j ? j : i) < params.q;
  };

  // Meeting procedure, unconnected pairs: random-walk proximity.
  std::vector<Edge> met;
  const double beta = calibrated_meeting_scale(prev, params);
  if (beta > 0.0) {
    for (NodeIndex i = 0; i < n; ++i) {
      if (prev.degree(i) == 0) continue;
      const auto row = walk_sum_row(prev, i, params.walk_len);
      for (NodeIndex j = i + 1; j < n; ++j) {
        if (prev.has_edge(i, j)) continue;
        const double p = std::clamp(beta * pair_proximity(row, i, j, prev), 0.0, 1.0);
        if (p > 0.0 && counter_uniform(seed ^ kTagMeet, phase_tag, i, j) < p) met.push_back({i, j});
      }
    }
  }

  // Choice procedure over existing pairs that survived the meeting draw.
  std::vector<std::vector<Investment>> choice(n);
  for (NodeIndex i = 0; i < n; ++i) {
    std::vector<NodeIndex> candidates;
    for (auto j : prev.neighbors(i))
      if (kept(i, j)) candidates.push_back(j);
    choice[i] = optimal_investment(i, candidates, w, prev, params.delta);
  }
  auto chosen = [&](NodeIndex i, NodeIndex j) {
    const auto& row = choice[i];
    auto it = std::lower_bound(row.begin(), row.end(), j, [](const Investment& a, NodeIndex x) { return a.to < x; });
    return it != row.end() && it->to == j ? it->c : 0.0;
  };

  SimState next;
  next.phase = phase;
  next.new_friends.assign(n, {});
  next.existing.assign(n, {});
  next.investment.assign(n, {});
  std::vector<Edge> ties;
  std::vector<double> positive;
  for (auto e : prev.edges()) {
    const double cuv = chosen(e.u, e.v), cvu = chosen(e.v, e.u);
    if (cuv > 0.0 && cvu > 0.0) {
      ties.push_back(e);
      next.existing[e.u].push_back(e.v);
      next.existing[e.v].push_back(e.u);
      next.investment[e.u].push_back({e.v, cuv});
      next.investment[e.v].push_back({e.u, cvu});
      positive.push_back(cuv);
      positive.push_back(cvu);
    }
  }
  double c_init = 0.5;
  if (params.c_init) {
    c_init = *params.c_init;
  } else if (!positive.empty()) {
    auto mid = positive.begin() + static_cast<std::ptrdiff_t>((positive.size() - 1) / 2);
    std::nth_element(positive.begin(), mid, positive.end());
    c_init = *mid;
  }
  next.c_init_used = c_init;
  for (auto e : met) {
    ties.push_back(e);
    next.new_friends[e.u].push_back(e.v);
    next.new_friends[e.v].push_back(e.u);
    next.investment[e.u].push_back({e.v, c_init});
    next.investment[e.v].push_back({e.u, c_init});
  }
  for (NodeIndex i = 0; i < n; ++i) {
    std::sort(next.new_friends[i].begin(), next.new_friends[i].end());
    std::sort(next.existing[i].begin(), next.existing[i].end());
    std::sort(next.investment[i].begin(), next.investment[i].end(),
              [](const Investment& a, const Investment& b) { return a.to < b.to; });
  }
  next.graph = Graph::from_edges(n, std::span<const Edge>(ties));
  return next;
}

EdgeWeight interaction_for(double c, const ModelParams& params) {
  const double raw = std::expm1(c * params.duration_scale);
  const auto d = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(raw)));
  return EdgeWeight{1 + d / 300, d};
}

std::vector<DirectedWeight> emit_interactions(const SimState& state, const ModelParams& params) {
  std::vector<DirectedWeight> out;
  for (NodeIndex i = 0; i < state.num_nodes(); ++i)
    for (const auto& inv : state.investment[i])
      if (inv.c > 0.0) out.push_back({i, inv.to, interaction_for(inv.c, params)});
  return out;
}

Simulation simulate(const Graph& initial, const Endowments& w, const ModelParams& params, int phases,
                    std::uint64_t seed, int window_months, std::vector<std::string> labels) {
  if (phases < 1) throw InvalidArgument("simulate needs at least one phase");
  params.validate();
  w.validate();
  const NodeIndex n = initial.num_nodes();
  if (labels.empty())
    for (NodeIndex i = 0; i < n; ++i) labels.push_back(std::to_string(i));
  if (labels.size() != n) throw InvalidArgument("label count does not match the node count");

  Simulation sim;
  std::vector<PhaseSnapshot> snaps;
  SimState state = initial_state(initial);
  for (int t = 0; t < phases; ++t) {
    state = step(state, w, params, seed);
    snaps.emplace_back(t, n, emit_interactions(state, params));
    sim.states.push_back(state);
  }
  sim.network = TemporalNetwork(PhaseConfig{window_months, window_months * phases}, std::move(labels), std::move(snaps));
  return sim;
}

std::vector<InteractionEvent> network_to_events(const TemporalNetwork& net) {
  std::vector<InteractionEvent> out;
  for (const auto& snap : net.phases())
    for (const auto& d : snap.directed()) {
      if (d.weight.frequency > 0 && d.weight.duration == 0)
        throw InvalidArgument("a frequency-only record would need texts; not emitted by the simulator");
      out.push_back({net.label(d.src), net.label(d.dst),
                     static_cast<std::int64_t>(snap.index()) * net.config().window_months,
                     static_cast<std::int64_t>(d.weight.frequency), 0, static_cast<std::int64_t>(d.weight.duration)});
    }
  return out;
}

BenefitByRange benefit_by_range(const Graph& g, std::span<const RangedEdge> ranges, const Endowments& w,
                                double delta) {
  std::array<MeanAccumulator, kNumRangeBins> total, direct;
  std::map<std::size_t, MeanAccumulator> cn;
  for (const auto& r : ranges) {
    const auto b = bin_index(range_bin(r.range));
    const auto shared = common_neighbor_count(g, r.edge.u, r.edge.v);
    for (auto [i, j] : {std::pair{r.edge.u, r.edge.v}, std::pair{r.edge.v, r.edge.u}}) {
      const auto ben = benefit(i, j, w, g, delta);
      total[b].add(ben.total);
      direct[b].add(ben.direct);
      if (shared > 0) cn[shared].add(common_neighbor_benefit(i, j, w, g, delta));
    }
  }
  BenefitByRange out;
  for (std::size_t b = 0; b < kNumRangeBins; ++b) {
    out.total[b] = total[b].result();
    out.direct[b] = direct[b].result();
  }
  for (const auto& [k, acc] : cn) out.common_neighbor_indirect[k] = acc.result();
  return out;
}

BenefitByRange benefit_by_range(const Graph& g, const Endowments& w, double delta, unsigned threads) {
  if (w.nodes() != g.num_nodes()) throw InvalidArgument("endowment rows do not match the node count");
  const auto ranges = tie_range_all(g, kDefaultCap, threads);
  return benefit_by_range(g, ranges, w, delta);
}

}  // namespace longtie
