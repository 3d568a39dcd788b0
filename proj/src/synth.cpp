#include "longtie/synth.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <unordered_set>

#include "longtie/config.hpp"
#include "longtie/error.hpp"
#include "longtie/random.hpp"

namespace longtie {

Graph erdos_renyi(NodeIndex nodes, double mean_degree, std::uint64_t seed) {
  if (nodes < 2 || mean_degree <= 0.0) return Graph::from_edges(nodes, std::span<const Edge>{});
  const double max_edges = 0.5 * static_cast<double>(nodes) * static_cast<double>(nodes - 1);
  const auto m = static_cast<std::size_t>(std::min(max_edges, std::round(0.5 * nodes * mean_degree)));
  Rng rng(seed);
  std::uniform_int_distribution<NodeIndex> pick(0, nodes - 1);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(m * 2);
  std::vector<Edge> edges;
  edges.reserve(m);
  while (edges.size() < m) {
    const NodeIndex a = pick(rng), b = pick(rng);
    if (a == b) continue;
    const auto e = make_edge(a, b);
    if (seen.insert(edge_key(e)).second) edges.push_back(e);
  }
  return Graph::from_edges(nodes, std::span<const Edge>(edges));
}

Graph configuration_model(NodeIndex nodes, double mean_degree, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<NodeIndex> stubs;
  if (mean_degree > 1.0) {
    // Degrees 1 + Geometric(p) with mean mean_degree.
    std::geometric_distribution<int> law(1.0 / mean_degree);
    for (NodeIndex i = 0; i < nodes; ++i) {
      const int d = 1 + law(rng);
      for (int k = 0; k < d; ++k) stubs.push_back(i);
    }
  }
  if (stubs.size() % 2 == 1) stubs.pop_back();
  std::shuffle(stubs.begin(), stubs.end(), rng);
  std::unordered_set<std::uint64_t> seen;
  std::vector<Edge> edges;
  for (std::size_t k = 0; k + 1 < stubs.size(); k += 2) {
    if (stubs[k] == stubs[k + 1]) continue;
    const auto e = make_edge(stubs[k], stubs[k + 1]);
    if (seen.insert(edge_key(e)).second) edges.push_back(e);
  }
  return Graph::from_edges(nodes, std::span<const Edge>(edges));
}

void SynthSpec::validate() const {
  if (nodes < 2) throw InvalidArgument("synth needs at least two nodes");
  if (dims < 1) throw InvalidArgument("synth dims must be positive");
  if (!(endowment_sigma > 0.0)) throw InvalidArgument("endowment sigma must be positive");
  if (!(mean_degree > 0.0)) throw InvalidArgument("mean degree must be positive");
  if (phases < 3) throw InvalidArgument("synth needs T >= 3 phases");
  if (window_months < 1) throw InvalidArgument("window_months must be positive");
  params.validate();
}

SynthOutput generate(const SynthSpec& spec) {
  spec.validate();
  SynthOutput out;
  out.initial = spec.family == GraphFamily::ErdosRenyi
                    ? erdos_renyi(spec.nodes, spec.mean_degree, derive_seed(spec.seed, 11))
                    : configuration_model(spec.nodes, spec.mean_degree, derive_seed(spec.seed, 11));
  out.w = spec.equal_endowments
              ? Endowments(spec.nodes, spec.dims, 1.0)
              : lognormal_endowments(spec.nodes, spec.dims, spec.endowment_mu, spec.endowment_sigma,
                                     derive_seed(spec.seed, 12));
  out.degenerate = true;
  for (NodeIndex i = 1; i < spec.nodes && out.degenerate; ++i)
    out.degenerate = std::equal(out.w.row(i).begin(), out.w.row(i).end(), out.w.row(0).begin());
  out.sim = simulate(out.initial, out.w, spec.params, spec.phases, derive_seed(spec.seed, 13), spec.window_months);
  out.events = network_to_events(out.sim.network);
  return out;
}

void write_truth_json(std::ostream& out, const SynthSpec& spec, const SynthOutput& output) {
  nlohmann::json j;
  j["format"] = "longtie-synth-truth";
  j["version"] = 1;
  j["nodes"] = spec.nodes;
  j["dims"] = spec.dims;
  j["endowment"] = {{"law", spec.equal_endowments ? "constant" : "lognormal"},
                    {"mu", spec.endowment_mu},
                    {"sigma", spec.endowment_sigma}};
  j["initial_graph"] = {{"family", spec.family == GraphFamily::ErdosRenyi ? "erdos_renyi" : "configuration"},
                        {"mean_degree", spec.mean_degree},
                        {"edges", output.initial.num_edges()}};
  j["model"] = spec.params;
  j["phases"] = spec.phases;
  j["window_months"] = spec.window_months;
  j["seed"] = spec.seed;
  j["degenerate"] = output.degenerate;
  auto& c_init = j["c_init_used"] = nlohmann::json::array();
  for (const auto& s : output.sim.states) c_init.push_back(s.c_init_used);
  auto& rows = j["W"] = nlohmann::json::array();
  for (NodeIndex i = 0; i < output.w.nodes(); ++i) {
    auto r = output.w.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  out << j.dump(1) << '\n';
}

}  // namespace longtie
