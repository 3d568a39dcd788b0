#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "longtie/formation_model.hpp"

namespace longtie {

enum class GraphFamily { ErdosRenyi, Configuration };

/// G(n, m) with m = round(n * mean_degree / 2) distinct edges.
Graph erdos_renyi(NodeIndex nodes, double mean_degree, std::uint64_t seed);
/// Erased configuration model with geometric degrees of the given mean.
Graph configuration_model(NodeIndex nodes, double mean_degree, std::uint64_t seed);

struct SynthSpec {
  NodeIndex nodes = 500;
  std::size_t dims = 4;
  double endowment_mu = 0.0;
  double endowment_sigma = 1.0;
  bool equal_endowments = false;  // degenerate: every benefit is zero
  GraphFamily family = GraphFamily::ErdosRenyi;
  double mean_degree = 8.0;
  ModelParams params;
  int phases = 4;
  int window_months = 3;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthOutput {
  Graph initial;
  Endowments w;
  Simulation sim;
  std::vector<InteractionEvent> events;
  bool degenerate = false;  // all endowment rows equal
};

SynthOutput generate(const SynthSpec& spec);

/// Planted endowments, parameters and spec as JSON.
void write_truth_json(std::ostream& out, const SynthSpec& spec, const SynthOutput& output);

}  // namespace longtie
