#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "longtie/dynamics.hpp"
#include "longtie/fitting.hpp"
#include "longtie/formation_model.hpp"
#include "longtie/tie_range.hpp"

namespace longtie {

/// Shortest round-trip decimal ("%.17g").
std::string format_double(double x);

// CSV writers. Column layouts are listed in README.md.
void write_tie_ranges_csv(std::ostream& out, std::span<const std::string> labels, std::span<const RangedEdge> ranges);
void write_range_distribution_csv(std::ostream& out, std::span<const RangeDistribution> per_phase);
void write_strength_series_csv(std::ostream& out, std::span<const StrengthSeries> series, const std::string& group = "all",
                               bool header = true);
struct DecompositionRow {
  std::string group;
  Metric metric;
  int baseline;
  int phase;
  std::array<Decomposition, kNumRangeBins> by_bin;
};
void write_decomposition_csv(std::ostream& out, std::span<const DecompositionRow> rows);
void write_transition_csv(std::ostream& out, std::span<const TransitionMatrix> matrices);
void write_joint_evolution_csv(std::ostream& out, const JointEvolution& joint, bool header = true);
void write_lifespan_csv(std::ostream& out, std::span<const std::string> labels, std::span<const Lifespan> spans);
void write_lifespan_by_range_csv(std::ostream& out, int reference, const std::array<MeanCi, kNumRangeBins>& by_range,
                                 bool header = true);
void write_degree_rates_csv(std::ostream& out, const DegreeAnalysis& analysis);
void write_benefit_by_range_csv(std::ostream& out, const BenefitByRange& b, const std::string& group = "all",
                                bool header = true);

nlohmann::json to_json_value(const MeanCi& m);
nlohmann::json to_json_value(const StrengthSeries& s);
nlohmann::json to_json_value(const Decomposition& d);
nlohmann::json to_json_value(const TransitionMatrix& m);
nlohmann::json to_json_value(const JointEvolution& j);
nlohmann::json to_json_value(const RangeDistribution& d);
nlohmann::json to_json_value(const BenefitByRange& b);

}  // namespace longtie
