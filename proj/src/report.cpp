#include "longtie/report.hpp"

#include <cstdio>
#include <ostream>

namespace longtie {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* conditioning_name(Conditioning c) {
  return c == Conditioning::Unconditional ? "unconditional" : "surviving";
}

void write_mean(std::ostream& out, const MeanCi& m) {
  out << m.n << ',';
  if (m.present())
    out << format_double(m.mean) << ',' << format_double(m.ci_low) << ',' << format_double(m.ci_high) << ",1";
  else
    out << ",,,0";
}

}  // namespace

void write_tie_ranges_csv(std::ostream& out, std::span<const std::string> labels, std::span<const RangedEdge> ranges) {
  out << "u,v,tie_range\n";
  for (const auto& r : ranges) {
    std::string s = r.range.is_infinite() ? "inf" : range_bin(r.range) == RangeBin::R6Plus ? "6+" : r.range.to_string();
    out << labels[r.edge.u] << ',' << labels[r.edge.v] << ',' << s << '\n';
  }
}

void write_range_distribution_csv(std::ostream& out, std::span<const RangeDistribution> per_phase) {
  out << "phase,tie_range,count,proportion\n";
  for (std::size_t t = 0; t < per_phase.size(); ++t)
    for (auto b : kAllRangeBins)
      out << t << ',' << bin_name(b) << ',' << per_phase[t].counts[bin_index(b)] << ','
          << format_double(per_phase[t].proportions[bin_index(b)]) << '\n';
}

void write_strength_series_csv(std::ostream& out, std::span<const StrengthSeries> series, const std::string& group,
                               bool header) {
  if (header) out << "group,metric,conditioning,baseline,tie_range,phase,n,mean,ci_low,ci_high,present\n";
  for (const auto& s : series)
    for (auto b : kAllRangeBins) {
      const auto& row = s.by_bin[bin_index(b)];
      for (std::size_t t = 0; t < row.size(); ++t) {
        out << group << ',' << metric_name(s.metric) << ',' << conditioning_name(s.conditioning) << ',' << s.baseline
            << ',' << bin_name(b) << ',' << t << ',';
        write_mean(out, row[t]);
        out << '\n';
      }
    }
}

void write_decomposition_csv(std::ostream& out, std::span<const DecompositionRow> rows) {
  out << "group,metric,baseline,phase,tie_range,n_baseline,n_persisting,persistence,persistence_ci_low,"
         "persistence_ci_high,mean_baseline_given_both,increment,increment_ci_low,increment_ci_high,"
         "conditional_mean,present\n";
  for (const auto& r : rows)
    for (auto b : kAllRangeBins) {
      const auto& d = r.by_bin[bin_index(b)];
      out << r.group << ',' << metric_name(r.metric) << ',' << r.baseline << ',' << r.phase << ',' << bin_name(b)
          << ',' << d.n_baseline << ',' << d.n_persisting << ',';
      if (!d.present()) {
        out << ",,,,,,,,0\n";
        continue;
      }
      out << format_double(d.persistence) << ',' << format_double(d.persistence_ci.ci_low) << ','
          << format_double(d.persistence_ci.ci_high) << ',';
      if (d.n_persisting > 0)
        out << format_double(d.mean_baseline_given_both) << ',' << format_double(d.increment) << ','
            << format_double(d.increment_ci.ci_low) << ',' << format_double(d.increment_ci.ci_high) << ',';
      else
        out << ",,,,";
      out << format_double(d.conditional_mean) << ",1\n";
    }
}

void write_transition_csv(std::ostream& out, std::span<const TransitionMatrix> matrices) {
  out << "from_phase,to_phase,from_range,to_range,count,probability,row_count\n";
  for (const auto& m : matrices)
    for (std::size_t r = 0; r < kNumFiniteBins; ++r)
      for (std::size_t c = 0; c < kNumFiniteBins; ++c) {
        out << m.from_phase << ',' << m.to_phase << ',' << bin_name(kAllRangeBins[r]) << ','
            << bin_name(kAllRangeBins[c]) << ',' << m.counts[r][c] << ',';
        if (m.row_counts[r] > 0) out << format_double(m.probabilities[r][c]);
        out << ',' << m.row_counts[r] << '\n';
      }
}

void write_joint_evolution_csv(std::ostream& out, const JointEvolution& joint, bool header) {
  if (header) out << "phase,range_t,range_next,count,mean_log_duration_next,mean_log_frequency_next,persistence_next,present\n";
  for (auto a : kAllRangeBins)
    for (auto b : kAllRangeBins) {
      const auto& c = joint.cells[bin_index(a)][bin_index(b)];
      out << joint.phase << ',' << bin_name(a) << ',' << bin_name(b) << ',' << c.count << ',';
      if (!c.present()) {
        out << ",,,0\n";
        continue;
      }
      out << format_double(c.log_duration_next.mean) << ',' << format_double(c.log_frequency_next.mean) << ',';
      if (c.persistence_next) out << format_double(*c.persistence_next);
      out << ",1\n";
    }
}

void write_lifespan_csv(std::ostream& out, std::span<const std::string> labels, std::span<const Lifespan> spans) {
  out << "u,v,lifespan\n";
  for (const auto& s : spans) out << labels[s.pair.u] << ',' << labels[s.pair.v] << ',' << s.phases << '\n';
}

void write_lifespan_by_range_csv(std::ostream& out, int reference, const std::array<MeanCi, kNumRangeBins>& by_range,
                                 bool header) {
  if (header) out << "reference_phase,tie_range,n,mean,ci_low,ci_high,present\n";
  for (auto b : kAllRangeBins) {
    out << reference << ',' << bin_name(b) << ',';
    write_mean(out, by_range[bin_index(b)]);
    out << '\n';
  }
}

void write_degree_rates_csv(std::ostream& out, const DegreeAnalysis& analysis) {
  out << "phase,degree,incident_ties,long_ties,rate\n";
  for (const auto& r : analysis.rates)
    out << analysis.phase << ',' << r.degree << ',' << r.incident_ties << ',' << r.long_ties << ','
        << format_double(r.rate) << '\n';
}

void write_benefit_by_range_csv(std::ostream& out, const BenefitByRange& b, const std::string& group, bool header) {
  if (header) out << "group,panel,key,n,mean,ci_low,ci_high,present\n";
  for (auto bin : kAllRangeBins) {
    out << group << ",total," << bin_name(bin) << ',';
    write_mean(out, b.total[bin_index(bin)]);
    out << '\n';
  }
  for (auto bin : kAllRangeBins) {
    out << group << ",direct," << bin_name(bin) << ',';
    write_mean(out, b.direct[bin_index(bin)]);
    out << '\n';
  }
  for (const auto& [k, m] : b.common_neighbor_indirect) {
    out << group << ",common_neighbor_indirect," << k << ',';
    write_mean(out, m);
    out << '\n';
  }
}

nlohmann::json to_json_value(const MeanCi& m) {
  if (!m.present()) return {{"n", 0}, {"present", false}};
  return {{"n", m.n}, {"mean", m.mean}, {"ci_low", m.ci_low}, {"ci_high", m.ci_high}, {"present", true}};
}

nlohmann::json to_json_value(const StrengthSeries& s) {
  nlohmann::json j = {{"baseline", s.baseline},
                      {"metric", metric_name(s.metric)},
                      {"conditioning", conditioning_name(s.conditioning)}};
  for (auto b : kAllRangeBins) {
    auto& row = j["by_range"][bin_name(b)] = nlohmann::json::array();
    for (const auto& m : s.by_bin[bin_index(b)]) row.push_back(to_json_value(m));
  }
  return j;
}

nlohmann::json to_json_value(const Decomposition& d) {
  if (!d.present()) return {{"n_baseline", 0}, {"present", false}};
  return {{"n_baseline", d.n_baseline},
          {"n_persisting", d.n_persisting},
          {"persistence", d.persistence},
          {"mean_baseline_given_both", d.mean_baseline_given_both},
          {"increment", d.increment},
          {"conditional_mean", d.conditional_mean},
          {"present", true}};
}

nlohmann::json to_json_value(const TransitionMatrix& m) {
  nlohmann::json j = {{"from_phase", m.from_phase},
                      {"to_phase", m.to_phase},
                      {"excluded_infinite", m.excluded_infinite},
                      {"dissolved", m.dissolved}};
  j["counts"] = m.counts;
  j["probabilities"] = m.probabilities;
  j["row_counts"] = m.row_counts;
  return j;
}

nlohmann::json to_json_value(const JointEvolution& joint) {
  nlohmann::json j = {{"phase", joint.phase}, {"has_persistence", joint.has_persistence}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (auto a : kAllRangeBins)
    for (auto b : kAllRangeBins) {
      const auto& c = joint.cells[bin_index(a)][bin_index(b)];
      nlohmann::json cell = {{"range_t", bin_name(a)}, {"range_next", bin_name(b)}, {"count", c.count}};
      if (c.present()) {
        cell["mean_log_duration_next"] = c.log_duration_next.mean;
        cell["mean_log_frequency_next"] = c.log_frequency_next.mean;
        cell["persistence_next"] = c.persistence_next ? nlohmann::json(*c.persistence_next) : nlohmann::json(nullptr);
      }
      cells.push_back(std::move(cell));
    }
  return j;
}

nlohmann::json to_json_value(const RangeDistribution& d) {
  nlohmann::json j = {{"total", d.total}};
  for (auto b : kAllRangeBins)
    j["by_range"][bin_name(b)] = {{"count", d.counts[bin_index(b)]}, {"proportion", d.proportions[bin_index(b)]}};
  return j;
}

nlohmann::json to_json_value(const BenefitByRange& b) {
  nlohmann::json j;
  for (auto bin : kAllRangeBins) {
    j["total"][bin_name(bin)] = to_json_value(b.total[bin_index(bin)]);
    j["direct"][bin_name(bin)] = to_json_value(b.direct[bin_index(bin)]);
  }
  j["common_neighbor_indirect"] = nlohmann::json::object();
  for (const auto& [k, m] : b.common_neighbor_indirect) j["common_neighbor_indirect"][std::to_string(k)] = to_json_value(m);
  return j;
}

}  // namespace longtie
