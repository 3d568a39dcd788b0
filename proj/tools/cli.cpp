#include "cli.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "longtie/config.hpp"
#include "longtie/dynamics.hpp"
#include "longtie/error.hpp"
#include "longtie/fitting.hpp"
#include "longtie/formation_model.hpp"
#include "longtie/parallel.hpp"
#include "longtie/random.hpp"
#include "longtie/report.hpp"
#include "longtie/synth.hpp"
#include "longtie/temporal_graph.hpp"
#include "longtie/tie_range.hpp"

#ifndef LONGTIE_VERSION
#define LONGTIE_VERSION "0.0.0"
#endif

namespace longtie::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class FilterSetting { Fixpoint, SinglePass, None };

const char* filter_name(FilterSetting f) {
  switch (f) {
    case FilterSetting::Fixpoint: return "fixpoint";
    case FilterSetting::SinglePass: return "single_pass";
    case FilterSetting::None: return "none";
  }
  return "fixpoint";
}

struct Analysis {
  int baseline = 0;   // dynamics, transitions reference for series
  int reference = 1;  // new-existing
  int phase = 0;      // tie-range, degree, benefit-by-range
  double fraction = 0.05;
  std::string target = "both";  // sensitivity: nodes | edges | both
  std::vector<std::size_t> dims{2, 4, 6, 8};
  int sim_phases = 4;
};

/// Everything that determines a run's outputs besides the input files.
struct RunConfig {
  PhaseConfig phase;
  FilterSetting filter = FilterSetting::Fixpoint;
  std::uint32_t cap = kDefaultCap;
  ModelParams model;
  FitConfig fit;
  SynthSpec synth;
  Analysis analysis;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
};

json analysis_json(const Analysis& a) {
  return {{"baseline", a.baseline}, {"reference", a.reference}, {"phase", a.phase},   {"fraction", a.fraction},
          {"target", a.target},     {"dims", a.dims},           {"sim_phases", a.sim_phases}};
}

void analysis_from_json(const json& j, Analysis& a) {
  static const std::set<std::string> known{"baseline", "reference", "phase",     "fraction",
                                           "target",   "dims",      "sim_phases"};
  if (!j.is_object()) throw InvalidArgument("analysis config must be a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw InvalidArgument("unknown analysis config key '" + k + "'");
  if (j.contains("baseline")) a.baseline = j["baseline"].get<int>();
  if (j.contains("reference")) a.reference = j["reference"].get<int>();
  if (j.contains("phase")) a.phase = j["phase"].get<int>();
  if (j.contains("fraction")) a.fraction = j["fraction"].get<double>();
  if (j.contains("target")) a.target = j["target"].get<std::string>();
  if (j.contains("dims")) a.dims = j["dims"].get<std::vector<std::size_t>>();
  if (j.contains("sim_phases")) a.sim_phases = j["sim_phases"].get<int>();
}

/// The part of the configuration covered by the config hash.
json config_json(const RunConfig& c) {
  json fit = c.fit;
  return {{"phase", c.phase},   {"filter", filter_name(c.filter)}, {"cap", c.cap},
          {"model", c.model},   {"fit", fit},                      {"synth", c.synth},
          {"analysis", analysis_json(c.analysis)}};
}

void apply_config_json(const json& j, RunConfig& c) {
  static const std::set<std::string> known{"phase", "filter", "cap",  "model",  "fit",
                                           "synth", "analysis", "seed", "threads"};
  if (!j.is_object()) throw InvalidArgument("config file must hold a JSON object");
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw InvalidArgument("unknown config key '" + k + "'");
  try {
    if (j.contains("phase")) from_json(j["phase"], c.phase);
    if (j.contains("filter")) {
      const auto f = j["filter"].get<std::string>();
      if (f == "fixpoint") c.filter = FilterSetting::Fixpoint;
      else if (f == "single_pass") c.filter = FilterSetting::SinglePass;
      else if (f == "none") c.filter = FilterSetting::None;
      else throw InvalidArgument("filter must be 'fixpoint', 'single_pass' or 'none'");
    }
    if (j.contains("cap")) c.cap = j["cap"].get<std::uint32_t>();
    if (j.contains("model")) from_json(j["model"], c.model);
    if (j.contains("fit")) from_json(j["fit"], c.fit);
    if (j.contains("synth")) from_json(j["synth"], c.synth);
    if (j.contains("analysis")) analysis_from_json(j["analysis"], c.analysis);
    if (j.contains("seed") && !j["seed"].is_null()) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("threads")) c.threads = j["threads"].get<unsigned>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
}

void load_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config file '" + path + "' is not valid JSON: " + e.what());
  }
  // A manifest replays the run it describes.
  if (j.is_object() && j.value("format", "") == "longtie-manifest") {
    json replay = j.at("config");
    replay["seed"] = j.at("seed");
    j = std::move(replay);
  }
  apply_config_json(j, c);
}

std::string fnv1a_file(const fs::path& p, std::uintmax_t& bytes) {
  std::ifstream in(p, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  bytes = 0;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    for (std::streamsize k = 0; k < in.gcount(); ++k) {
      h ^= static_cast<unsigned char>(buf[k]);
      h *= 0x100000001b3ULL;
    }
    bytes += static_cast<std::uintmax_t>(in.gcount());
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

/// Collects outputs and writes the manifest last.
class Run {
 public:
  Run(std::string subcommand, RunConfig config, fs::path out_dir)
      : sub_(std::move(subcommand)), cfg_(std::move(config)), dir_(std::move(out_dir)) {
    fs::create_directories(dir_);
  }

  const RunConfig& config() const { return cfg_; }
  RunConfig& config() { return cfg_; }
  unsigned threads() const { return cfg_.threads == 0 ? default_threads() : cfg_.threads; }

  void add_input(const std::string& path) { inputs_.push_back(path); }

  template <class Fn>
  void write(const std::string& name, Fn&& fn) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    fn(out);
    out.flush();
    if (!out) throw Error("write failed for '" + path.string() + "'");
    outputs_.insert(name);
    spdlog::info("wrote {}", path.string());
  }

  json metadata() const {
    json m = {{"subcommand", sub_}, {"version", LONGTIE_VERSION}, {"config_hash", config_hash(config_json(cfg_))}};
    m["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
    return m;
  }

  void finish() {
    json m;
    m["format"] = "longtie-manifest";
    m["versions"] = {{"longtie", LONGTIE_VERSION}, {"manifest", 1}};
    m["subcommand"] = sub_;
    m["seed"] = cfg_.seed ? json(*cfg_.seed) : json(nullptr);
    m["threads"] = cfg_.threads;
    m["config"] = config_json(cfg_);
    m["config_hash"] = config_hash(m["config"]);
    auto& ins = m["inputs"] = json::array();
    for (const auto& p : inputs_) {
      std::uintmax_t bytes = 0;
      const auto h = fnv1a_file(p, bytes);
      ins.push_back({{"path", p}, {"bytes", bytes}, {"fnv1a64", h}});
    }
    auto& outs = m["outputs"] = json::array();
    for (const auto& name : outputs_) {
      std::uintmax_t bytes = 0;
      const auto h = fnv1a_file(dir_ / name, bytes);
      outs.push_back({{"file", name}, {"bytes", bytes}, {"fnv1a64", h}});
    }
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
    if (!out) throw Error("cannot write manifest");
  }

 private:
  std::string sub_;
  RunConfig cfg_;
  fs::path dir_;
  std::vector<std::string> inputs_;
  std::set<std::string> outputs_;
};

// ---------------------------------------------------------------------------
// Inputs

void require_file(const std::string& path, const char* flag) {
  if (path.empty()) throw InvalidArgument(std::string(flag) + " is required");
  if (!fs::is_regular_file(path)) throw InvalidArgument(std::string(flag) + " '" + path + "' does not exist");
}

TemporalNetwork load_network(Run& run, const std::string& path) {
  require_file(path, "--input");
  run.add_input(path);
  const auto& c = run.config();
  const auto events = read_events_csv_file(path);
  auto net = ingest_events(events, c.phase);
  const auto before = net.num_nodes();
  if (c.filter != FilterSetting::None)
    for (const auto& snap : net.phases())
      if (snap.directed().empty())
        throw InvalidArgument("phase " + std::to_string(snap.index()) +
                              " has no interactions, so the active-node filter would remove every node; set "
                              "--total-months to the span of the data (or pass --no-filter)");
  if (c.filter != FilterSetting::None)
    net = filter_active_nodes(net, c.filter == FilterSetting::Fixpoint ? FilterMode::Fixpoint : FilterMode::SinglePass);
  spdlog::info("ingested {} events: {} phases, {} nodes ({} after filter)", events.size(), net.num_phases(), before,
               net.num_nodes());
  return net;
}

struct LabeledGraph {
  std::vector<std::string> labels;
  Graph graph;
};

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

/// Edge list CSV with header `u,v`. With `known` set, labels must come from it.
LabeledGraph read_edge_list(const std::string& path, const std::vector<std::string>* known = nullptr) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty edge list");
  ++lineno;
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "u,v") throw ParseError(1, "expected header 'u,v'");
  std::vector<std::pair<std::string, std::string>> rows;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto f = split_csv_line(line);
    if (f.size() != 2 || f[0].empty() || f[1].empty()) throw ParseError(lineno, "expected two fields 'u,v'");
    if (f[0] == f[1]) throw ParseError(lineno, "self-loop on '" + f[0] + "'");
    rows.emplace_back(f[0], f[1]);
  }
  LabeledGraph out;
  if (known) {
    out.labels = *known;
  } else {
    std::set<std::string> s;
    for (const auto& [a, b] : rows) s.insert(a), s.insert(b);
    out.labels.assign(s.begin(), s.end());
    std::sort(out.labels.begin(), out.labels.end(), label_less);
  }
  std::map<std::string, NodeIndex> index;
  for (std::size_t i = 0; i < out.labels.size(); ++i) index.emplace(out.labels[i], static_cast<NodeIndex>(i));
  std::vector<Edge> edges;
  for (const auto& [a, b] : rows) {
    auto ia = index.find(a), ib = index.find(b);
    if (ia == index.end() || ib == index.end())
      throw InvalidArgument("edge list node '" + (ia == index.end() ? a : b) + "' has no endowment row");
    edges.push_back(make_edge(ia->second, ib->second));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  out.graph = Graph::from_edges(static_cast<NodeIndex>(out.labels.size()), std::span<const Edge>(edges));
  return out;
}

void write_edge_list(std::ostream& out, const Graph& g, std::span<const std::string> labels) {
  out << "u,v\n";
  for (const auto& e : g.edges()) out << labels[e.u] << ',' << labels[e.v] << '\n';
}

Checkpoint load_checkpoint(Run& run, const std::string& path) {
  require_file(path, "--endowments");
  run.add_input(path);
  std::ifstream in(path);
  return read_checkpoint(in);
}

/// Rows of `cp` reordered to the node order of `labels`.
Endowments align_endowments(const Checkpoint& cp, std::span<const std::string> labels) {
  std::map<std::string, NodeIndex> index;
  for (std::size_t i = 0; i < cp.labels.size(); ++i) index.emplace(cp.labels[i], static_cast<NodeIndex>(i));
  Endowments w(static_cast<NodeIndex>(labels.size()), cp.w.dims());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = index.find(labels[i]);
    if (it == index.end()) throw InvalidArgument("node '" + labels[i] + "' has no endowment row");
    auto src = cp.w.row(it->second);
    std::copy(src.begin(), src.end(), w.row(static_cast<NodeIndex>(i)).begin());
  }
  return w;
}

void check_phase(const TemporalNetwork& net, int t, const char* what) {
  if (t < 0 || t >= net.num_phases())
    throw InvalidArgument(std::string(what) + " " + std::to_string(t) + " outside [0, " +
                          std::to_string(net.num_phases()) + ")");
}

std::uint64_t require_seed(const RunConfig& c, const std::string& sub) {
  if (!c.seed) throw InvalidArgument("--seed is required for '" + sub + "'");
  return *c.seed;
}

void dump_json(std::ostream& out, const json& j) { out << j.dump(1) << '\n'; }

// ---------------------------------------------------------------------------
// Subcommands

struct Paths {
  std::string input;
  std::string edges;
  std::string endowments;
};

void cmd_ingest(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  run.write("snapshots.csv", [&](std::ostream& o) { write_snapshots_csv(o, net); });
  run.write("nodes.csv", [&](std::ostream& o) {
    o << "index,label\n";
    for (NodeIndex i = 0; i < net.num_nodes(); ++i) o << i << ',' << net.label(i) << '\n';
  });
  json summary = run.metadata();
  summary["nodes"] = net.num_nodes();
  auto& phases = summary["phases"] = json::array();
  for (const auto& s : net.phases())
    phases.push_back({{"phase", s.index()}, {"directed_pairs", s.directed().size()}, {"edges", s.undirected().num_edges()}});
  run.write("summary.json", [&](std::ostream& o) { dump_json(o, summary); });
}

void cmd_tie_range(Run& run, const Paths& p, bool phase_given) {
  const auto& c = run.config();
  auto emit = [&](const std::string& name, const Graph& g, std::span<const std::string> labels) {
    const auto ranges = tie_range_all(g, c.cap, run.threads());
    run.write(name, [&](std::ostream& o) { write_tie_ranges_csv(o, labels, ranges); });
    return range_distribution(ranges);
  };
  std::vector<RangeDistribution> dists;
  if (!p.edges.empty()) {
    require_file(p.edges, "--edges");
    run.add_input(p.edges);
    const auto lg = read_edge_list(p.edges);
    dists.push_back(emit("tie_range.csv", lg.graph, lg.labels));
  } else {
    const auto net = load_network(run, p.input);
    if (phase_given) {
      check_phase(net, c.analysis.phase, "--phase");
      dists.push_back(emit("tie_range.csv", net.phase(c.analysis.phase).undirected(), net.labels()));
    } else {
      for (int t = 0; t < net.num_phases(); ++t)
        dists.push_back(
            emit("tie_range_phase" + std::to_string(t) + ".csv", net.phase(t).undirected(), net.labels()));
    }
  }
  run.write("range_distribution.csv", [&](std::ostream& o) { write_range_distribution_csv(o, dists); });
}

void cmd_dynamics(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const auto& a = run.config().analysis;
  check_phase(net, a.baseline, "--baseline");
  const auto table = TieTable::build(net, run.threads());
  const int T = net.num_phases();

  std::vector<RangeDistribution> dists;
  for (int t = 0; t < T; ++t) {
    RangeDistribution d;
    for (auto k : table.present_at(t)) {
      ++d.counts[bin_index(*table.bin(t, k))];
      ++d.total;
    }
    for (std::size_t b = 0; b < kNumRangeBins; ++b)
      d.proportions[b] = d.total ? static_cast<double>(d.counts[b]) / static_cast<double>(d.total) : 0.0;
    dists.push_back(d);
  }

  std::vector<StrengthSeries> series;
  for (auto m : {Metric::Frequency, Metric::Duration})
    for (auto cond : {Conditioning::Unconditional, Conditioning::Surviving})
      series.push_back(strength_series(table, a.baseline, m, cond));

  std::vector<DecompositionRow> decomp;
  for (auto m : {Metric::Frequency, Metric::Duration})
    for (int t = a.baseline + 1; t < T; ++t) {
      bool any = false;
      for (auto k : table.present_at(a.baseline)) any = any || table.raw(a.baseline, k, m) > 0;
      DecompositionRow row{"all", m, a.baseline, t, {}};
      if (any) row.by_bin = decompose_by_range(table, a.baseline, t, m);
      decomp.push_back(row);
    }

  std::vector<JointEvolution> joint;
  for (int t = 0; t + 1 < T; ++t) joint.push_back(joint_evolution(table, t));

  run.write("range_distribution.csv", [&](std::ostream& o) { write_range_distribution_csv(o, dists); });
  run.write("strength_series.csv", [&](std::ostream& o) { write_strength_series_csv(o, series); });
  run.write("decomposition.csv", [&](std::ostream& o) { write_decomposition_csv(o, decomp); });
  run.write("joint_evolution.csv", [&](std::ostream& o) {
    if (joint.empty())
      o << "phase,range_t,range_next,count,mean_log_duration_next,mean_log_frequency_next,persistence_next,present\n";
    for (std::size_t k = 0; k < joint.size(); ++k) write_joint_evolution_csv(o, joint[k], k == 0);
  });

  json report = run.metadata();
  report["nodes"] = net.num_nodes();
  report["ties"] = table.num_ties();
  for (const auto& d : dists) report["range_distribution"].push_back(to_json_value(d));
  for (const auto& s : series) report["strength_series"].push_back(to_json_value(s));
  for (const auto& r : decomp) {
    json row = {{"metric", metric_name(r.metric)}, {"baseline", r.baseline}, {"phase", r.phase}};
    for (auto b : kAllRangeBins) row["by_range"][bin_name(b)] = to_json_value(r.by_bin[bin_index(b)]);
    report["decomposition"].push_back(row);
  }
  for (const auto& j : joint) report["joint_evolution"].push_back(to_json_value(j));
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_transitions(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const auto table = TieTable::build(net, run.threads());
  std::vector<TransitionMatrix> mats;
  for (int t = 0; t + 1 < net.num_phases(); ++t) mats.push_back(transition_matrix(table, t, t + 1));
  run.write("transitions.csv", [&](std::ostream& o) { write_transition_csv(o, mats); });
  json report = run.metadata();
  report["matrices"] = json::array();
  for (const auto& m : mats) report["matrices"].push_back(to_json_value(m));
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_lifespan(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const auto table = TieTable::build(net, run.threads());
  const auto spans = lifespan(table);
  run.write("lifespan.csv", [&](std::ostream& o) { write_lifespan_csv(o, net.labels(), spans); });
  json report = run.metadata();
  run.write("lifespan_by_range.csv", [&](std::ostream& o) {
    for (int t = 0; t < net.num_phases(); ++t) {
      const auto by = lifespan_by_range(table, t);
      write_lifespan_by_range_csv(o, t, by, t == 0);
      json row = {{"reference_phase", t}};
      for (auto b : kAllRangeBins) row["by_range"][bin_name(b)] = to_json_value(by[bin_index(b)]);
      report["lifespan_by_range"].push_back(row);
    }
  });
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_degree(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const int t = run.config().analysis.phase;
  check_phase(net, t, "--phase");
  const auto table = TieTable::build(net, run.threads());
  const auto da = degree_analysis(table, net, t);
  run.write("degree_rates.csv", [&](std::ostream& o) { write_degree_rates_csv(o, da); });
  run.write("degree_series.csv", [&](std::ostream& o) {
    write_strength_series_csv(o, da.low_series, "low_degree", true);
    if (!da.high_ties.empty()) write_strength_series_csv(o, da.high_series, "high_degree", false);
  });
  json report = run.metadata();
  report["phase"] = t;
  report["median_degree"] = da.median_degree;
  report["low_degree_ties"] = da.low_ties.size();
  report["high_degree_ties"] = da.high_ties.size();
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_new_existing(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const int r = run.config().analysis.reference;
  check_phase(net, r, "--reference");
  const auto table = TieTable::build(net, run.threads());
  const auto prof = new_existing_profiles(table, r);
  run.write("new_existing_series.csv", [&](std::ostream& o) {
    write_strength_series_csv(o, prof.new_series, "new", true);
    write_strength_series_csv(o, prof.existing_series, "existing", false);
  });
  std::vector<DecompositionRow> rows;
  const Metric metrics[2] = {Metric::Frequency, Metric::Duration};
  for (int m = 0; m < 2; ++m) {
    for (std::size_t k = 0; k < prof.new_decomposition[m].size(); ++k)
      rows.push_back({"new", metrics[m], r, r + 1 + static_cast<int>(k), prof.new_decomposition[m][k]});
    for (std::size_t k = 0; k < prof.existing_decomposition[m].size(); ++k)
      rows.push_back({"existing", metrics[m], r, r + 1 + static_cast<int>(k), prof.existing_decomposition[m][k]});
  }
  run.write("new_existing_decomposition.csv", [&](std::ostream& o) { write_decomposition_csv(o, rows); });
  json report = run.metadata();
  report["reference_phase"] = r;
  report["new_ties"] = prof.new_ties.size();
  report["existing_ties"] = prof.existing_ties.size();
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_sensitivity(Run& run, const Paths& p) {
  const auto seed = require_seed(run.config(), "sensitivity");
  const auto net = load_network(run, p.input);
  const auto& a = run.config().analysis;
  if (!(a.fraction > 0.0 && a.fraction < 1.0)) throw InvalidArgument("--fraction must lie in (0, 1)");
  std::vector<std::pair<std::string, DropTarget>> variants;
  if (a.target == "nodes" || a.target == "both") variants.emplace_back("drop_nodes", DropTarget::Nodes);
  if (a.target == "edges" || a.target == "both") variants.emplace_back("drop_edges", DropTarget::Edges);
  if (variants.empty()) throw InvalidArgument("--target must be 'nodes', 'edges' or 'both'");
  const auto cap = run.config().cap;
  json report = run.metadata();
  run.write("sensitivity.csv", [&](std::ostream& o) {
    o << "variant,phase,tie_range,count,proportion\n";
    auto row = [&](const std::string& name, int t, const RangeDistribution& d) {
      json jd = to_json_value(d);
      jd["variant"] = name;
      jd["phase"] = t;
      report["distributions"].push_back(jd);
      for (auto b : kAllRangeBins)
        o << name << ',' << t << ',' << bin_name(b) << ',' << d.counts[bin_index(b)] << ','
          << format_double(d.proportions[bin_index(b)]) << '\n';
    };
    for (int t = 0; t < net.num_phases(); ++t) {
      const auto& g = net.phase(t).undirected();
      row("original", t, range_distribution(g, cap, run.threads()));
      for (std::size_t v = 0; v < variants.size(); ++v) {
        const auto dropped = drop_random(g, a.fraction, variants[v].second,
                                         derive_seed(seed, 100 * static_cast<std::uint64_t>(t) + v));
        row(variants[v].first, t, range_distribution(dropped, cap, run.threads()));
      }
    }
  });
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_simulate(Run& run, const Paths& p) {
  const auto seed = require_seed(run.config(), "simulate");
  const auto cp = load_checkpoint(run, p.endowments);
  require_file(p.edges, "--edges");
  run.add_input(p.edges);
  const auto lg = read_edge_list(p.edges, &cp.labels);
  const auto& c = run.config();
  // Same stream as `synth`, so replaying its planted endowments reproduces its events.
  const auto sim = simulate(lg.graph, cp.w, c.model, c.analysis.sim_phases, derive_seed(seed, 13),
                            c.phase.window_months, cp.labels);
  const auto events = network_to_events(sim.network);
  run.write("events.csv", [&](std::ostream& o) { write_events_csv(o, events); });
  run.write("snapshots.csv", [&](std::ostream& o) { write_snapshots_csv(o, sim.network); });
  json report = run.metadata();
  for (const auto& s : sim.states)
    report["phases"].push_back({{"phase", s.phase}, {"edges", s.graph.num_edges()}, {"c_init", s.c_init_used}});
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void write_fit_outputs(Run& run, const FitResult& fr, std::span<const std::string> labels, const FitConfig& fc) {
  run.write("endowments.json", [&](std::ostream& o) { write_checkpoint(o, fr, labels, fc); });
  run.write("learning_curve.csv", [&](std::ostream& o) { write_learning_curve_csv(o, fr.curve); });
}

FitConfig fit_config(const Run& run, const std::string& sub) {
  auto fc = run.config().fit;
  fc.seed = require_seed(run.config(), sub);
  fc.threads = run.threads();
  fc.validate();
  return fc;
}

void cmd_fit(Run& run, const Paths& p) {
  const auto fc = fit_config(run, "fit");
  const auto net = load_network(run, p.input);
  const auto fr = fit(net, fc);
  write_fit_outputs(run, fr, net.labels(), fc);
  json report = run.metadata();
  report["delta"] = fr.delta;
  report["epochs"] = fr.curve.size();
  report["stop"] = stop_reason_name(fr.stop);
  report["final_test_loss"] = fr.final_test_loss();
  report["train_tasks"] = fr.train_tasks.size();
  report["test_tasks"] = fr.test_tasks.size();
  report["skipped_targets"] = fr.skipped_targets;
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_grid_delta(Run& run, const Paths& p) {
  const auto fc = fit_config(run, "grid-delta");
  const auto net = load_network(run, p.input);
  const auto gs = grid_search_delta(net, fc);
  run.write("grid.csv", [&](std::ostream& o) {
    o << "delta,final_test_loss,epochs\n";
    for (const auto& r : gs.rows) o << format_double(r.delta) << ',' << format_double(r.final_test_loss) << ',' << r.epochs << '\n';
  });
  auto best_cfg = fc;
  best_cfg.delta = gs.best_delta;
  write_fit_outputs(run, gs.best_fit, net.labels(), best_cfg);
  json report = run.metadata();
  report["best_delta"] = gs.best_delta;
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_dim_sweep(Run& run, const Paths& p) {
  const auto fc = fit_config(run, "dim-sweep");
  const auto net = load_network(run, p.input);
  const auto rows = dimension_sweep(net, run.config().analysis.dims, fc);
  run.write("dim_sweep.csv", [&](std::ostream& o) {
    o << "dims,final_train_loss,final_test_loss,epochs\n";
    for (const auto& r : rows)
      o << r.dims << ',' << format_double(r.final_train_loss) << ',' << format_double(r.final_test_loss) << ','
        << r.epochs << '\n';
  });
  run.write("benefit_by_range.csv", [&](std::ostream& o) {
    for (std::size_t k = 0; k < rows.size(); ++k)
      write_benefit_by_range_csv(o, rows[k].benefits, "K=" + std::to_string(rows[k].dims), k == 0);
  });
  json report = run.metadata();
  for (const auto& r : rows) {
    json jr = to_json_value(r.benefits);
    jr["dims"] = r.dims;
    jr["final_test_loss"] = r.final_test_loss;
    report["rows"].push_back(jr);
  }
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

void cmd_synth(Run& run) {
  auto& c = run.config();
  SynthSpec spec = c.synth;
  spec.params = c.model;
  spec.window_months = c.phase.window_months;
  spec.seed = require_seed(c, "synth");
  // The emitted events cover exactly the simulated phases.
  c.phase.total_months = spec.phases * spec.window_months;
  const auto out = generate(spec);
  std::vector<std::string> labels(spec.nodes);
  for (NodeIndex i = 0; i < spec.nodes; ++i) labels[i] = std::to_string(i);
  run.write("events.csv", [&](std::ostream& o) { write_events_csv(o, out.events); });
  run.write("initial_edges.csv", [&](std::ostream& o) { write_edge_list(o, out.initial, labels); });
  run.write("truth.json", [&](std::ostream& o) { write_truth_json(o, spec, out); });
  // Planted endowments in checkpoint form, usable by `simulate` and `benefit-by-range`.
  run.write("planted_endowments.json", [&](std::ostream& o) {
    FitResult fr;
    fr.w = out.w;
    fr.delta = spec.params.delta;
    FitConfig fc = c.fit;
    fc.dims = spec.dims;
    fc.delta = spec.params.delta;
    write_checkpoint(o, fr, labels, fc);
  });
  run.write("config.json", [&](std::ostream& o) {
    json j = config_json(c);
    j["seed"] = spec.seed;
    dump_json(o, j);
  });
}

void cmd_benefit_by_range(Run& run, const Paths& p) {
  const auto net = load_network(run, p.input);
  const auto cp = load_checkpoint(run, p.endowments);
  const int t = run.config().analysis.phase;
  check_phase(net, t, "--phase");
  const auto w = align_endowments(cp, net.labels());
  const double delta = cp.delta;
  const auto& g = net.phase(t).undirected();
  const auto ranges = tie_range_all(g, run.config().cap, run.threads());
  const auto b = benefit_by_range(g, ranges, w, delta);
  run.write("benefit_by_range.csv", [&](std::ostream& o) { write_benefit_by_range_csv(o, b); });
  json report = to_json_value(b);
  report.update(run.metadata());
  report["phase"] = t;
  report["delta"] = delta;
  run.write("report.json", [&](std::ostream& o) { dump_json(o, report); });
}

// ---------------------------------------------------------------------------

void print_error(std::ostream& err, const std::string& kind, const std::string& message, const std::string& sub,
                 std::optional<std::size_t> line = std::nullopt) {
  json e = {{"kind", kind}, {"message", message}};
  if (!sub.empty()) e["subcommand"] = sub;
  if (line) e["line"] = *line;
  err << json{{"error", e}}.dump() << '\n';
}

void setup_logging() {
  auto logger = spdlog::get("longtie");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("longtie");
    logger->set_pattern("[%l] %v");
  }
  spdlog::set_default_logger(logger);
  spdlog::level::level_enum level = spdlog::level::warn;
  if (const char* env = std::getenv("LONGTIE_LOG_LEVEL")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  setup_logging();

  CLI::App app{"Tie-range dynamics and strategic network formation toolkit", "longtie"};
  app.set_version_flag("--version", LONGTIE_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<int> window, total, phase, baseline, reference, phases, epochs;
  std::optional<std::uint32_t> cap;
  std::optional<double> fraction, delta;
  std::optional<std::size_t> fit_dims;
  std::string target;
  std::vector<std::size_t> sweep_dims;
  std::optional<NodeIndex> nodes;
  bool no_filter = false, single_pass = false;
  Paths paths;

  auto common = [&](CLI::App* s, bool needs_input) {
    s->add_option("--config", config_path, "JSON config file or a manifest to replay")->check(CLI::ExistingFile);
    s->add_option("--seed", seed, "random seed");
    s->add_option("--threads", threads, "worker threads (0 = all cores)");
    s->add_option("--window-months", window, "months per phase");
    s->add_option("--total-months", total, "months covered by the input");
    s->add_option("--out", out_dir, "output directory")->required();
    if (needs_input) {
      s->add_option("--input", paths.input, "interaction event CSV");
      s->add_flag("--no-filter", no_filter, "keep nodes that are silent in some phase");
      s->add_flag("--single-pass", single_pass, "apply the active-node filter once");
    }
  };

  auto* ingest = app.add_subcommand("ingest", "aggregate events into phase snapshots");
  common(ingest, true);
  auto* tr = app.add_subcommand("tie-range", "tie range of every edge");
  common(tr, true);
  tr->add_option("--edges", paths.edges, "edge list CSV `u,v` instead of --input");
  auto* tr_phase = tr->add_option("--phase", phase, "single phase to analyse");
  tr->add_option("--cap", cap, "distance at which ranges saturate");
  auto* dyn = app.add_subcommand("dynamics", "strength series, decompositions and joint evolution");
  common(dyn, true);
  dyn->add_option("--baseline", baseline, "baseline phase");
  auto* trans = app.add_subcommand("transitions", "range transition matrices between consecutive phases");
  common(trans, true);
  auto* life = app.add_subcommand("lifespan", "tie lifespans by range class");
  common(life, true);
  auto* deg = app.add_subcommand("degree", "long-tie rate by degree and degree-split series");
  common(deg, true);
  deg->add_option("--phase", phase, "phase whose degrees are used");
  auto* ne = app.add_subcommand("new-existing", "new versus existing tie profiles");
  common(ne, true);
  ne->add_option("--reference", reference, "reference phase (>= 1)");
  auto* sens = app.add_subcommand("sensitivity", "range distributions after random node/edge removal");
  common(sens, true);
  sens->add_option("--fraction", fraction, "share removed");
  sens->add_option("--target", target, "nodes, edges or both");
  auto* sim = app.add_subcommand("simulate", "run the formation model from a graph and endowments");
  common(sim, false);
  sim->add_option("--edges", paths.edges, "initial edge list CSV `u,v`");
  sim->add_option("--endowments", paths.endowments, "endowment checkpoint JSON");
  sim->add_option("--phases", phases, "phases to simulate");
  sim->add_option("--delta", delta, "depreciation of indirect benefits");
  auto* fitc = app.add_subcommand("fit", "learn endowments from observed phases");
  common(fitc, true);
  fitc->add_option("--dims", fit_dims, "endowment dimension K");
  fitc->add_option("--delta", delta, "depreciation of indirect benefits");
  fitc->add_option("--epochs", epochs, "maximum epochs");
  auto* grid = app.add_subcommand("grid-delta", "fit over a delta grid and keep the best");
  common(grid, true);
  grid->add_option("--dims", fit_dims, "endowment dimension K");
  grid->add_option("--epochs", epochs, "maximum epochs");
  auto* dims = app.add_subcommand("dim-sweep", "fit for several endowment dimensions");
  common(dims, true);
  dims->add_option("--dims", sweep_dims, "dimensions to try")->delimiter(',');
  dims->add_option("--epochs", epochs, "maximum epochs");
  auto* syn = app.add_subcommand("synth", "generate synthetic events with planted endowments");
  common(syn, false);
  syn->add_option("--nodes", nodes, "number of nodes");
  syn->add_option("--dims", fit_dims, "endowment dimension K");
  syn->add_option("--phases", phases, "phases to simulate");
  syn->add_option("--delta", delta, "depreciation of indirect benefits");
  auto* bbr = app.add_subcommand("benefit-by-range", "model benefits grouped by tie range");
  common(bbr, true);
  bbr->add_option("--endowments", paths.endowments, "endowment checkpoint JSON");
  bbr->add_option("--phase", phase, "phase whose graph is used");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << LONGTIE_VERSION << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::string sub;
    for (auto* s : app.get_subcommands()) sub = s->get_name();
    print_error(err, "usage", e.what(), sub);
    return 2;
  }

  auto* chosen = app.get_subcommands().front();
  const std::string sub = chosen->get_name();
  try {
    RunConfig cfg;
    if (!config_path.empty()) load_config_file(config_path, cfg);
    if (seed) cfg.seed = seed;
    if (threads) cfg.threads = *threads;
    if (window) cfg.phase.window_months = *window;
    if (total) cfg.phase.total_months = *total;
    if (no_filter && single_pass) throw InvalidArgument("--no-filter and --single-pass are exclusive");
    if (no_filter) cfg.filter = FilterSetting::None;
    if (single_pass) cfg.filter = FilterSetting::SinglePass;
    if (cap) cfg.cap = *cap;
    if (phase) cfg.analysis.phase = *phase;
    if (baseline) cfg.analysis.baseline = *baseline;
    if (reference) cfg.analysis.reference = *reference;
    if (fraction) cfg.analysis.fraction = *fraction;
    if (!target.empty()) cfg.analysis.target = target;
    if (!sweep_dims.empty()) cfg.analysis.dims = sweep_dims;
    if (phases) cfg.analysis.sim_phases = cfg.synth.phases = *phases;
    if (delta) cfg.model.delta = cfg.fit.delta = *delta;
    if (fit_dims) cfg.fit.dims = cfg.synth.dims = *fit_dims;
    if (epochs) cfg.fit.max_epochs = *epochs;
    if (nodes) cfg.synth.nodes = *nodes;
    if (cfg.cap < 2) throw InvalidArgument("--cap must be at least 2");
    cfg.phase.validate();
    cfg.model.validate();

    Run r(sub, cfg, out_dir);
    if (sub == "ingest") cmd_ingest(r, paths);
    else if (sub == "tie-range") cmd_tie_range(r, paths, tr_phase->count() > 0);
    else if (sub == "dynamics") cmd_dynamics(r, paths);
    else if (sub == "transitions") cmd_transitions(r, paths);
    else if (sub == "lifespan") cmd_lifespan(r, paths);
    else if (sub == "degree") cmd_degree(r, paths);
    else if (sub == "new-existing") cmd_new_existing(r, paths);
    else if (sub == "sensitivity") cmd_sensitivity(r, paths);
    else if (sub == "simulate") cmd_simulate(r, paths);
    else if (sub == "fit") cmd_fit(r, paths);
    else if (sub == "grid-delta") cmd_grid_delta(r, paths);
    else if (sub == "dim-sweep") cmd_dim_sweep(r, paths);
    else if (sub == "synth") cmd_synth(r);
    else if (sub == "benefit-by-range") cmd_benefit_by_range(r, paths);
    r.finish();
  } catch (const ParseError& e) {
    print_error(err, e.kind(), e.what(), sub, e.line());
    return 1;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what(), sub);
    return 1;
  } catch (const std::exception& e) {
    print_error(err, "internal", e.what(), sub);
    return 1;
  }
  return 0;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace longtie::cli
