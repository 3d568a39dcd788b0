#include "longtie/temporal_graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <tuple>

#include "longtie/error.hpp"

namespace longtie {

void PhaseConfig::validate() const {
  if (window_months <= 0) throw InvalidArgument("window_months must be positive");
  if (total_months <= 0) throw InvalidArgument("total_months must be positive");
  if (total_months % window_months != 0)
    throw InvalidArgument("total_months (" + std::to_string(total_months) + ") is not divisible by window_months (" +
                          std::to_string(window_months) + ")");
}

namespace {

std::vector<DirectedWeight> canonicalize(std::vector<DirectedWeight> in) {
  std::sort(in.begin(), in.end(), [](const auto& a, const auto& b) {
    return std::tie(a.src, a.dst) < std::tie(b.src, b.dst);
  });
  std::vector<DirectedWeight> out;
  out.reserve(in.size());
  for (const auto& d : in) {
    if (!out.empty() && out.back().src == d.src && out.back().dst == d.dst) {
      out.back().weight.frequency += d.weight.frequency;
      out.back().weight.duration += d.weight.duration;
    } else {
      out.push_back(d);
    }
  }
  std::erase_if(out, [](const auto& d) { return d.weight.frequency == 0 && d.weight.duration == 0; });
  return out;
}

}  // namespace

Graph undirected_view(NodeIndex num_nodes, std::span<const DirectedWeight> directed) {
  std::vector<WeightedEdge> edges;
  edges.reserve(directed.size());
  for (const auto& d : directed) {
    if (d.src == d.dst) throw InvalidArgument("self-loop in snapshot");
    edges.push_back({make_edge(d.src, d.dst), d.weight});
  }
  // Merge both directions first, then drop pairs with no frequency.
  auto g = Graph::from_edges(num_nodes, edges);
  auto merged = g.weighted_edges();
  std::erase_if(merged, [](const auto& e) { return e.weight.frequency == 0; });
  return Graph::from_edges(num_nodes, merged);
}

PhaseSnapshot::PhaseSnapshot(int index, NodeIndex num_nodes, std::vector<DirectedWeight> directed)
    : index_(index), directed_(canonicalize(std::move(directed))) {
  for (const auto& d : directed_)
    if (d.src >= num_nodes || d.dst >= num_nodes) throw InvalidArgument("snapshot node index out of range");
  undirected_ = longtie::undirected_view(num_nodes, directed_);
}

EdgeWeight PhaseSnapshot::directed_weight(NodeIndex src, NodeIndex dst) const {
  auto it = std::lower_bound(directed_.begin(), directed_.end(), std::pair{src, dst},
                             [](const DirectedWeight& d, const std::pair<NodeIndex, NodeIndex>& k) {
                               return std::pair{d.src, d.dst} < k;
                             });
  if (it == directed_.end() || it->src != src || it->dst != dst) return {};
  return it->weight;
}

TemporalNetwork::TemporalNetwork(PhaseConfig config, std::vector<std::string> labels, std::vector<PhaseSnapshot> phases)
    : config_(config), labels_(std::move(labels)), phases_(std::move(phases)) {
  for (std::size_t t = 0; t < phases_.size(); ++t) {
    if (phases_[t].index() != static_cast<int>(t)) throw InvalidArgument("phases must be ordered and contiguous");
    if (phases_[t].num_nodes() != labels_.size()) throw InvalidArgument("phase node universe differs from labels");
  }
  index_.reserve(labels_.size());
  for (NodeIndex i = 0; i < labels_.size(); ++i)
    if (!index_.emplace(labels_[i], i).second) throw InvalidArgument("duplicate node label '" + labels_[i] + "'");
}

std::optional<NodeIndex> TemporalNetwork::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool label_less(const std::string& a, const std::string& b) {
  auto numeric = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
  };
  const bool na = numeric(a), nb = numeric(b);
  if (na != nb) return na;
  if (na && a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

TemporalNetwork ingest_events(std::span<const InteractionEvent> events, const PhaseConfig& config) {
  config.validate();
  for (std::size_t r = 0; r < events.size(); ++r) {
    const auto& e = events[r];
    auto fail = [&](const std::string& why) {
      throw InvalidArgument("record " + std::to_string(r) + " (" + e.caller + " -> " + e.callee + "): " + why);
    };
    if (e.caller.empty() || e.callee.empty()) fail("empty node id");
    if (e.caller == e.callee) fail("self-loop");
    if (e.calls < 0 || e.texts < 0 || e.duration_s < 0) fail("negative count");
    if (e.month < 0 || e.month >= config.total_months)
      fail("month " + std::to_string(e.month) + " outside [0, " + std::to_string(config.total_months) + ")");
  }

  std::vector<std::string> labels;
  labels.reserve(events.size() * 2);
  for (const auto& e : events) {
    labels.push_back(e.caller);
    labels.push_back(e.callee);
  }
  std::sort(labels.begin(), labels.end(), label_less);
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::unordered_map<std::string, NodeIndex> index;
  index.reserve(labels.size());
  for (NodeIndex i = 0; i < labels.size(); ++i) index.emplace(labels[i], i);

  const int phases = config.num_phases();
  std::vector<std::vector<DirectedWeight>> per_phase(static_cast<std::size_t>(phases));
  for (const auto& e : events) {
    const auto calls = e.duration_s == 0 ? 0 : e.calls;
    per_phase[static_cast<std::size_t>(config.phase_of_month(e.month))].push_back(
        {index.at(e.caller), index.at(e.callee),
         EdgeWeight{static_cast<std::uint64_t>(calls + e.texts), static_cast<std::uint64_t>(e.duration_s)}});
  }
  std::vector<PhaseSnapshot> snaps;
  snaps.reserve(per_phase.size());
  const auto n = static_cast<NodeIndex>(labels.size());
  for (int t = 0; t < phases; ++t) snaps.emplace_back(t, n, std::move(per_phase[static_cast<std::size_t>(t)]));
  return TemporalNetwork(config, std::move(labels), std::move(snaps));
}

TemporalNetwork filter_active_nodes(const TemporalNetwork& net, FilterMode mode) {
  const NodeIndex n = net.num_nodes();
  std::vector<char> keep(n, 1);
  for (;;) {
    std::vector<char> next = keep;
    for (const auto& snap : net.phases()) {
      std::vector<char> active(n, 0);
      const auto& g = snap.undirected();
      for (NodeIndex x = 0; x < n; ++x) {
        if (!keep[x]) continue;
        for (auto y : g.neighbors(x))
          if (keep[y]) { active[x] = 1; break; }
      }
      for (NodeIndex x = 0; x < n; ++x)
        if (!active[x]) next[x] = 0;
    }
    const bool changed = next != keep;
    keep = std::move(next);
    if (!changed || mode == FilterMode::SinglePass) break;
  }

  std::vector<NodeIndex> remap(n, NodeIndex(-1));
  std::vector<std::string> labels;
  for (NodeIndex x = 0; x < n; ++x)
    if (keep[x]) {
      remap[x] = static_cast<NodeIndex>(labels.size());
      labels.push_back(net.label(x));
    }
  std::vector<PhaseSnapshot> snaps;
  for (const auto& snap : net.phases()) {
    std::vector<DirectedWeight> d;
    for (const auto& w : snap.directed())
      if (keep[w.src] && keep[w.dst]) d.push_back({remap[w.src], remap[w.dst], w.weight});
    snaps.emplace_back(snap.index(), static_cast<NodeIndex>(labels.size()), std::move(d));
  }
  return TemporalNetwork(net.config(), std::move(labels), std::move(snaps));
}

bool same_interactions(const TemporalNetwork& a, const TemporalNetwork& b) {
  if (a.num_phases() != b.num_phases()) return false;
  using Key = std::tuple<std::string, std::string, std::uint64_t, std::uint64_t>;
  auto keyed = [](const TemporalNetwork& net, int t) {
    std::vector<Key> out;
    for (const auto& d : net.phase(t).directed())
      out.emplace_back(net.label(d.src), net.label(d.dst), d.weight.frequency, d.weight.duration);
    std::sort(out.begin(), out.end());
    return out;
  };
  for (int t = 0; t < a.num_phases(); ++t)
    if (keyed(a, t) != keyed(b, t)) return false;
  return true;
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    auto p = line.find(',', start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::int64_t parse_int(std::string_view s, std::size_t line, const char* field) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw ParseError(line, std::string("field '") + field + "' is not an integer: '" + std::string(s) + "'");
  return v;
}

}  // namespace

std::vector<InteractionEvent> read_events_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing header");
  ++lineno;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (trim(line) != kEventCsvHeader)
    throw ParseError(lineno, std::string("expected header '") + kEventCsvHeader + "'");
  std::vector<InteractionEvent> out;
  while (std::getline(in, line)) {
    ++lineno;
    auto body = trim(line);
    if (body.empty()) continue;
    auto f = split_commas(body);
    if (f.size() != 6) throw ParseError(lineno, "expected 6 fields, got " + std::to_string(f.size()));
    InteractionEvent e;
    e.caller = std::string(trim(f[0]));
    e.callee = std::string(trim(f[1]));
    e.month = parse_int(trim(f[2]), lineno, "month");
    e.calls = parse_int(trim(f[3]), lineno, "calls");
    e.texts = parse_int(trim(f[4]), lineno, "texts");
    e.duration_s = parse_int(trim(f[5]), lineno, "duration_s");
    if (e.caller.empty() || e.callee.empty()) throw ParseError(lineno, "empty node id");
    if (e.caller == e.callee) throw ParseError(lineno, "self-loop on '" + e.caller + "'");
    if (e.month < 0) throw ParseError(lineno, "negative month");
    if (e.calls < 0 || e.texts < 0 || e.duration_s < 0) throw ParseError(lineno, "negative count");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<InteractionEvent> read_events_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return read_events_csv(in);
}

void write_events_csv(std::ostream& out, std::span<const InteractionEvent> events) {
  out << kEventCsvHeader << '\n';
  for (const auto& e : events)
    out << e.caller << ',' << e.callee << ',' << e.month << ',' << e.calls << ',' << e.texts << ',' << e.duration_s
        << '\n';
}

void write_snapshots_csv(std::ostream& out, const TemporalNetwork& net) {
  out << "phase,caller,callee,frequency,duration_s\n";
  for (const auto& snap : net.phases())
    for (const auto& d : snap.directed())
      out << snap.index() << ',' << net.label(d.src) << ',' << net.label(d.dst) << ',' << d.weight.frequency << ','
          << d.weight.duration << '\n';
}

}  // namespace longtie
