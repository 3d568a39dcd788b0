#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "longtie/dynamics.hpp"
#include "longtie/error.hpp"
#include "longtie/fitting.hpp"
#include "longtie/formation_model.hpp"
#include "longtie/synth.hpp"
#include "longtie/temporal_graph.hpp"
#include "longtie/tie_range.hpp"

namespace py = pybind11;
using namespace longtie;

namespace {

using Rows = std::vector<std::vector<double>>;

Endowments to_endowments(const Rows& rows) {
  if (rows.empty()) throw InvalidArgument("endowment matrix is empty");
  Endowments w(static_cast<NodeIndex>(rows.size()), rows.front().size());
  for (NodeIndex i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != w.dims()) throw InvalidArgument("endowment rows have different lengths");
    std::copy(rows[i].begin(), rows[i].end(), w.row(i).begin());
  }
  return w;
}

Rows to_rows(const Endowments& w) {
  Rows out(w.nodes());
  for (NodeIndex i = 0; i < w.nodes(); ++i) out[i].assign(w.row(i).begin(), w.row(i).end());
  return out;
}

Graph make_graph(NodeIndex n, const std::vector<std::pair<NodeIndex, NodeIndex>>& pairs) {
  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (auto [a, b] : pairs) {
    if (a >= n || b >= n) throw InvalidArgument("edge endpoint out of range");
    if (a == b) throw InvalidArgument("self-loops are not allowed");
    edges.push_back(make_edge(a, b));
  }
  return Graph::from_edges(n, std::span<const Edge>(edges));
}

std::vector<std::pair<NodeIndex, NodeIndex>> edge_pairs(const Graph& g) {
  std::vector<std::pair<NodeIndex, NodeIndex>> out;
  for (auto e : g.edges()) out.emplace_back(e.u, e.v);
  return out;
}

FilterMode filter_mode(const std::string& s) {
  if (s == "fixpoint") return FilterMode::Fixpoint;
  if (s == "single_pass") return FilterMode::SinglePass;
  throw InvalidArgument("filter must be 'fixpoint', 'single_pass' or 'none'");
}

TemporalNetwork load(std::vector<InteractionEvent> events, int window, int total, const std::string& filter) {
  auto net = ingest_events(events, PhaseConfig{window, total});
  if (filter == "none") return net;
  return filter_active_nodes(net, filter_mode(filter));
}

Metric metric_of(const std::string& s) {
  if (s == "frequency") return Metric::Frequency;
  if (s == "duration") return Metric::Duration;
  throw InvalidArgument("metric must be 'frequency' or 'duration'");
}

py::dict mean_dict(const MeanCi& m) {
  py::dict d;
  d["n"] = m.n;
  if (m.present()) {
    d["mean"] = m.mean;
    d["ci_low"] = m.ci_low;
    d["ci_high"] = m.ci_high;
  } else {
    d["mean"] = py::none();
    d["ci_low"] = py::none();
    d["ci_high"] = py::none();
  }
  return d;
}

py::dict decomposition_dict(const Decomposition& d) {
  py::dict out;
  out["n_baseline"] = d.n_baseline;
  out["n_persisting"] = d.n_persisting;
  out["persistence"] = d.persistence;
  out["mean_baseline_given_both"] = d.mean_baseline_given_both;
  out["increment"] = d.increment;
  out["conditional_mean"] = d.conditional_mean;
  return out;
}

py::dict fit_dict(const FitResult& r) {
  py::dict out;
  out["W"] = to_rows(r.w);
  out["delta"] = r.delta;
  out["stop"] = stop_reason_name(r.stop);
  py::list curve;
  for (const auto& p : r.curve) curve.append(py::make_tuple(p.epoch, p.train_loss, p.test_loss));
  out["curve"] = curve;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Tie-range analytics, tie formation model and endowment fitting";

  // Translators run most-recent first, so the base class goes first.
  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

  py::class_<Graph>(m, "Graph")
      .def(py::init(&make_graph), py::arg("num_nodes"), py::arg("edges"))
      .def_property_readonly("num_nodes", &Graph::num_nodes)
      .def_property_readonly("num_edges", &Graph::num_edges)
      .def("edges", &edge_pairs)
      .def("neighbors",
           [](const Graph& g, NodeIndex x) {
             if (x >= g.num_nodes()) throw InvalidArgument("node out of range");
             auto nb = g.neighbors(x);
             return std::vector<NodeIndex>(nb.begin(), nb.end());
           })
      .def("has_edge", &Graph::has_edge)
      .def("__eq__", [](const Graph& a, const Graph& b) { return a == b; });

  m.def(
      "tie_range",
      [](const Graph& g, NodeIndex u, NodeIndex v, std::uint32_t cap) { return tie_range(g, u, v, cap).to_string(); },
      py::arg("graph"), py::arg("u"), py::arg("v"), py::arg("cap") = kDefaultCap,
      "Range of tie {u, v} as '2'..'5', '6+' (saturated at the cap) or 'inf'.");
  m.def(
      "tie_range_all",
      [](const Graph& g, std::uint32_t cap, unsigned threads) {
        std::vector<std::tuple<NodeIndex, NodeIndex, std::string>> out;
        for (const auto& r : tie_range_all(g, cap, threads)) out.emplace_back(r.edge.u, r.edge.v, r.range.to_string());
        return out;
      },
      py::arg("graph"), py::arg("cap") = kDefaultCap, py::arg("threads") = 1);
  m.def(
      "range_distribution",
      [](const Graph& g, unsigned threads) {
        const auto d = range_distribution(g, kDefaultCap, threads);
        py::dict out;
        for (auto b : kAllRangeBins) out[bin_name(b)] = d.counts[bin_index(b)];
        return out;
      },
      py::arg("graph"), py::arg("threads") = 1);

  py::class_<TemporalNetwork>(m, "TemporalNetwork")
      .def_property_readonly("num_nodes", &TemporalNetwork::num_nodes)
      .def_property_readonly("num_phases", &TemporalNetwork::num_phases)
      .def_property_readonly("labels",
                             [](const TemporalNetwork& n) {
                               return std::vector<std::string>(n.labels().begin(), n.labels().end());
                             })
      .def("phase_graph", [](const TemporalNetwork& n, int t) { return n.phase(t).undirected(); })
      .def("directed",
           [](const TemporalNetwork& n, int t) {
             std::vector<std::tuple<NodeIndex, NodeIndex, std::uint64_t, std::uint64_t>> out;
             for (const auto& d : n.phase(t).directed())
               out.emplace_back(d.src, d.dst, d.weight.frequency, d.weight.duration);
             return out;
           },
           "Directed (src, dst, frequency, duration_s) records of phase t.");

  m.def(
      "read_events",
      [](const std::string& path, int window, int total, const std::string& filter) {
        return load(read_events_csv_file(path), window, total, filter);
      },
      py::arg("path"), py::arg("window_months") = 3, py::arg("total_months") = 24, py::arg("filter") = "fixpoint");
  m.def(
      "ingest",
      [](const std::vector<std::tuple<std::string, std::string, std::int64_t, std::int64_t, std::int64_t, std::int64_t>>&
             rows,
         int window, int total, const std::string& filter) {
        std::vector<InteractionEvent> es;
        for (const auto& [a, b, month, calls, texts, dur] : rows) es.push_back({a, b, month, calls, texts, dur});
        return load(std::move(es), window, total, filter);
      },
      py::arg("events"), py::arg("window_months") = 3, py::arg("total_months") = 24, py::arg("filter") = "fixpoint",
      "Events are (caller, callee, month, calls, texts, duration_s) tuples.");

  py::class_<TieTable>(m, "TieTable")
      .def(py::init([](const TemporalNetwork& n, unsigned threads) { return TieTable::build(n, threads); }),
           py::arg("network"), py::arg("threads") = 1)
      .def_property_readonly("num_ties", &TieTable::num_ties);

  m.def(
      "strength_series",
      [](const TieTable& t, int baseline, const std::string& metric, bool surviving) {
        const auto s = strength_series(t, baseline, metric_of(metric),
                                       surviving ? Conditioning::Surviving : Conditioning::Unconditional);
        py::dict out;
        for (auto b : kAllRangeBins) {
          py::list row;
          for (const auto& x : s.by_bin[bin_index(b)]) row.append(mean_dict(x));
          out[bin_name(b)] = row;
        }
        return out;
      },
      py::arg("table"), py::arg("baseline"), py::arg("metric") = "duration", py::arg("surviving") = false);
  m.def(
      "decompose",
      [](const std::vector<double>& yb, const std::vector<double>& yt) {
        if (yb.size() != yt.size()) throw InvalidArgument("y_base and y_t differ in length");
        return decomposition_dict(decompose(yb, yt));
      },
      py::arg("y_base"), py::arg("y_t"));
  m.def(
      "transition_matrix",
      [](const TieTable& t, int a, int b) {
        const auto tm = transition_matrix(t, a, b);
        py::dict out;
        out["counts"] = tm.counts;
        out["probabilities"] = tm.probabilities;
        out["dissolved"] = tm.dissolved;
        out["excluded_infinite"] = tm.excluded_infinite;
        return out;
      },
      py::arg("table"), py::arg("phase_a"), py::arg("phase_b"));

  m.def(
      "benefit",
      [](NodeIndex i, NodeIndex j, const Rows& w, const Graph& g, double delta) {
        const auto b = benefit(i, j, to_endowments(w), g, delta);
        return py::make_tuple(b.direct, b.indirect, b.total);
      },
      py::arg("i"), py::arg("j"), py::arg("W"), py::arg("graph"), py::arg("delta"),
      "(direct, indirect, total) benefit of j to i.");
  m.def(
      "optimal_investment", [](const std::vector<double>& b) { return optimal_investment(b); }, py::arg("benefits"));
  m.def(
      "simulate",
      [](const Graph& g, const Rows& w, int phases, std::uint64_t seed, double delta, double q) {
        ModelParams p;
        p.delta = delta;
        p.q = q;
        return simulate(g, to_endowments(w), p, phases, seed).network;
      },
      py::arg("graph"), py::arg("W"), py::arg("phases"), py::arg("seed"), py::arg("delta") = 0.2, py::arg("q") = 0.9);

  m.def(
      "generate",
      [](NodeIndex nodes, std::size_t dims, int phases, std::uint64_t seed, double delta, double mean_degree) {
        SynthSpec s;
        s.nodes = nodes;
        s.dims = dims;
        s.phases = phases;
        s.seed = seed;
        s.params.delta = delta;
        s.mean_degree = mean_degree;
        auto out = generate(s);
        py::dict d;
        d["network"] = out.sim.network;
        d["W"] = to_rows(out.w);
        d["initial_edges"] = edge_pairs(out.initial);
        std::vector<std::tuple<std::string, std::string, std::int64_t, std::int64_t, std::int64_t, std::int64_t>> ev;
        for (const auto& e : out.events) ev.emplace_back(e.caller, e.callee, e.month, e.calls, e.texts, e.duration_s);
        d["events"] = ev;
        d["window_months"] = s.window_months;
        return d;
      },
      py::arg("nodes") = 500, py::arg("dims") = 4, py::arg("phases") = 4, py::arg("seed") = 0, py::arg("delta") = 0.2,
      py::arg("mean_degree") = 8.0);

  m.def(
      "fit",
      [](const TemporalNetwork& net, std::size_t dims, double delta, int max_epochs, std::uint64_t seed,
         std::size_t nodes_per_epoch, double learning_rate) {
        FitConfig c;
        c.dims = dims;
        c.delta = delta;
        c.max_epochs = max_epochs;
        c.seed = seed;
        c.nodes_per_epoch = nodes_per_epoch;
        c.learning_rate = learning_rate;
        py::gil_scoped_release release;
        auto r = fit(net, c);
        py::gil_scoped_acquire acquire;
        return fit_dict(r);
      },
      py::arg("network"), py::arg("dims") = 4, py::arg("delta") = 0.2, py::arg("max_epochs") = 500,
      py::arg("seed") = 0, py::arg("nodes_per_epoch") = 1000, py::arg("learning_rate") = 0.01);
  m.def(
      "loss",
      [](const Rows& w, const TemporalNetwork& net, int t, const std::vector<NodeIndex>& nodes, double delta) {
        const auto lv = loss(to_endowments(w), net, t, nodes, delta);
        return py::make_tuple(lv.positive, lv.negative);
      },
      py::arg("W"), py::arg("network"), py::arg("t"), py::arg("nodes"), py::arg("delta") = 0.2,
      "(positive, negative) parts of the fitting loss.");
}
