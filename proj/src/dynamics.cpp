#include "longtie/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "longtie/error.hpp"

namespace longtie {

const char* metric_name(Metric m) { return m == Metric::Frequency ? "frequency" : "duration"; }

std::size_t TieTable::idx(int t) const {
  if (t < 0 || t >= num_phases()) throw InvalidArgument("phase " + std::to_string(t) + " out of range");
  return static_cast<std::size_t>(t);
}

TieTable TieTable::build(const TemporalNetwork& net, unsigned threads) {
  TieTable table;
  std::vector<std::uint64_t> keys;
  for (const auto& snap : net.phases())
    for (auto e : snap.undirected().edges()) keys.push_back(edge_key(e));
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  table.pairs_.reserve(keys.size());
  for (auto k : keys) table.pairs_.push_back(edge_from_key(k));

  const auto n = keys.size();
  for (const auto& snap : net.phases()) {
    std::vector<std::uint64_t> f(n, 0), d(n, 0);
    std::vector<std::uint8_t> b(n, kAbsent);
    const auto& g = snap.undirected();
    auto ranges = tie_range_all(g, kDefaultCap, threads);
    // Both lists are sorted by (u, v): walk them together.
    std::size_t k = 0;
    for (const auto& r : ranges) {
      const auto key = edge_key(r.edge);
      while (keys[k] != key) ++k;
      const auto w = g.weight(r.edge.u, r.edge.v);
      f[k] = w.frequency;
      d[k] = w.duration;
      b[k] = static_cast<std::uint8_t>(range_bin(r.range));
    }
    table.freq_.push_back(std::move(f));
    table.dur_.push_back(std::move(d));
    table.bins_.push_back(std::move(b));
  }
  return table;
}

std::optional<std::size_t> TieTable::find(Edge e) const {
  e = make_edge(e.u, e.v);
  auto it = std::lower_bound(pairs_.begin(), pairs_.end(), e);
  if (it == pairs_.end() || *it != e) return std::nullopt;
  return static_cast<std::size_t>(it - pairs_.begin());
}

double TieTable::value(int t, std::size_t k, Metric m, Transform tr) const {
  const auto x = static_cast<double>(raw(t, k, m));
  return tr == Transform::Log1p ? std::log1p(x) : x;
}

TieTrajectory TieTable::trajectory(std::size_t k) const {
  TieTrajectory tr;
  tr.pair = pairs_.at(k);
  for (int t = 0; t < num_phases(); ++t) {
    tr.present.push_back(present(t, k));
    tr.frequency.push_back(frequency(t, k));
    tr.duration.push_back(duration(t, k));
    tr.range.push_back(bin(t, k));
    tr.is_new.push_back(t > 0 && present(t, k) && !present(t - 1, k));
  }
  return tr;
}

std::vector<std::size_t> TieTable::present_at(int t) const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < num_ties(); ++k)
    if (present(t, k)) out.push_back(k);
  return out;
}

namespace {

template <class Fn>
void for_each_tie(const TieTable& table, std::optional<std::span<const std::size_t>> subset, Fn&& fn) {
  if (subset) {
    for (auto k : *subset) fn(k);
  } else {
    for (std::size_t k = 0; k < table.num_ties(); ++k) fn(k);
  }
}

void check_phase(const TieTable& table, int t, const char* what) {
  if (t < 0 || t >= table.num_phases())
    throw InvalidArgument(std::string(what) + " phase " + std::to_string(t) + " out of range [0, " +
                          std::to_string(table.num_phases()) + ")");
}

}  // namespace

StrengthSeries strength_series(const TieTable& table, int baseline, Metric metric, Conditioning conditioning,
                               std::optional<std::span<const std::size_t>> subset) {
  check_phase(table, baseline, "baseline");
  const int phases = table.num_phases();
  std::array<std::vector<MeanAccumulator>, kNumRangeBins> acc;
  for (auto& a : acc) a.resize(static_cast<std::size_t>(phases));
  for_each_tie(table, subset, [&](std::size_t k) {
    auto b = table.bin(baseline, k);
    if (!b) return;
    auto& row = acc[bin_index(*b)];
    for (int t = 0; t < phases; ++t) {
      if (conditioning == Conditioning::Surviving && !table.present(t, k)) continue;
      row[static_cast<std::size_t>(t)].add(table.value(t, k, metric));
    }
  });
  StrengthSeries s;
  s.baseline = baseline;
  s.metric = metric;
  s.conditioning = conditioning;
  for (std::size_t b = 0; b < kNumRangeBins; ++b)
    for (const auto& a : acc[b]) s.by_bin[b].push_back(a.result());
  return s;
}

namespace {

class DecompositionAccumulator {
 public:
  void add(double yb, double yt) {
    if (!(yb > 0)) return;
    ++n_base_;
    all_.add(yt);
    const bool persists = yt > 0;
    persist_.add(persists ? 1.0 : 0.0);
    if (persists) {
      base_both_.add(yb);
      incr_.add(yt - yb);
    }
  }

  Decomposition result() const {
    Decomposition d;
    d.n_baseline = n_base_;
    if (n_base_ == 0) return d;
    d.persistence_ci = persist_.result();
    d.persistence = d.persistence_ci.mean;
    d.conditional_mean = all_.result().mean;
    d.n_persisting = base_both_.count();
    if (d.n_persisting > 0) {
      d.mean_baseline_given_both = base_both_.result().mean;
      d.increment_ci = incr_.result();
      d.increment = d.increment_ci.mean;
    }
    return d;
  }

 private:
  std::size_t n_base_ = 0;
  MeanAccumulator all_, persist_, base_both_, incr_;
};

}  // namespace

Decomposition decompose(std::span<const double> y_base, std::span<const double> y_t) {
  if (y_base.size() != y_t.size()) throw InvalidArgument("decompose: series lengths differ");
  DecompositionAccumulator acc;
  for (std::size_t k = 0; k < y_base.size(); ++k) acc.add(y_base[k], y_t[k]);
  auto d = acc.result();
  if (d.n_baseline == 0) throw InvalidArgument("decompose: no ties with positive baseline value");
  return d;
}

Decomposition decompose(const TieTable& table, int baseline, int t, Metric metric, Transform transform,
                        std::optional<std::span<const std::size_t>> subset) {
  check_phase(table, baseline, "baseline");
  check_phase(table, t, "target");
  if (t <= baseline) throw InvalidArgument("decompose: target phase must follow the baseline");
  DecompositionAccumulator acc;
  for_each_tie(table, subset, [&](std::size_t k) {
    acc.add(table.value(baseline, k, metric, transform), table.value(t, k, metric, transform));
  });
  auto d = acc.result();
  if (d.n_baseline == 0) throw InvalidArgument("decompose: no ties at the baseline phase");
  return d;
}

std::array<Decomposition, kNumRangeBins> decompose_by_range(const TieTable& table, int baseline, int t, Metric metric,
                                                            Transform transform,
                                                            std::optional<std::span<const std::size_t>> subset) {
  check_phase(table, baseline, "baseline");
  check_phase(table, t, "target");
  if (t <= baseline) throw InvalidArgument("decompose: target phase must follow the baseline");
  std::array<DecompositionAccumulator, kNumRangeBins> acc;
  for_each_tie(table, subset, [&](std::size_t k) {
    auto b = table.bin(baseline, k);
    if (!b) return;
    acc[bin_index(*b)].add(table.value(baseline, k, metric, transform), table.value(t, k, metric, transform));
  });
  std::array<Decomposition, kNumRangeBins> out;
  for (std::size_t b = 0; b < kNumRangeBins; ++b) out[b] = acc[b].result();
  return out;
}

TransitionMatrix transition_matrix(const TieTable& table, int phase_a, int phase_b) {
  check_phase(table, phase_a, "from");
  check_phase(table, phase_b, "to");
  if (phase_a >= phase_b) throw InvalidArgument("transition_matrix: phase_a must precede phase_b");
  TransitionMatrix m;
  m.from_phase = phase_a;
  m.to_phase = phase_b;
  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    auto a = table.bin(phase_a, k);
    if (!a) continue;
    auto b = table.bin(phase_b, k);
    if (!b) {
      ++m.dissolved;
      continue;
    }
    if (*a == RangeBin::Infinite || *b == RangeBin::Infinite) {
      ++m.excluded_infinite;
      continue;
    }
    ++m.counts[bin_index(*a)][bin_index(*b)];
  }
  for (std::size_t r = 0; r < kNumFiniteBins; ++r) {
    m.row_counts[r] = std::accumulate(m.counts[r].begin(), m.counts[r].end(), std::size_t{0});
    if (m.row_counts[r] == 0) continue;
    for (std::size_t c = 0; c < kNumFiniteBins; ++c)
      m.probabilities[r][c] = static_cast<double>(m.counts[r][c]) / static_cast<double>(m.row_counts[r]);
  }
  return m;
}

JointEvolution joint_evolution(const TieTable& table, int t) {
  check_phase(table, t, "joint");
  check_phase(table, t + 1, "joint next");
  JointEvolution j;
  j.phase = t;
  j.has_persistence = t + 2 < table.num_phases();
  struct Acc {
    std::size_t n = 0, persisted = 0;
    MeanAccumulator dur, freq;
  };
  std::array<std::array<Acc, kNumRangeBins>, kNumRangeBins> acc;
  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    auto a = table.bin(t, k);
    auto b = table.bin(t + 1, k);
    if (!a || !b) continue;
    auto& c = acc[bin_index(*a)][bin_index(*b)];
    ++c.n;
    c.dur.add(table.value(t + 1, k, Metric::Duration));
    c.freq.add(table.value(t + 1, k, Metric::Frequency));
    if (j.has_persistence && table.present(t + 2, k)) ++c.persisted;
  }
  for (std::size_t a = 0; a < kNumRangeBins; ++a)
    for (std::size_t b = 0; b < kNumRangeBins; ++b) {
      const auto& c = acc[a][b];
      auto& out = j.cells[a][b];
      out.count = c.n;
      if (c.n == 0) continue;
      out.log_duration_next = c.dur.result();
      out.log_frequency_next = c.freq.result();
      if (j.has_persistence) out.persistence_next = static_cast<double>(c.persisted) / static_cast<double>(c.n);
    }
  return j;
}

std::vector<Lifespan> lifespan(const TieTable& table) {
  std::vector<Lifespan> out;
  out.reserve(table.num_ties());
  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    int n = 0;
    for (int t = 0; t < table.num_phases(); ++t) n += table.present(t, k) ? 1 : 0;
    if (n > 0) out.push_back({table.pair(k), n});
  }
  return out;
}

std::array<MeanCi, kNumRangeBins> lifespan_by_range(const TieTable& table, int reference) {
  check_phase(table, reference, "reference");
  std::array<MeanAccumulator, kNumRangeBins> acc;
  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    auto b = table.bin(reference, k);
    if (!b) continue;
    int n = 0;
    for (int t = 0; t < table.num_phases(); ++t) n += table.present(t, k) ? 1 : 0;
    acc[bin_index(*b)].add(n);
  }
  std::array<MeanCi, kNumRangeBins> out;
  for (std::size_t b = 0; b < kNumRangeBins; ++b) out[b] = acc[b].result();
  return out;
}

DegreeAnalysis degree_analysis(const TieTable& table, const TemporalNetwork& net, int phase) {
  check_phase(table, phase, "degree");
  const auto& g = net.phase(phase).undirected();
  DegreeAnalysis out;
  out.phase = phase;

  std::map<std::size_t, DegreeRate> rates;
  std::vector<std::size_t> degrees;
  for (NodeIndex x = 0; x < g.num_nodes(); ++x) {
    const auto d = g.degree(x);
    if (d == 0) continue;
    degrees.push_back(d);
    auto& r = rates[d];
    r.degree = d;
    for (auto y : g.neighbors(x)) {
      ++r.incident_ties;
      auto k = table.find(make_edge(x, y));
      auto b = table.bin(phase, *k);
      if (*b == RangeBin::R5 || *b == RangeBin::R6Plus) ++r.long_ties;
    }
  }
  for (auto& [d, r] : rates) {
    r.rate = r.incident_ties ? static_cast<double>(r.long_ties) / static_cast<double>(r.incident_ties) : 0.0;
    out.rates.push_back(r);
  }
  if (degrees.empty()) return out;
  std::sort(degrees.begin(), degrees.end());
  out.median_degree = degrees[(degrees.size() - 1) / 2];

  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    if (!table.present(phase, k)) continue;
    const auto e = table.pair(k);
    const auto du = g.degree(e.u), dv = g.degree(e.v);
    if (du <= out.median_degree || dv <= out.median_degree) out.low_ties.push_back(k);
    if (du > out.median_degree || dv > out.median_degree) out.high_ties.push_back(k);
  }
  const std::array<Metric, 2> metrics{Metric::Frequency, Metric::Duration};
  for (std::size_t m = 0; m < 2; ++m) {
    out.low_series[m] = strength_series(table, phase, metrics[m], Conditioning::Unconditional,
                                        std::span<const std::size_t>(out.low_ties));
    out.high_series[m] = strength_series(table, phase, metrics[m], Conditioning::Unconditional,
                                         std::span<const std::size_t>(out.high_ties));
  }
  return out;
}

NewExistingProfiles new_existing_profiles(const TieTable& table, int reference) {
  check_phase(table, reference, "reference");
  if (reference < 1) throw InvalidArgument("new/existing split needs a preceding phase (reference >= 1)");
  NewExistingProfiles out;
  out.reference = reference;
  for (std::size_t k = 0; k < table.num_ties(); ++k) {
    if (!table.present(reference, k)) continue;
    (table.present(reference - 1, k) ? out.existing_ties : out.new_ties).push_back(k);
  }
  const std::array<Metric, 2> metrics{Metric::Frequency, Metric::Duration};
  for (std::size_t m = 0; m < 2; ++m) {
    const std::span<const std::size_t> fresh(out.new_ties), old(out.existing_ties);
    out.new_series[m] = strength_series(table, reference, metrics[m], Conditioning::Unconditional, fresh);
    out.existing_series[m] = strength_series(table, reference, metrics[m], Conditioning::Unconditional, old);
    for (int t = reference + 1; t < table.num_phases(); ++t) {
      out.new_decomposition[m].push_back(decompose_by_range(table, reference, t, metrics[m], Transform::Log1p, fresh));
      out.existing_decomposition[m].push_back(
          decompose_by_range(table, reference, t, metrics[m], Transform::Log1p, old));
    }
  }
  return out;
}

}  // namespace longtie
