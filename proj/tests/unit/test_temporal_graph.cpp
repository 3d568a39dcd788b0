#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "builders.hpp"
#include "longtie/error.hpp"
#include "longtie/temporal_graph.hpp"
#include "oracles.hpp"

using namespace longtie;

namespace {

InteractionEvent ev(std::string a, std::string b, std::int64_t month, std::int64_t calls, std::int64_t texts,
                    std::int64_t secs) {
  return {std::move(a), std::move(b), month, calls, texts, secs};
}

PhaseConfig cfg(int window, int total) { return PhaseConfig{window, total}; }

}  // namespace

TEST(Ingest, SingleEventAggregates) {
  std::vector<InteractionEvent> es{ev("a", "b", 0, 2, 1, 300)};
  auto net = ingest_events(es, cfg(3, 24));
  ASSERT_EQ(net.num_phases(), 8);
  const auto a = *net.index_of("a"), b = *net.index_of("b");
  EXPECT_EQ(net.phase(0).frequency(a, b), 3u);
  EXPECT_EQ(net.phase(0).duration(a, b), 300u);
  EXPECT_EQ(net.phase(0).frequency(b, a), 0u);
}

TEST(Ingest, TwentyFourMonthsInThreeMonthWindowsGiveEightPhases) {
  std::vector<InteractionEvent> es;
  for (int m = 0; m < 24; ++m) es.push_back(ev("1", "2", m, 1, 0, 60));
  auto net = ingest_events(es, cfg(3, 24));
  ASSERT_EQ(net.num_phases(), 8);
  for (int t = 0; t < 8; ++t) EXPECT_EQ(net.phase(t).frequency(0, 1), 3u) << "phase " << t;
}

TEST(Ingest, EmptyStreamGivesEmptySnapshots) {
  auto net = ingest_events({}, cfg(3, 24));
  EXPECT_EQ(net.num_phases(), 8);
  EXPECT_EQ(net.num_nodes(), 0u);
  for (const auto& s : net.phases()) EXPECT_TRUE(s.directed().empty());
}

TEST(Ingest, ZeroDurationCallsDoNotCountTowardFrequency) {
  std::vector<InteractionEvent> es{ev("a", "b", 0, 4, 1, 0), ev("a", "c", 0, 4, 0, 0)};
  auto net = ingest_events(es, cfg(3, 3));
  const auto a = *net.index_of("a"), b = *net.index_of("b"), c = *net.index_of("c");
  EXPECT_EQ(net.phase(0).frequency(a, b), 1u);
  EXPECT_EQ(net.phase(0).frequency(a, c), 0u);
  EXPECT_FALSE(net.phase(0).undirected().has_edge(a, c));
}

TEST(Ingest, RejectsMalformedRecordsWithRecordIndex) {
  std::vector<InteractionEvent> loop{ev("a", "b", 0, 1, 0, 1), ev("x", "x", 0, 1, 0, 1)};
  try {
    ingest_events(loop, cfg(3, 24));
    FAIL() << "self-loop accepted";
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
  }
  std::vector<InteractionEvent> neg{ev("a", "b", 0, -1, 0, 1)};
  EXPECT_THROW(ingest_events(neg, cfg(3, 24)), InvalidArgument);
  std::vector<InteractionEvent> late{ev("a", "b", 24, 1, 0, 1)};
  EXPECT_THROW(ingest_events(late, cfg(3, 24)), InvalidArgument);
}

TEST(Ingest, PhaseConfigMustDivide) {
  EXPECT_THROW(ingest_events({}, cfg(5, 24)), InvalidArgument);
  EXPECT_THROW(ingest_events({}, cfg(0, 24)), InvalidArgument);
  EXPECT_NO_THROW(ingest_events({}, cfg(1, 24)));
  EXPECT_NO_THROW(ingest_events({}, cfg(6, 24)));
}

TEST(Ingest, AggregationIsLinearOverPartitions) {
  auto es = testing_support::random_events(12, 12, 0.08, 5);
  auto whole = ingest_events(es, cfg(3, 12));
  std::vector<InteractionEvent> first(es.begin(), es.begin() + static_cast<std::ptrdiff_t>(es.size() / 3));
  std::vector<InteractionEvent> second(es.begin() + static_cast<std::ptrdiff_t>(es.size() / 3), es.end());
  auto a = ingest_events(first, cfg(3, 12));
  auto b = ingest_events(second, cfg(3, 12));
  for (int t = 0; t < whole.num_phases(); ++t)
    for (const auto& d : whole.phase(t).directed()) {
      const auto& src = whole.label(d.src);
      const auto& dst = whole.label(d.dst);
      auto part = [&](const TemporalNetwork& n) {
        auto s = n.index_of(src), r = n.index_of(dst);
        return s && r ? n.phase(t).directed_weight(*s, *r) : EdgeWeight{};
      };
      EXPECT_EQ(part(a).frequency + part(b).frequency, d.weight.frequency);
      EXPECT_EQ(part(a).duration + part(b).duration, d.weight.duration);
    }
}

TEST(Ingest, PermutationInvariant) {
  auto es = testing_support::random_events(15, 6, 0.1, 9);
  auto base = ingest_events(es, cfg(3, 6));
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(es.begin(), es.end(), rng);
    EXPECT_TRUE(ingest_events(es, cfg(3, 6)) == base);
  }
}

TEST(Ingest, NumericLabelsSortNumerically) {
  std::vector<InteractionEvent> es{ev("10", "9", 0, 1, 0, 1), ev("b", "100", 0, 1, 0, 1), ev("a", "2", 0, 1, 0, 1)};
  auto net = ingest_events(es, cfg(3, 3));
  std::vector<std::string> labels(net.labels().begin(), net.labels().end());
  EXPECT_EQ(labels, (std::vector<std::string>{"2", "9", "10", "100", "a", "b"}));
}

TEST(UndirectedView, SumsBothDirections) {
  std::vector<DirectedWeight> d{{0, 1, {2, 30}}, {1, 0, {0, 0}}, {2, 1, {1, 5}}, {1, 2, {3, 7}}};
  auto g = undirected_view(3, d);
  EXPECT_EQ(g.weight(0, 1), (EdgeWeight{2, 30}));
  EXPECT_EQ(g.weight(1, 2), (EdgeWeight{4, 12}));
  EXPECT_EQ(g.weight(2, 1), (EdgeWeight{4, 12}));
}

TEST(UndirectedView, ZeroFrequencyPairsAreNotEdges) {
  std::vector<DirectedWeight> d{{0, 1, {0, 40}}};
  auto g = undirected_view(2, d);
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(UndirectedView, MatchesTransposeSumOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> node(0, 19), w(0, 3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<DirectedWeight> d;
    for (int k = 0; k < 80; ++k) {
      NodeIndex a = node(rng), b = node(rng);
      if (a == b) continue;
      d.push_back({a, b, {static_cast<std::uint64_t>(w(rng)), static_cast<std::uint64_t>(w(rng) * 10)}});
    }
    auto g = undirected_view(20, d);
    std::vector<std::vector<std::uint64_t>> F(20, std::vector<std::uint64_t>(20, 0)), D = F;
    for (const auto& x : d) F[x.src][x.dst] += x.weight.frequency, D[x.src][x.dst] += x.weight.duration;
    for (NodeIndex i = 0; i < 20; ++i)
      for (NodeIndex j = 0; j < 20; ++j) {
        if (i == j) continue;
        const auto f = F[i][j] + F[j][i];
        ASSERT_EQ(g.has_edge(i, j), f > 0);
        if (f > 0) {
          EXPECT_EQ(g.weight(i, j).frequency, f);
          EXPECT_EQ(g.weight(i, j).duration, D[i][j] + D[j][i]);
        }
      }
  }
}

TEST(Filter, KeepsNodesActiveEverywhereAndDropsSilentOnes) {
  std::vector<InteractionEvent> es;
  for (int m = 0; m < 24; m += 3) {
    es.push_back(ev("a", "b", m, 1, 0, 10));
    es.push_back(ev("b", "c", m, 0, 1, 0));
    if (m != 12) es.push_back(ev("c", "d", m, 1, 0, 10));  // d silent in phase 4
  }
  auto net = filter_active_nodes(ingest_events(es, cfg(3, 24)));
  std::vector<std::string> labels(net.labels().begin(), net.labels().end());
  EXPECT_EQ(labels, (std::vector<std::string>{"a", "b", "c"}));
  for (const auto& s : net.phases())
    for (const auto& d : s.directed()) EXPECT_LT(std::max(d.src, d.dst), 3u);
}

TEST(Filter, FixpointDiffersFromSinglePassOnChain) {
  // d is silent in phase 1; c's only phase-1 partner is d, so c falls in the second round.
  std::vector<InteractionEvent> es{ev("a", "b", 0, 1, 0, 1), ev("b", "c", 0, 1, 0, 1), ev("c", "d", 0, 1, 0, 1),
                                   ev("a", "b", 1, 1, 0, 1), ev("c", "e", 1, 1, 0, 1), ev("e", "f", 1, 1, 0, 1),
                                   ev("f", "d", 0, 1, 0, 1), ev("a", "e", 0, 1, 0, 1)};
  auto net = ingest_events(es, cfg(1, 2));
  auto once = filter_active_nodes(net, FilterMode::SinglePass);
  auto fix = filter_active_nodes(net, FilterMode::Fixpoint);
  auto labels = [](const TemporalNetwork& n) { return std::set<std::string>(n.labels().begin(), n.labels().end()); };
  EXPECT_EQ(labels(once), oracle::active_labels(net, false));
  EXPECT_EQ(labels(fix), oracle::active_labels(net, true));
}

TEST(Filter, TenNodeFixpointMatchesIteratedOracle) {
  // 7 is silent in phase 2; then 9 loses its only phase-1 partner, then 8 its only phase-2 partner.
  std::vector<InteractionEvent> es;
  auto both = [&](const char* a, const char* b, int month) { es.push_back(ev(a, b, month, 1, 0, 5)); };
  for (int m = 0; m < 3; ++m) both("0", "1", m), both("1", "2", m), both("2", "0", m);
  both("3", "4", 0), both("4", "5", 0), both("5", "6", 0), both("6", "7", 0), both("7", "8", 0), both("8", "9", 0);
  both("3", "0", 1), both("4", "3", 1), both("5", "4", 1), both("6", "5", 1), both("8", "6", 1), both("7", "9", 1);
  both("3", "1", 2), both("4", "3", 2), both("5", "4", 2), both("6", "5", 2), both("8", "9", 2);
  auto net = ingest_events(es, cfg(1, 3));
  auto fix = filter_active_nodes(net);
  std::set<std::string> got(fix.labels().begin(), fix.labels().end());
  auto expected = oracle::active_labels(net, true);
  EXPECT_EQ(got, expected);
  EXPECT_NE(expected, oracle::active_labels(net, false));
  for (const auto& s : fix.phases())
    for (NodeIndex x = 0; x < fix.num_nodes(); ++x) EXPECT_GT(s.undirected().degree(x), 0u);
}

TEST(Filter, RandomNetworksMatchOracleAndEveryNodeIsActive) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto net = ingest_events(testing_support::random_events(14, 4, 0.06, seed), cfg(2, 4));
    auto fix = filter_active_nodes(net);
    std::set<std::string> got(fix.labels().begin(), fix.labels().end());
    ASSERT_EQ(got, oracle::active_labels(net, true)) << "seed " << seed;
    for (const auto& s : fix.phases())
      for (NodeIndex x = 0; x < fix.num_nodes(); ++x) EXPECT_GT(s.undirected().degree(x), 0u);
  }
}

TEST(EventCsv, RoundTrip) {
  auto es = testing_support::random_events(6, 3, 0.3, 2);
  std::stringstream ss;
  write_events_csv(ss, es);
  EXPECT_EQ(read_events_csv(ss), es);
}

TEST(EventCsv, ReportsLineNumbers) {
  std::stringstream bad_field("caller,callee,month,calls,texts,duration_s\na,b,0,1,0,5\na,b,0,x,0,5\n");
  try {
    read_events_csv(bad_field);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::stringstream short_row("caller,callee,month,calls,texts,duration_s\na,b,0,1,0\n");
  EXPECT_THROW(read_events_csv(short_row), ParseError);
  std::stringstream bad_header("from,to,month,calls,texts,duration_s\n");
  EXPECT_THROW(read_events_csv(bad_header), ParseError);
  std::stringstream negative("caller,callee,month,calls,texts,duration_s\na,b,0,1,-2,5\n");
  EXPECT_THROW(read_events_csv(negative), ParseError);
}

TEST(EventCsv, AcceptsByteOrderMarkAndCrLf) {
  std::stringstream ss("\xEF\xBB\xBF" "caller,callee,month,calls,texts,duration_s\r\na,b,0,1,0,5\r\n");
  auto es = read_events_csv(ss);
  ASSERT_EQ(es.size(), 1u);
  EXPECT_EQ(es[0].duration_s, 5);
}
