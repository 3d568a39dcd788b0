#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "builders.hpp"
#include "longtie/error.hpp"
#include "longtie/formation_model.hpp"
#include "oracles.hpp"

using namespace longtie;
using testing_support::graph_of;

namespace {

Endowments endowments_of(std::vector<std::vector<double>> rows) {
  Endowments w(static_cast<NodeIndex>(rows.size()), rows.front().size());
  for (NodeIndex i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k) w(i, k) = rows[i][k];
  return w;
}

}  // namespace

TEST(WalkSum, MatchesDenseMatrixPowers) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto g = testing_support::gnp(14, 0.2, seed);
    auto dense = oracle::walk_sum_matrix(g, 6);
    for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
      auto row = walk_sum_row(g, i, 6);
      for (NodeIndex j = 0; j < g.num_nodes(); ++j) EXPECT_NEAR(row[j], dense[i][j], 1e-12);
    }
  }
}

TEST(WalkSum, PathOfThreeByHand) {
  // P on 0-1-2: from 0 two steps returns to 0 w.p. 1/2 or reaches 2 w.p. 1/2.
  auto g = graph_of(3, {{0, 1}, {1, 2}});
  auto row = walk_sum_row(g, 0, 2);
  EXPECT_DOUBLE_EQ(row[0], 0.5);
  EXPECT_DOUBLE_EQ(row[1], 0.0);
  EXPECT_DOUBLE_EQ(row[2], 0.5);
}

TEST(WalkSum, RowsAreBoundedByWalkCount) {
  auto g = testing_support::gnp(30, 0.1, 4);
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    auto row = walk_sum_row(g, i, 6);
    double s = 0.0;
    for (double x : row) s += x;
    EXPECT_NEAR(s, 5.0, 1e-12);  // each P^l row sums to 1, l = 2..6
  }
}

TEST(MeetingProbability, ConnectedPairsUseQ) {
  auto g = graph_of(3, {{0, 1}, {1, 2}});
  ModelParams p;
  p.q = 0.37;
  EXPECT_DOUBLE_EQ(meeting_probability(0, 1, g, p), 0.37);
  p.meeting_scale = 0.5;
  EXPECT_DOUBLE_EQ(meeting_probability(0, 2, g, p), 0.5 * walk_sum_row(g, 0, p.walk_len)[2]);
  EXPECT_THROW(meeting_probability(1, 1, g, p), InvalidArgument);
}

TEST(MeetingProbability, CalibratedScaleKeepsProbabilitiesValid) {
  auto g = testing_support::gnp(20, 0.15, 8);
  ModelParams p;
  p.meeting_scale = 1e6;
  const double beta = calibrated_meeting_scale(g, p);
  EXPECT_LT(beta, 1e6);
  for (NodeIndex i = 0; i < g.num_nodes(); ++i) {
    auto ri = walk_sum_row(g, i, p.walk_len);
    for (NodeIndex j = i + 1; j < g.num_nodes(); ++j) {
      if (g.has_edge(i, j) || g.degree(i) == 0 || g.degree(j) == 0) continue;
      auto rj = walk_sum_row(g, j, p.walk_len);
      EXPECT_LE(beta * 0.5 * (ri[j] + rj[i]), 1.0 + 1e-12);
    }
  }
  p.meeting_scale = 1e-3;
  EXPECT_DOUBLE_EQ(calibrated_meeting_scale(g, p), 1e-3);
}

TEST(Benefit, IsolatedPairByHand) {
  auto w = endowments_of({{0, 0}, {1, 2}});
  auto g = graph_of(2, {{0, 1}});
  auto b = benefit(0, 1, w, g, 0.2);
  EXPECT_DOUBLE_EQ(b.direct, 3.0);
  EXPECT_DOUBLE_EQ(b.indirect, 0.0);
  EXPECT_DOUBLE_EQ(b.total, 3.0);
  EXPECT_DOUBLE_EQ(benefit(1, 0, w, g, 0.2).total, 0.0);
}

TEST(Benefit, FriendOfFriendIsDiscounted) {
  // j = 1 has neighbor 2 with surplus (2, 0) over i = 0.
  auto w = endowments_of({{0, 0}, {0, 0}, {2, 0}});
  auto g = graph_of(3, {{0, 1}, {1, 2}});
  auto b = benefit(0, 1, w, g, 0.2);
  EXPECT_DOUBLE_EQ(b.direct, 0.0);
  EXPECT_NEAR(b.indirect, 0.4, 1e-15);
}

TEST(Benefit, SelfIsExcludedFromIndirect) {
  auto w = endowments_of({{5, 5}, {0, 0}});
  auto g = graph_of(2, {{0, 1}});
  EXPECT_DOUBLE_EQ(benefit(0, 1, w, g, 0.5).indirect, 0.0);
}

TEST(Benefit, MatchesFormulaOnRandomGraphs) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = testing_support::gnp(20, 0.2, seed);
    auto w = lognormal_endowments(20, 3, 0.0, 1.0, seed + 100);
    const auto adj = oracle::adjacency(g);
    for (auto e : g.edges()) {
      EXPECT_NEAR(benefit(e.u, e.v, w, g, 0.3).total, oracle::total_benefit(w, g, e.u, e.v, 0.3), 1e-12);
      double cn = 0.0;
      for (auto l : adj[e.u])
        if (adj[e.v].count(l)) cn += 0.3 * oracle::relu_surplus(w, l, e.u);
      EXPECT_NEAR(common_neighbor_benefit(e.u, e.v, w, g, 0.3), cn, 1e-12);
    }
  }
}

TEST(OptimalInvestment, ThreeFourTriangle) {
  std::vector<double> b{3, 4};
  auto c = optimal_investment(b);
  EXPECT_DOUBLE_EQ(c[0], 0.6);
  EXPECT_DOUBLE_EQ(c[1], 0.8);
}

TEST(OptimalInvestment, ZeroBenefitsGiveZeroInvestment) {
  std::vector<double> b{0, 0, 0};
  for (double c : optimal_investment(b)) EXPECT_EQ(c, 0.0);
  std::vector<double> bad{1, -1};
  EXPECT_THROW(optimal_investment(bad), InvalidArgument);
}

TEST(OptimalInvestment, ScaleInvariantAndUnitNorm) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> b(1 + rng() % 12);
    for (double& x : b) x = u(rng);
    auto c = optimal_investment(b);
    std::vector<double> scaled = b;
    for (double& x : scaled) x *= 7.5;
    auto cs = optimal_investment(scaled);
    double n2 = 0.0;
    for (std::size_t j = 0; j < b.size(); ++j) {
      EXPECT_NEAR(c[j], cs[j], 1e-14);
      n2 += c[j] * c[j];
    }
    EXPECT_NEAR(n2, 1.0, 1e-12);
  }
}

TEST(OptimalInvestment, BeatsRandomFeasiblePoints) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> b(2 + rng() % 6);
    for (double& x : b) x = u(rng);
    auto c = optimal_investment(b);
    const double best = investment_utility(c, b);
    for (int k = 0; k < 200; ++k) {
      std::vector<double> x(b.size());
      double n2 = 0.0;
      for (double& v : x) {
        v = std::abs(z(rng));
        n2 += v * v;
      }
      for (double& v : x) v /= std::sqrt(n2);
      EXPECT_LE(investment_utility(x, b), best + 1e-12);
    }
    EXPECT_NEAR(oracle::utility(oracle::projected_ascent(b, rep), b), best, 1e-6);
  }
}

TEST(OptimalInvestment, PerNodeVersionUsesTotalBenefit) {
  auto w = endowments_of({{0, 0}, {3, 0}, {0, 4}});
  auto g = graph_of(3, {{0, 1}, {0, 2}});
  std::vector<NodeIndex> cand{1, 2};
  auto inv = optimal_investment(0, cand, w, g, 0.2);
  ASSERT_EQ(inv.size(), 2u);
  EXPECT_EQ(inv[0].to, 1u);
  EXPECT_DOUBLE_EQ(inv[0].c, 0.6);
  EXPECT_DOUBLE_EQ(inv[1].c, 0.8);
}

TEST(Step, StateInvariants) {
  auto g = testing_support::gnp(40, 0.1, 21);
  auto w = lognormal_endowments(40, 4, 0.0, 1.0, 5);
  ModelParams p;
  auto s = initial_state(g);
  for (int t = 0; t < 4; ++t) {
    auto next = step(s, w, p, 77);
    EXPECT_EQ(next.phase, t);
    for (NodeIndex i = 0; i < 40; ++i) {
      // M and N are disjoint, symmetric, and exactly cover the tie set.
      std::vector<NodeIndex> all;
      std::set_union(next.new_friends[i].begin(), next.new_friends[i].end(), next.existing[i].begin(),
                     next.existing[i].end(), std::back_inserter(all));
      EXPECT_EQ(all.size(), next.new_friends[i].size() + next.existing[i].size());
      auto nb = next.graph.neighbors(i);
      EXPECT_TRUE(std::equal(all.begin(), all.end(), nb.begin(), nb.end()));
      for (auto j : next.existing[i]) {
        EXPECT_TRUE(s.graph.has_edge(i, j));
        EXPECT_GT(next.c(i, j), 0.0);
        EXPECT_GT(next.c(j, i), 0.0);
      }
      for (auto j : next.new_friends[i]) {
        EXPECT_FALSE(s.graph.has_edge(i, j));
        EXPECT_DOUBLE_EQ(next.c(i, j), next.c_init_used);
      }
      // Investments in existing ties have norm at most 1.
      double n2 = 0.0;
      for (auto j : next.existing[i]) n2 += next.c(i, j) * next.c(i, j);
      EXPECT_LE(n2, 1.0 + 1e-12);
    }
    s = next;
  }
}

TEST(Step, DeterministicInSeed) {
  auto g = testing_support::gnp(30, 0.12, 2);
  auto w = lognormal_endowments(30, 3, 0.0, 1.0, 9);
  auto a = simulate(g, w, ModelParams{}, 3, 42);
  auto b = simulate(g, w, ModelParams{}, 3, 42);
  auto c = simulate(g, w, ModelParams{}, 3, 43);
  EXPECT_EQ(a.network, b.network);
  EXPECT_NE(a.network, c.network);
}

TEST(Step, EqualEndowmentsDissolveAllExistingTies) {
  auto g = testing_support::gnp(25, 0.2, 6);
  Endowments w(25, 3, 1.0);
  ModelParams p;
  p.meeting_scale = 0.0;
  auto s = step(initial_state(g), w, p, 1);
  EXPECT_EQ(s.graph.num_edges(), 0u);
}

TEST(Step, QOneWithNoMeetingsKeepsMutualTies) {
  // Two nodes each strictly better than the other in one dimension keep their tie.
  auto w = endowments_of({{1, 0}, {0, 1}});
  auto g = graph_of(2, {{0, 1}});
  ModelParams p;
  p.q = 1.0;
  p.meeting_scale = 0.0;
  auto s = step(initial_state(g), w, p, 5);
  EXPECT_TRUE(s.graph.has_edge(0, 1));
  EXPECT_DOUBLE_EQ(s.c(0, 1), 1.0);
  ASSERT_EQ(s.existing[0].size(), 1u);
}

TEST(Step, QZeroDropsEveryExistingTie) {
  auto g = testing_support::gnp(20, 0.3, 7);
  auto w = lognormal_endowments(20, 2, 0.0, 1.0, 1);
  ModelParams p;
  p.q = 0.0;
  auto s = step(initial_state(g), w, p, 3);
  for (NodeIndex i = 0; i < 20; ++i) EXPECT_TRUE(s.existing[i].empty());
}

TEST(Step, CInitOverrideIsUsed) {
  auto g = testing_support::gnp(20, 0.2, 9);
  auto w = lognormal_endowments(20, 2, 0.0, 1.0, 1);
  ModelParams p;
  p.c_init = 0.25;
  p.meeting_scale = 1e9;
  auto s = step(initial_state(g), w, p, 3);
  EXPECT_DOUBLE_EQ(s.c_init_used, 0.25);
}

TEST(Step, RejectsBadParameters) {
  auto g = graph_of(2, {{0, 1}});
  Endowments w(2, 1, 1.0);
  ModelParams p;
  p.delta = 1.0;
  EXPECT_THROW(step(initial_state(g), w, p, 0), InvalidArgument);
  EXPECT_THROW(step(initial_state(g), Endowments(3, 1), ModelParams{}, 0), InvalidArgument);
}

TEST(Emission, WeightsFollowInvestment) {
  ModelParams p;
  auto low = interaction_for(0.01, p);
  EXPECT_EQ(low.duration, 1u);  // floor of one second
  EXPECT_EQ(low.frequency, 1u);
  auto high = interaction_for(1.0, p);
  EXPECT_EQ(high.duration, static_cast<std::uint64_t>(std::llround(std::expm1(10.0))));
  EXPECT_EQ(high.frequency, 1 + high.duration / 300);
  EXPECT_LT(interaction_for(0.3, p).duration, interaction_for(0.6, p).duration);
}

TEST(Simulation, EventsRoundTripThroughIngestion) {
  auto g = testing_support::gnp(30, 0.15, 13);
  auto w = lognormal_endowments(30, 3, 0.0, 1.0, 2);
  auto sim = simulate(g, w, ModelParams{}, 3, 8);
  auto events = network_to_events(sim.network);
  auto back = ingest_events(events, sim.network.config());
  EXPECT_TRUE(same_interactions(sim.network, back));
}

TEST(BenefitByRange, GroupsBothDirections) {
  // Triangle 0-1-2 plus pendant 3 on 2: the pendant edge is a bridge.
  auto g = graph_of(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
  auto w = endowments_of({{0}, {1}, {2}, {4}});
  auto b = benefit_by_range(g, w, 0.5);
  EXPECT_EQ(b.total[bin_index(RangeBin::R2)].n, 6u);
  EXPECT_EQ(b.total[bin_index(RangeBin::Infinite)].n, 2u);
  // Bridge directions: 2->3 direct 2; 3->2 direct 0 with indirect 0.
  EXPECT_DOUBLE_EQ(b.direct[bin_index(RangeBin::Infinite)].mean, 1.0);
  ASSERT_EQ(b.common_neighbor_indirect.size(), 1u);
  EXPECT_EQ(b.common_neighbor_indirect.at(1).n, 6u);
}
