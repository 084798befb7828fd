#include "fairmatch/rounding.hpp"

#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {
namespace {

FractionalMatching makeFractional(const ColoredBipartiteGraph& g, std::vector<double> x) {
  FractionalMatching fm;
  fm.x = std::move(x);
  for (int e = 0; e < g.numEdges(); ++e) fm.objective += g.edge(e).weight * fm.x[e];
  return fm;
}

TEST(AcceptanceProb, KnownValues) {
  EXPECT_DOUBLE_EQ(acceptanceProb(0.0), 0.5);
  EXPECT_DOUBLE_EQ(acceptanceProb(1.0), 1.0);
  EXPECT_DOUBLE_EQ(acceptanceProb(0.5), 2.0 / 3.0);
  EXPECT_THROW(acceptanceProb(-0.01), std::invalid_argument);
  EXPECT_THROW(acceptanceProb(1.01), std::invalid_argument);
}

TEST(AcceptanceProb, OverloadAccumulatesThePrefix) {
  // Left hub with three right neighbors, processed in index order. When v=2
  // is processed, the hub's mass toward earlier positions is 0.3 + 0.4.
  ColoredBipartiteGraph g(1, 3, 1,
                          {{0, 0, 1.0, 0}, {0, 1, 1.0, 0}, {0, 2, 1.0, 0}});
  FractionalMatching fm = makeFractional(g, {0.3, 0.4, 0.3});
  std::vector<int> order{0, 1, 2};
  EXPECT_DOUBLE_EQ(acceptanceProb(g, fm, order, 0, 0), acceptanceProb(0.0));
  EXPECT_DOUBLE_EQ(acceptanceProb(g, fm, order, 1, 0), acceptanceProb(0.3));
  EXPECT_DOUBLE_EQ(acceptanceProb(g, fm, order, 2, 0), acceptanceProb(0.7));
  // Reversing the order reverses which mass counts as "already processed".
  std::vector<int> rev{2, 1, 0};
  EXPECT_DOUBLE_EQ(acceptanceProb(g, fm, rev, 1, 0), acceptanceProb(0.3));
}

TEST(RoundOcrs, SingleSaturatedEdgeMatchesHalfTheTime) {
  ColoredBipartiteGraph g(1, 1, 1, {{0, 0, 1.7, 0}});
  FractionalMatching fm = makeFractional(g, {1.0});
  SelectabilityEstimate est = estimateSelectability(g, fm, 20000, 7);
  // Proposal is certain; survival of the proposal is a fair coin.
  EXPECT_EQ(est.proposedCount[0], est.trials);
  double sigma = binomialSigma(0.5, est.trials);
  EXPECT_NEAR(est.matchRate(0), 0.5, 3.0 * sigma);
}

TEST(RoundOcrs, StarInstanceMatchesEveryEdgeAtHalfItsMass) {
  StarFixture star = generateStarFixture(10, 0.5);
  const ColoredBipartiteGraph& g = star.graph;
  FractionalMatching fm = makeFractional(g, star.x);
  SelectabilityEstimate est = estimateSelectability(g, fm, 20000, 11);
  for (int e = 0; e < g.numEdges(); ++e) {
    double target = fm.x[e] / 2.0;
    double sigma = binomialSigma(target, est.trials);
    EXPECT_NEAR(est.matchRate(e), target, 3.0 * sigma) << "edge " << e;
  }
}

TEST(RoundOcrs, ConditionalSurvivalIsAFairCoin) {
  StarFixture star = generateStarFixture(6, 0.4);
  FractionalMatching fm = makeFractional(star.graph, star.x);
  SelectabilityEstimate est = estimateSelectability(star.graph, fm, 20000, 13);
  for (int e = 0; e < star.graph.numEdges(); ++e) {
    if (est.proposedCount[e] < 500) continue;
    double sigma = binomialSigma(0.5, static_cast<int>(est.proposedCount[e]));
    EXPECT_NEAR(est.conditionalRate(e), 0.5, 3.0 * sigma) << "edge " << e;
  }
}

TEST(RoundOcrs, ReplayIsBitExact) {
  ColoredBipartiteGraph g = generateErdosRenyi(10, 0.5, 2, {1.0, 2.0}, true, 5);
  FractionalMatching fm;
  fm.x.assign(g.numEdges(), 0.0);
  std::vector<double> loadU(g.nU(), 0.0), loadV(g.nV(), 0.0);
  for (int e = 0; e < g.numEdges(); ++e) {
    const Edge& ed = g.edge(e);
    double take = std::min({0.5, 1.0 - loadU[ed.u], 1.0 - loadV[ed.v]});
    if (take <= 0) continue;
    fm.x[e] = take;
    loadU[ed.u] += take;
    loadV[ed.v] += take;
    fm.objective += ed.weight * take;
  }

  RoundingResult a = roundOcrs(g, fm, 99);
  RoundingResult b = roundOcrs(g, fm, 99);
  EXPECT_EQ(a.matching.edges, b.matching.edges);
  EXPECT_EQ(a.trace.order, b.trace.order);
  EXPECT_EQ(a.trace.proposedEdge, b.trace.proposedEdge);
  EXPECT_EQ(a.trace.acceptBit, b.trace.acceptBit);
  EXPECT_EQ(a.trace.matchedEdge, b.trace.matchedEdge);
  EXPECT_EQ(a.trace.toJsonLines(), b.trace.toJsonLines());

  RoundingResult c = roundOcrs(g, fm, 100);
  bool anyDifference = a.matching.edges != c.matching.edges ||
                       a.trace.proposedEdge != c.trace.proposedEdge;
  EXPECT_TRUE(anyDifference);
}

TEST(RoundOcrs, CustomOrderStillMatchesAtHalfMass) {
  ColoredBipartiteGraph g(2, 2, 1,
                          {{0, 0, 1.0, 0}, {0, 1, 1.0, 0}, {1, 1, 1.0, 0}});
  FractionalMatching fm = makeFractional(g, {0.6, 0.4, 0.5});
  std::vector<int> reversed{1, 0};
  const int trials = 20000;
  std::vector<int> matched(g.numEdges(), 0);
  for (int t = 0; t < trials; ++t) {
    RoundingResult r = roundOcrs(g, fm, &reversed, 1000 + t);
    for (int e : r.matching.edges) ++matched[e];
  }
  for (int e = 0; e < g.numEdges(); ++e) {
    double target = fm.x[e] / 2.0;
    double sigma = binomialSigma(target, trials);
    EXPECT_NEAR(matched[e] / static_cast<double>(trials), target, 3.0 * sigma)
        << "edge " << e;
  }
}

TEST(RoundOcrs, EveryTrialYieldsAValidMatching) {
  ColoredBipartiteGraph g = generateErdosRenyi(12, 0.5, 2, {1.0, 2.0}, true, 21);
  FractionalMatching fm;
  fm.x.assign(g.numEdges(), 0.0);
  std::vector<double> loadU(g.nU(), 0.0), loadV(g.nV(), 0.0);
  for (int e = 0; e < g.numEdges(); ++e) {
    const Edge& ed = g.edge(e);
    double room = std::min(1.0 - loadU[ed.u], 1.0 - loadV[ed.v]);
    double take = std::min(0.45, room);
    if (take > 0) {
      fm.x[e] = take;
      loadU[ed.u] += take;
      loadV[ed.v] += take;
      fm.objective += ed.weight * take;
    }
  }
  for (int t = 0; t < 500; ++t) {
    RoundingResult r = roundOcrs(g, fm, 3000 + t);
    std::set<int> usedU, usedV;
    double w = 0.0;
    for (int e : r.matching.edges) {
      const Edge& ed = g.edge(e);
      EXPECT_TRUE(usedU.insert(ed.u).second) << "left vertex reused";
      EXPECT_TRUE(usedV.insert(ed.v).second) << "right vertex reused";
      EXPECT_GT(fm.x[e], 0.0) << "matched an edge outside the support";
      w += ed.weight;
    }
    EXPECT_NEAR(w, r.matching.weight, 1e-12);
  }
}

TEST(RoundOcrs, MeanWeightTracksHalfTheObjective) {
  StarFixture star = generateStarFixture(8, 0.3);
  FractionalMatching fm = makeFractional(star.graph, star.x);
  SelectabilityEstimate est = estimateSelectability(star.graph, fm, 20000, 17);
  EXPECT_NEAR(est.meanWeight(), fm.objective / 2.0, 3.0 * est.meanWeightSigma());
}

TEST(RoundOcrs, RejectsAnInfeasibleFractionalMatching) {
  ColoredBipartiteGraph g(1, 2, 1, {{0, 0, 1.0, 0}, {0, 1, 1.0, 0}});
  FractionalMatching fm = makeFractional(g, {0.8, 0.8});  // left load 1.6
  EXPECT_THROW(roundOcrs(g, fm, 1), std::invalid_argument);
  FractionalMatching bad = makeFractional(g, {0.5});  // wrong length
  EXPECT_THROW(roundOcrs(g, bad, 1), std::invalid_argument);
}

TEST(RoundOcrs, RejectsANonPermutationOrder) {
  ColoredBipartiteGraph g(1, 2, 1, {{0, 0, 1.0, 0}, {0, 1, 1.0, 0}});
  FractionalMatching fm = makeFractional(g, {0.5, 0.5});
  std::vector<int> dup{0, 0};
  EXPECT_THROW(roundOcrs(g, fm, &dup, 1), std::invalid_argument);
  std::vector<int> shortOrder{0};
  EXPECT_THROW(roundOcrs(g, fm, &shortOrder, 1), std::invalid_argument);
}

TEST(RoundOcrs, TraceRowsLineUpWithTheOrder) {
  ColoredBipartiteGraph g(1, 1, 1, {{0, 0, 1.0, 0}});
  FractionalMatching fm = makeFractional(g, {1.0});
  RoundingResult r = roundOcrs(g, fm, 42);
  ASSERT_EQ(r.trace.order.size(), 1u);
  EXPECT_EQ(r.trace.order[0], 0);
  EXPECT_EQ(r.trace.proposedEdge[0], 0);  // proposal is certain at x = 1
  EXPECT_DOUBLE_EQ(r.trace.acceptParam[0], 0.5);
  if (r.trace.acceptBit[0] == 1)
    EXPECT_EQ(r.trace.matchedEdge[0], 0);
  else
    EXPECT_EQ(r.trace.matchedEdge[0], -1);
}

TEST(CompleteWithinSupport, AddsHeaviestFreeSupportEdges) {
  //   u0-v0 (2.0, x=0.5)   u0-v1 (1.5, x=0.5)   u1-v1 (1.2, x=0.4)
  // Starting from the empty matching the completion takes u0-v0 first, then
  // u1-v1; u0-v1 conflicts with both.
  ColoredBipartiteGraph g(2, 2, 1,
                          {{0, 0, 2.0, 0}, {0, 1, 1.5, 0}, {1, 1, 1.2, 0}});
  FractionalMatching fm = makeFractional(g, {0.5, 0.5, 0.4});
  Matching empty = buildMatching(g, {});
  Matching filled = completeWithinSupport(g, fm, empty);
  EXPECT_EQ(filled.edges, (std::vector<int>{0, 2}));
  EXPECT_NEAR(filled.weight, 3.2, 1e-12);
}

TEST(CompleteWithinSupport, KeepsTheInputAndNeverLeavesTheSupport) {
  ColoredBipartiteGraph g(2, 2, 1,
                          {{0, 0, 2.0, 0}, {0, 1, 1.5, 0}, {1, 1, 1.2, 0}});
  // u0-v1 is already matched; u0-v0 is outside the support; u1-v1 is in the
  // support but shares v1 with the matched edge. Nothing can be added.
  FractionalMatching fm = makeFractional(g, {0.0, 0.5, 0.4});
  Matching seed = buildMatching(g, {1});
  Matching filled = completeWithinSupport(g, fm, seed);
  EXPECT_EQ(filled.edges, (std::vector<int>{1}));
  EXPECT_GE(filled.weight, seed.weight);
}

TEST(CompleteWithinSupport, IsDeterministicAndMaximalInTheSupport) {
  ColoredBipartiteGraph g = generateErdosRenyi(10, 0.5, 2, {1.0, 2.0}, true, 33);
  ASSERT_GT(g.numEdges(), 0);
  FractionalMatching fm;
  fm.x.assign(g.numEdges(), 0.3);
  for (int e = 0; e < g.numEdges(); ++e) fm.objective += 0.3 * g.edge(e).weight;
  Matching empty = buildMatching(g, {});
  Matching a = completeWithinSupport(g, fm, empty);
  Matching b = completeWithinSupport(g, fm, empty);
  EXPECT_EQ(a.edges, b.edges);
  // Maximality: no support edge has both endpoints free afterwards.
  std::set<int> usedU, usedV;
  for (int e : a.edges) {
    usedU.insert(g.edge(e).u);
    usedV.insert(g.edge(e).v);
  }
  for (int e = 0; e < g.numEdges(); ++e)
    EXPECT_TRUE(usedU.count(g.edge(e).u) || usedV.count(g.edge(e).v))
        << "edge " << e << " could still be added";
}

TEST(BinomialSigma, FrozenValue) {
  EXPECT_DOUBLE_EQ(binomialSigma(0.5, 10000), 0.005);
  EXPECT_DOUBLE_EQ(binomialSigma(0.0, 100), 0.0);
}

}  // namespace
}  // namespace fairmatch
