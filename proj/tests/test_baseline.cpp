#include "fairmatch/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {
namespace {

// Independent oracle: enumerate all 2^m edge subsets, keep vertex-disjoint
// ones whose color shares satisfy the spec, return the best weight (and
// whether any balanced matching exists at all). Only for tiny m.
struct OracleResult {
  bool found = false;
  double weight = 0.0;
  int size = 0;
};

OracleResult oracleBest(const ColoredBipartiteGraph& g, const FairnessSpec& spec) {
  const int m = g.numEdges();
  OracleResult best;
  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    std::vector<bool> usedU(g.nU(), false), usedV(g.nV(), false);
    std::vector<int> counts(g.numColors(), 0);
    double weight = 0.0;
    int size = 0;
    bool ok = true;
    for (int e = 0; e < m && ok; ++e) {
      if (!(mask & (1u << e))) continue;
      const Edge& ed = g.edge(e);
      if (usedU[ed.u] || usedV[ed.v]) ok = false;
      usedU[ed.u] = usedV[ed.v] = true;
      counts[ed.color] += 1;
      weight += ed.weight;
      size += 1;
    }
    if (!ok) continue;
    if (size == 0) {
      if (spec.anyPositiveAlpha()) continue;
    } else {
      for (int c = 0; c < g.numColors() && ok; ++c) {
        double share = static_cast<double>(counts[c]) / size;
        if (share < spec.alpha(c) - 1e-9 || share > spec.beta(c) + 1e-9) ok = false;
      }
      if (!ok) continue;
    }
    if (!best.found || weight > best.weight) {
      best.found = true;
      best.weight = weight;
      best.size = size;
    }
  }
  return best;
}

TEST(BruteForceOpt, MatchesTheSubsetOracleOnRandomInstances) {
  int nontrivial = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    ColoredBipartiteGraph g = generateErdosRenyi(7, 0.4, 2, {1.0, 2.0}, true, seed);
    if (g.numEdges() == 0 || g.numEdges() > 14) continue;
    for (const FairnessSpec& spec :
         {FairnessSpec::global(0.0, 1.0), FairnessSpec::global(0.25, 0.75),
          FairnessSpec::global(0.5, 0.5)}) {
      OracleResult oracle = oracleBest(g, spec);
      std::optional<Matching> got = bruteForceOpt(g, spec);
      ASSERT_EQ(got.has_value(), oracle.found) << "seed " << seed;
      if (got) {
        EXPECT_NEAR(got->weight, oracle.weight, 1e-9) << "seed " << seed;
        ++nontrivial;
      }
    }
  }
  EXPECT_GE(nontrivial, 20);
}

TEST(BruteForceOpt, SingleEdgeAndEmptyGraph) {
  ColoredBipartiteGraph g(1, 1, 1, {{0, 0, 1.7, 0}});
  std::optional<Matching> m = bruteForceOpt(g, FairnessSpec::global(0.0, 1.0));
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->edges, std::vector<int>{0});
  EXPECT_DOUBLE_EQ(m->weight, 1.7);

  ColoredBipartiteGraph empty(2, 2, 1, {});
  std::optional<Matching> e = bruteForceOpt(empty, FairnessSpec::global(0.0, 1.0));
  ASSERT_TRUE(e.has_value());
  EXPECT_TRUE(e->empty());
  // With a positive alpha the empty matching does not count.
  EXPECT_FALSE(bruteForceOpt(empty, FairnessSpec::global(0.5, 1.0)).has_value());
}

TEST(BruteForceOpt, InfeasibleShareWindowsGiveNullopt) {
  // Path of three edges colored (1,2,1): any single edge misses alpha for the
  // other color; any pair shares a vertex or splits 2:0; the full triple
  // splits 2:1. With alpha = beta = 0.5 nothing is balanced.
  ColoredBipartiteGraph g(2, 2, 2,
                          {{0, 0, 1.0, 0}, {0, 1, 1.0, 1}, {1, 1, 1.0, 0}});
  EXPECT_FALSE(bruteForceOpt(g, FairnessSpec::global(0.5, 0.5)).has_value());
}

TEST(BruteForceOpt, SizeCapRestrictsTheSearch) {
  // Two disjoint unit edges: uncapped optimum takes both.
  ColoredBipartiteGraph g(2, 2, 1, {{0, 0, 1.0, 0}, {1, 1, 1.5, 0}});
  BruteForceOptions opts;
  opts.sizeCap = 1;
  std::optional<Matching> m = bruteForceOpt(g, FairnessSpec::global(0.0, 1.0), opts);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(m->size(), 1);
  EXPECT_DOUBLE_EQ(m->weight, 1.5);
}

TEST(BruteForceOpt, WorkLimitThrows) {
  ColoredBipartiteGraph g = generateErdosRenyi(12, 0.6, 2, {1.0, 2.0}, true, 3);
  ASSERT_GT(g.numEdges(), 10);
  BruteForceOptions opts;
  opts.workLimit = 5;
  EXPECT_THROW(bruteForceOpt(g, FairnessSpec::global(0.0, 1.0), opts),
               WorkLimitExceeded);
}

TEST(BruteForceOpt, PerColorSpecMustMatchTheGraph) {
  ColoredBipartiteGraph g(1, 1, 2, {{0, 0, 1.0, 0}});
  FairnessSpec spec = FairnessSpec::perColor({{0.0, 1.0}});
  EXPECT_THROW(bruteForceOpt(g, spec), std::invalid_argument);
}

TEST(BruteForceSizeBound, FrozenValues) {
  // Unit weights: floor(C / (beta (1 - eps))).
  EXPECT_EQ(bruteForceSizeBound(1.0, 1.0, 100.0, 0.5, 0.0), 200);
  // Weight ratio 2 quadruples the bound: floor(4 * 100 / (0.5 * 0.5)) = 1600.
  EXPECT_EQ(bruteForceSizeBound(2.0, 1.0, 100.0, 0.5, 0.5), 1600);
  EXPECT_EQ(bruteForceSizeBound(1.0, 1.0, 1.0, 1.0, 0.0), 1);
  EXPECT_THROW(bruteForceSizeBound(1.0, 2.0, 100.0, 0.5, 0.0), std::invalid_argument);
  EXPECT_THROW(bruteForceSizeBound(1.0, 1.0, 100.0, 0.0, 0.0), std::invalid_argument);
}

TEST(PeelMatching, TakesBothDisjointEdges) {
  ColoredBipartiteGraph g(2, 2, 2, {{0, 0, 1.3, 0}, {1, 1, 1.9, 1}});
  Matching m = peelMatching(g, FairnessSpec::global(0.4, 0.6));
  EXPECT_EQ(m.size(), 2);
  EXPECT_NEAR(m.weight, 3.2, 1e-12);
}

TEST(PeelMatching, RoundRobinPicksHeaviestPerColor) {
  // Color 1 has two choices on the same left vertex; the heavier one (1.8)
  // must be taken first, leaving v0 blocked for color 2's heavy edge at v0,
  // so color 2 falls back to its lighter disjoint edge.
  ColoredBipartiteGraph g(3, 3, 2,
                          {{0, 0, 1.2, 0},
                           {0, 1, 1.8, 0},
                           {1, 1, 1.9, 1},   // blocked: v1 taken by the 1.8 edge
                           {2, 2, 1.1, 1}});
  Matching m = peelMatching(g, FairnessSpec::global(0.0, 1.0));
  // Candidates: s=2 run takes 1.8 (color 1) then 1.1 (color 2).
  EXPECT_EQ(m.size(), 2);
  EXPECT_NEAR(m.weight, 1.8 + 1.1, 1e-12);
}

TEST(PeelMatching, RespectsTheShareWindow) {
  // Three disjoint edges, colors (1, 1, 2). With alpha = beta = 0.5 only a
  // (1, 1) split passes, so the peel must stop at size 2.
  ColoredBipartiteGraph g(3, 3, 2,
                          {{0, 0, 2.0, 0}, {1, 1, 1.5, 0}, {2, 2, 1.0, 1}});
  Matching m = peelMatching(g, FairnessSpec::global(0.5, 0.5));
  EXPECT_EQ(m.size(), 2);
  ASSERT_EQ(m.perColorCount.size(), 2u);
  EXPECT_EQ(m.perColorCount[0], 1);
  EXPECT_EQ(m.perColorCount[1], 1);
  EXPECT_NEAR(m.weight, 3.0, 1e-12);
}

TEST(PeelMatching, EmptyWhenNothingBalances) {
  // Single color present but the spec demands an equal split with a second
  // color that has no edges.
  ColoredBipartiteGraph g(2, 2, 2, {{0, 0, 1.0, 0}, {1, 1, 1.0, 0}});
  Matching m = peelMatching(g, FairnessSpec::global(0.5, 0.5));
  EXPECT_TRUE(m.empty());
}

TEST(PeelMatching, NeverBeatsBruteForce) {
  for (std::uint64_t seed = 40; seed <= 60; ++seed) {
    ColoredBipartiteGraph g = generateErdosRenyi(7, 0.4, 2, {1.0, 2.0}, true, seed);
    if (g.numEdges() > 14) continue;
    const FairnessSpec spec = FairnessSpec::global(0.25, 0.75);
    Matching peeled = peelMatching(g, spec);
    std::optional<Matching> brute = bruteForceOpt(g, spec);
    if (!brute) {
      EXPECT_TRUE(peeled.empty()) << "seed " << seed;
      continue;
    }
    EXPECT_LE(peeled.weight, brute->weight + 1e-9) << "seed " << seed;
    if (!peeled.empty()) {
      FairnessReport r = checkDeltaFair(peeled, spec, 0.0);
      EXPECT_TRUE(r.pass) << "seed " << seed;
    }
  }
}

TEST(PeelMatching, ExplicitSizeWindowIsHonored) {
  ColoredBipartiteGraph g(3, 3, 1,
                          {{0, 0, 1.0, 0}, {1, 1, 1.0, 0}, {2, 2, 1.0, 0}});
  PeelOptions opts;
  opts.minSize = 1;
  opts.maxSize = 2;
  Matching m = peelMatching(g, FairnessSpec::global(0.0, 1.0), opts);
  EXPECT_EQ(m.size(), 2);
}

}  // namespace
}  // namespace fairmatch
