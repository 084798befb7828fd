#include "fairmatch/fairness.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {
namespace {

// Four disjoint edges, two per color, so any subset is a matching and the
// color counts are easy to steer.
ColoredBipartiteGraph fourDisjoint() {
  return ColoredBipartiteGraph(4, 4, 2,
                               {{0, 0, 1.0, 0},
                                {1, 1, 1.0, 0},
                                {2, 2, 1.0, 1},
                                {3, 3, 1.0, 1}});
}

TEST(FairnessSpec, GlobalAppliesToEveryColor) {
  FairnessSpec spec = FairnessSpec::global(0.2, 0.7);
  EXPECT_FALSE(spec.isPerColor());
  EXPECT_DOUBLE_EQ(spec.alpha(0), 0.2);
  EXPECT_DOUBLE_EQ(spec.alpha(5), 0.2);
  EXPECT_DOUBLE_EQ(spec.beta(3), 0.7);
  EXPECT_TRUE(spec.anyPositiveAlpha());
  spec.requireCompatible(7);  // never throws for a global spec
}

TEST(FairnessSpec, PerColorIsCheckedAgainstTheGraph) {
  FairnessSpec spec = FairnessSpec::perColor({{0.0, 0.5}, {0.1, 1.0}});
  EXPECT_TRUE(spec.isPerColor());
  EXPECT_EQ(spec.boundCount(), 2);
  EXPECT_DOUBLE_EQ(spec.beta(0), 0.5);
  EXPECT_DOUBLE_EQ(spec.alpha(1), 0.1);
  EXPECT_TRUE(spec.anyPositiveAlpha());
  EXPECT_NO_THROW(spec.requireCompatible(2));
  EXPECT_THROW(spec.requireCompatible(3), std::invalid_argument);
}

TEST(FairnessSpec, RejectsMalformedBounds) {
  EXPECT_THROW(FairnessSpec::global(-0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(FairnessSpec::global(0.0, 1.5), std::invalid_argument);
  EXPECT_THROW(FairnessSpec::global(0.8, 0.5), std::invalid_argument);
  EXPECT_THROW(FairnessSpec::perColor({}), std::invalid_argument);
}

TEST(CheckDeltaFair, BalancedSplitPasses) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1, 2, 3});  // counts (2, 2)
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.5, 0.5), 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.degenerate);
  EXPECT_EQ(r.matchingSize, 4);
  EXPECT_DOUBLE_EQ(r.violationLower, 1.0);
  EXPECT_DOUBLE_EQ(r.violationUpper, 1.0);
  ASSERT_EQ(r.colors.size(), 2u);
  EXPECT_DOUBLE_EQ(r.colors[0].share, 0.5);
  EXPECT_TRUE(r.colors[0].pass);
}

TEST(CheckDeltaFair, SkewedSplitReportsViolationFactors) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1, 2});  // counts (2, 1), shares (2/3, 1/3)
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.5, 0.5), 0.0);
  EXPECT_FALSE(r.pass);
  // Upper: color 1 share 2/3 over beta 1/2 -> factor 4/3.
  EXPECT_NEAR(r.violationUpper, (2.0 / 3.0) / 0.5, 1e-12);
  // Lower: color 2 share 1/3 under alpha 1/2 -> factor 3/2.
  EXPECT_NEAR(r.violationLower, 0.5 / (1.0 / 3.0), 1e-12);
}

TEST(CheckDeltaFair, DeltaRelaxesTheWindow) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1, 2});  // shares (2/3, 1/3)
  // Window [(1-d) 0.5, (1+d) 0.5] with d = 0.34 covers [0.33, 0.67].
  FairnessReport relaxed = checkDeltaFair(m, FairnessSpec::global(0.5, 0.5), 0.34);
  EXPECT_TRUE(relaxed.pass);
  // Violation factors ignore delta: they stay at the raw-bound values.
  EXPECT_GT(relaxed.violationUpper, 1.3);
  FairnessReport tight = checkDeltaFair(m, FairnessSpec::global(0.5, 0.5), 0.1);
  EXPECT_FALSE(tight.pass);
}

TEST(CheckDeltaFair, EmptyMatchingIsDegenerate) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {});
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.5, 0.5), 0.0);
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.degenerate);
  EXPECT_DOUBLE_EQ(r.violationLower, 1.0);
  EXPECT_DOUBLE_EQ(r.violationUpper, 1.0);
}

TEST(CheckDeltaFair, MissingColorGivesInfiniteLowerViolation) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1});  // color 2 absent
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.25, 1.0), 0.0);
  EXPECT_FALSE(r.pass);
  EXPECT_TRUE(std::isinf(r.violationLower));
  EXPECT_DOUBLE_EQ(r.violationUpper, 1.0);
}

TEST(CheckDeltaFair, PerColorSpecChecksEachColorAgainstItsOwnWindow) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1, 2});  // shares (2/3, 1/3)
  FairnessSpec spec = FairnessSpec::perColor({{0.0, 0.7}, {0.3, 1.0}});
  FairnessReport r = checkDeltaFair(m, spec, 0.0);
  EXPECT_TRUE(r.pass);
  FairnessSpec strict = FairnessSpec::perColor({{0.0, 0.6}, {0.3, 1.0}});
  EXPECT_FALSE(checkDeltaFair(m, strict, 0.0).pass);
}

TEST(FailureBoundTwoSided, FrozenValues) {
  // 4 exp(-0.25 * 2800 / 28) = 4 exp(-25)
  EXPECT_NEAR(failureBoundTwoSided(0.5, 2800.0), 4.0 * std::exp(-25.0), 1e-22);
  // 4 exp(-0.25 * 224 / 28) = 4 exp(-2) ~ 0.5413
  EXPECT_NEAR(failureBoundTwoSided(0.5, 224.0), 4.0 * std::exp(-2.0), 1e-12);
  // Cap at one for small masses.
  EXPECT_DOUBLE_EQ(failureBoundTwoSided(0.1, 10.0), 1.0);
}

TEST(FailureBoundTwoSided, MonotoneInDeltaAndMass) {
  double prev = 1.0;
  for (double delta : {0.2, 0.4, 0.6, 0.8}) {
    double b = failureBoundTwoSided(delta, 500.0);
    EXPECT_LE(b, prev + 1e-15);
    prev = b;
  }
  prev = 1.0;
  for (double mass : {100.0, 400.0, 1600.0}) {
    double b = failureBoundTwoSided(0.5, mass);
    EXPECT_LE(b, prev + 1e-15);
    prev = b;
  }
}

TEST(FailureBoundTwoSided, PerColorVectorUsesEachColorsMass) {
  ColoredBipartiteGraph g = fourDisjoint();
  FractionalMatching fm;
  fm.x = {1.0, 1.0, 0.5, 0.5};  // masses (2.0, 1.0)
  std::vector<double> bounds = failureBoundTwoSided(g, fm, 0.5);
  ASSERT_EQ(bounds.size(), 2u);
  EXPECT_DOUBLE_EQ(bounds[0], failureBoundTwoSided(0.5, 2.0));
  EXPECT_DOUBLE_EQ(bounds[1], failureBoundTwoSided(0.5, 1.0));
}

TEST(FailureBoundOneSided, FrozenValuesAndCap) {
  // 2 exp(-0.25 * 0.5 * 2240 / 28) = 2 exp(-10)
  EXPECT_NEAR(failureBoundOneSided(0.5, 0.5, 2240.0), 2.0 * std::exp(-10.0), 1e-15);
  EXPECT_DOUBLE_EQ(failureBoundOneSided(0.1, 0.5, 10.0), 1.0);
  // Tighter eps or more mass shrink the bound.
  EXPECT_LT(failureBoundOneSided(0.6, 0.5, 500.0), failureBoundOneSided(0.3, 0.5, 500.0));
  EXPECT_LT(failureBoundOneSided(0.3, 0.5, 900.0), failureBoundOneSided(0.3, 0.5, 500.0));
}

TEST(AttachFailureBounds, FillsPerColorBounds) {
  ColoredBipartiteGraph g = fourDisjoint();
  FractionalMatching fm;
  fm.x = {1.0, 1.0, 0.5, 0.5};
  Matching m = buildMatching(g, {0, 1, 2, 3});
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.0, 1.0), 0.5);
  attachFailureBounds(r, g, fm);
  ASSERT_EQ(r.failureBoundPerColor.size(), 2u);
  EXPECT_DOUBLE_EQ(r.failureBoundPerColor[0], failureBoundTwoSided(0.5, 2.0));
}

TEST(EmpiricalConcentration, SaturatedEdgeNeverDeviates) {
  // One edge with x = 1: the color count is Bernoulli(1/2) and S_c/2 = 1/2,
  // so |count - 1/2| = 1/2 always. With delta = 1.2 the threshold
  // delta * S_c / 2 = 0.6 is never exceeded; with delta = 0.8 it always is.
  ColoredBipartiteGraph g(1, 1, 1, {{0, 0, 1.0, 0}});
  FractionalMatching fm;
  fm.x = {1.0};
  fm.objective = 1.0;
  ConcentrationStats wide = empiricalConcentration(g, fm, 1.2, 400, 5);
  ASSERT_EQ(wide.exceedFrequency.size(), 1u);
  EXPECT_DOUBLE_EQ(wide.exceedFrequency[0], 0.0);
  ConcentrationStats narrow = empiricalConcentration(g, fm, 0.8, 400, 5);
  EXPECT_DOUBLE_EQ(narrow.exceedFrequency[0], 1.0);
  EXPECT_DOUBLE_EQ(narrow.analyticBound[0], 1.0);  // capped: tiny mass
}

TEST(EmpiricalConcentration, ManyDisjointEdgesConcentrate) {
  // 60 disjoint saturated edges of one color: S_c = 60, delta = 0.5 allows
  // deviations below 15; the analytic bound 2 exp(-60/112) ~ 1.17 caps at 1,
  // but the observed frequency should be far below even that.
  std::vector<Edge> edges;
  for (int i = 0; i < 60; ++i) edges.push_back({i, i, 1.0, 0});
  ColoredBipartiteGraph g(60, 60, 1, edges);
  FractionalMatching fm;
  fm.x.assign(60, 1.0);
  fm.objective = 60.0;
  ConcentrationStats stats = empiricalConcentration(g, fm, 0.5, 2000, 9);
  EXPECT_LE(stats.exceedFrequency[0], 0.05);
}

TEST(CheckColorBounds, ReportsViolationsAsData) {
  ColoredBipartiteGraph g = fourDisjoint();
  FractionalMatching ok;
  ok.x = {0.5, 0.5, 0.5, 0.5};  // masses (1, 1), total 2
  EXPECT_TRUE(checkColorBounds(g, ok, FairnessSpec::global(0.4, 0.6), 1.0, 1e-9).empty());
  FractionalMatching skewed;
  skewed.x = {1.0, 1.0, 0.0, 0.0};  // masses (2, 0)
  std::vector<std::string> issues =
      checkColorBounds(g, skewed, FairnessSpec::global(0.4, 0.6), 1.0, 1e-9);
  EXPECT_EQ(issues.size(), 2u);  // color 1 above beta, color 2 below alpha
}

TEST(CheckColorBounds, BetaScaleTightensTheUpperBound) {
  ColoredBipartiteGraph g = fourDisjoint();
  FractionalMatching fm;
  fm.x = {0.6, 0.6, 0.4, 0.4};  // shares (0.6, 0.4)
  EXPECT_TRUE(checkColorBounds(g, fm, FairnessSpec::global(0.0, 0.6), 1.0, 1e-9).empty());
  // Scaling beta by 0.8 lowers the cap to 0.48: color 1 now violates.
  EXPECT_FALSE(checkColorBounds(g, fm, FairnessSpec::global(0.0, 0.6), 0.8, 1e-9).empty());
}

TEST(FairnessReport, JsonUsesOneBasedColorsAndNullForInfinity) {
  ColoredBipartiteGraph g = fourDisjoint();
  Matching m = buildMatching(g, {0, 1});  // color 2 absent
  FairnessReport r = checkDeltaFair(m, FairnessSpec::global(0.25, 1.0), 0.0);
  std::string json = r.toJson();
  EXPECT_NE(json.find("\"color\":1"), std::string::npos);
  EXPECT_NE(json.find("\"color\":2"), std::string::npos);
  EXPECT_NE(json.find("\"violationLower\":null"), std::string::npos);
  EXPECT_EQ(json.find("inf"), std::string::npos);
}

}  // namespace
}  // namespace fairmatch
