#include "fairmatch/exact.hpp"

#include <algorithm>
#include <stdexcept>

#include "fairmatch/baseline.hpp"
#include "fairmatch/rounding.hpp"

namespace fairmatch {

namespace {

bool satisfiesBeta(const Matching& m, const FairnessSpec& spec) {
  const int size = m.size();
  if (size == 0) return true;
  for (size_t c = 0; c < m.perColorCount.size(); ++c) {
    if (m.perColorCount[c] - 1e-9 > spec.beta(static_cast<int>(c)) * size) return false;
  }
  return true;
}

}  // namespace

ExactModeResult solveExactBeta(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                               double eps, std::uint64_t seed, const ExactBetaOptions& opts) {
  spec.requireCompatible(g.numColors());
  if (!spec.allAlphaZero())
    throw std::invalid_argument("solveExactBeta: requires a spec with every alpha = 0");
  if (!(eps > 0.0) || !(eps < 1.0))
    throw std::invalid_argument("solveExactBeta: eps must lie in (0, 1)");
  if (opts.maxAttempts < 1)
    throw std::invalid_argument("solveExactBeta: maxAttempts must be positive");

  ExactModeResult result;
  result.matching = buildMatching(g, {});

  LpSolveResult lp = solve(buildLpFair(g, spec, eps));
  result.lpStatus = lp.status;
  result.lpObjective = lp.fractional.objective;
  if (lp.status != LpStatus::kOptimal) {
    result.satisfiedBeta = true;  // vacuously: nothing was matched
    return result;
  }

  const double total = totalMass(lp.fractional);
  result.lpTotalMass = total;
  if (total <= 1e-12) {
    result.satisfiedBeta = true;
    return result;
  }

  if (!spec.isPerColor() && opts.enableBruteForceDispatch &&
      spec.beta(0) * total <= opts.dispatchThreshold) {
    double minW = g.edge(0).weight, maxW = g.edge(0).weight;
    for (int e = 1; e < g.numEdges(); ++e) {
      minW = std::min(minW, g.edge(e).weight);
      maxW = std::max(maxW, g.edge(e).weight);
    }
    BruteForceOptions bf;
    bf.workLimit = opts.bruteForceWorkLimit;
    bf.sizeCap = static_cast<int>(std::min<long>(
        bruteForceSizeBound(maxW, minW, opts.dispatchThreshold, spec.beta(0), eps),
        std::min(g.nU(), g.nV())));
    try {
      if (auto exact = bruteForceOpt(g, spec, bf)) {
        result.matching = std::move(*exact);
        result.usedBruteForce = true;
        result.satisfiedBeta = satisfiesBeta(result.matching, spec);
        return result;
      }
    } catch (const WorkLimitExceeded&) {
      // Instance too branchy to enumerate after all; fall through to rounding.
    }
  }

  bool haveSatisfying = false;
  Matching bestSatisfying, bestOverall;
  for (int i = 0; i < opts.maxAttempts; ++i) {
    RoundingResult attempt = roundOcrs(g, lp.fractional, seed + static_cast<std::uint64_t>(i));
    if (i == 0 || attempt.matching.weight > bestOverall.weight)
      bestOverall = attempt.matching;
    if (satisfiesBeta(attempt.matching, spec) &&
        (!haveSatisfying || attempt.matching.weight > bestSatisfying.weight)) {
      haveSatisfying = true;
      bestSatisfying = attempt.matching;
    }
  }
  result.attempts = opts.maxAttempts;
  result.satisfiedBeta = haveSatisfying;
  result.matching = haveSatisfying ? std::move(bestSatisfying) : std::move(bestOverall);
  return result;
}

}  // namespace fairmatch
