#pragma once

#include <cstdint>

#include "fairmatch/fairness.hpp"
#include "fairmatch/graph.hpp"
#include "fairmatch/lp.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {

struct ExactBetaOptions {
  int maxAttempts = 20;
  // Brute-force dispatch: when beta * (total fractional mass) is at most this
  // threshold the optimum is small enough to enumerate exactly. Only applies
  // to global-beta specs; per-color specs always take the rounding path.
  double dispatchThreshold = 100.0;
  bool enableBruteForceDispatch = true;
  long bruteForceWorkLimit = 10'000'000;
};

struct ExactModeResult {
  Matching matching;
  // Recomputed from the returned matching: every color's share is at most
  // beta_c (an empty matching satisfies this vacuously).
  bool satisfiedBeta = false;
  int attempts = 0;        // roundings performed; 0 when brute force decided
  bool usedBruteForce = false;
  double lpObjective = 0.0;  // objective of the perturbed relaxation
  double lpTotalMass = 0.0;  // total fractional mass of the relaxation's optimum
  LpStatus lpStatus = LpStatus::kNumericalFailure;
};

// Upper-bounds-only pipeline: solves the relaxation with every beta_c scaled
// to (1 - eps) * beta_c (spec must have all alpha_c = 0), then rounds up to
// maxAttempts times with seeds seed, seed+1, ... and returns the heaviest
// attempt whose shares satisfy beta exactly; if none does, the heaviest
// attempt overall with satisfiedBeta = false. When the instance is small
// enough (see ExactBetaOptions) the exact enumerator replaces the rounding
// loop entirely and attempts stays 0.
ExactModeResult solveExactBeta(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                               double eps, std::uint64_t seed,
                               const ExactBetaOptions& opts = {});

}  // namespace fairmatch
