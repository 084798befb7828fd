#pragma once

#include <optional>
#include <stdexcept>

#include "fairmatch/fairness.hpp"
#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {

// Thrown when an enumeration would visit more states than its work limit.
// Callers are expected to fall back to an approximate path rather than accept
// a silently truncated "optimum".
struct WorkLimitExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BruteForceOptions {
  long workLimit = 10'000'000;     // DFS nodes visited before refusing
  std::optional<int> sizeCap;      // max matching size; default: no cap
};

// Exact maximum-weight balanced matching by depth-first enumeration over
// edges in descending-weight order (ties by index). A matching is balanced
// when every color's share lies in [alpha_c, beta_c]. The empty matching
// counts as balanced only when all alpha_c = 0; with a positive alpha the
// result is nullopt when no nonempty balanced matching exists. Ties in
// weight resolve to the first optimum in DFS order, so results are
// deterministic.
std::optional<Matching> bruteForceOpt(const ColoredBipartiteGraph& g,
                                      const FairnessSpec& spec,
                                      const BruteForceOptions& opts = {});

// floor((maxW^2 / minW^2) * C / (beta * (1 - eps))): size bound on balanced
// matchings under which exhaustive search is worthwhile.
long bruteForceSizeBound(double maxWeight, double minWeight, double C, double beta,
                         double eps);

struct PeelOptions {
  // Candidate matching sizes to try; -1 picks the defaults [numColors,
  // min(nU, nV)]. Sizes above min(nU, nV) can never complete, so the default
  // upper end loses nothing.
  int minSize = -1;
  int maxSize = -1;
};

// Greedy color-round-robin baseline (behavioral reconstruction of a
// prior-work heuristic, adequate for relative benchmarking): for each target
// size s, take colors in round-robin order, each time adding the heaviest
// edge of the current color that stays vertex-disjoint, abandoning the target
// as soon as a color has no feasible edge. Returns the heaviest candidate
// whose shares satisfy the spec exactly (delta = 0); an empty matching when
// no target size yields one.
Matching peelMatching(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                      const PeelOptions& opts = {});

}  // namespace fairmatch
