#pragma once

#include <cstdint>
#include <vector>

#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {

// Acceptance probability of a left vertex toward the right vertex processed
// at the current position: (1/2) / (1 - (1/2) * prefixMass), where prefixMass
// is the left vertex's fractional mass toward already-processed right
// vertices. Lies in [1/2, 1] whenever the vertex load is at most 1; the
// result is clamped to 1 to absorb tolerance-level overloads.
double acceptanceProb(double prefixMass);

// Convenience overload computing the prefix mass from (x, order): mass of u's
// edges toward right vertices at positions strictly before t.
double acceptanceProb(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                      const std::vector<int>& order, int t, int u);

// Everything the sampler decided, per position of the processing order.
// Replays are bit-exact: the same (graph, x, order, seed) reproduces the
// trace and the matching.
struct RoundingTrace {
  std::vector<int> order;          // right vertices in processing order
  std::vector<int> proposedEdge;   // edge index, -1 when the vertex proposed nothing
  std::vector<double> acceptParam; // acceptance probability; NaN without proposal
  std::vector<int> acceptBit;      // 1 accepted / 0 declined; -1 without proposal
  std::vector<int> matchedEdge;    // edge index added at this position, -1 if none

  std::string toJsonLines() const;  // one JSON object per position
};

struct RoundingResult {
  Matching matching;
  RoundingTrace trace;
};

// Proposal-resolution rounding of a fractional matching. Right vertices are
// processed in `order` (default: index order). Each proposes one incident
// left vertex u with probability x_(u,v), or nothing with the remaining
// probability. A proposal to u survives with probability
// acceptanceProb(prefix mass of u) and is matched iff u is still free; the
// prefix mass then grows by x of *every* edge of the processed vertex,
// proposal or not. Each position consumes its own substream of `seed`, so
// results do not depend on how many draws earlier positions used.
//
// Guarantees (for feasible x): every edge ends up matched with probability
// exactly x_e / 2, and conditioned on being proposed an edge is matched with
// probability exactly 1/2.
RoundingResult roundOcrs(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                         const std::vector<int>* order, std::uint64_t seed);
RoundingResult roundOcrs(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                         std::uint64_t seed);  // identity order

// Monte Carlo estimate of per-edge match rates over `trials` roundings with
// seeds derived from baseSeed. matchedCount[e] / trials estimates x_e / 2;
// matchedCount[e] / proposedCount[e] estimates the conditional 1/2 (an edge
// can only be matched at the position that proposed it). Weight moments
// support mean-weight checks: weightSum / trials estimates objective / 2.
struct SelectabilityEstimate {
  int trials = 0;
  std::vector<long> matchedCount;
  std::vector<long> proposedCount;
  double weightSum = 0.0;
  double weightSquareSum = 0.0;

  double matchRate(int e) const { return static_cast<double>(matchedCount[e]) / trials; }
  double conditionalRate(int e) const {
    return proposedCount[e] == 0
               ? 0.0
               : static_cast<double>(matchedCount[e]) / proposedCount[e];
  }
  double meanWeight() const { return weightSum / trials; }
  // Standard error of the mean weight.
  double meanWeightSigma() const;
};

SelectabilityEstimate estimateSelectability(const ColoredBipartiteGraph& g,
                                            const FractionalMatching& fm, int trials,
                                            std::uint64_t baseSeed);

// Deterministic greedy completion of a matching inside the support of a
// fractional solution: every edge with x_e > supportTol whose endpoints are
// still free is added, heaviest first (ties by index). The result contains
// the input matching, so its weight never decreases. The per-edge guarantees
// of roundOcrs apply to the input, not to the completed matching; benchmarks
// use this step to report a maximal-in-support matching, the way the
// relaxation's solution would be deployed in practice.
Matching completeWithinSupport(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                               const Matching& m, double supportTol = 1e-9);

// sqrt(p(1-p)/trials): standard error of a Bernoulli(p) frequency.
double binomialSigma(double p, int trials);

}  // namespace fairmatch
