#include "fairmatch/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairmatch/rng.hpp"

namespace fairmatch {

namespace {
constexpr double kLoadTol = 1e-7;
}

double acceptanceProb(double prefixMass) {
  if (!(prefixMass >= 0.0) || !(prefixMass <= 1.0 + kLoadTol))
    throw std::invalid_argument("acceptanceProb: prefix mass must lie in [0, 1]");
  return std::min(1.0, 0.5 / (1.0 - 0.5 * prefixMass));
}

double acceptanceProb(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                      const std::vector<int>& order, int t, int u) {
  if (t < 0 || t >= static_cast<int>(order.size()))
    throw std::invalid_argument("acceptanceProb: position out of range");
  std::vector<int> posOf(g.nV(), -1);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) posOf[order[i]] = i;
  double prefix = 0.0;
  for (int e : g.edgesOfU(u)) {
    int pos = posOf[g.edge(e).v];
    if (pos >= 0 && pos < t) prefix += fm.x[e];
  }
  return acceptanceProb(prefix);
}

RoundingResult roundOcrs(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                         const std::vector<int>* order, std::uint64_t seed) {
  auto bad = checkFractionalMatching(g, fm, kLoadTol);
  if (!bad.empty())
    throw std::invalid_argument("roundOcrs: infeasible fractional matching: " + bad[0]);

  std::vector<int> identity;
  if (order == nullptr) {
    identity.resize(g.nV());
    std::iota(identity.begin(), identity.end(), 0);
  } else {
    if (static_cast<int>(order->size()) != g.nV())
      throw std::invalid_argument("roundOcrs: order must list every right vertex once");
    std::vector<char> seenV(g.nV(), 0);
    for (int v : *order) {
      if (v < 0 || v >= g.nV() || seenV[v])
        throw std::invalid_argument("roundOcrs: order is not a permutation");
      seenV[v] = 1;
    }
  }
  const std::vector<int>& processing = order ? *order : identity;

  RoundingTrace trace;
  trace.order = processing;
  const int n = g.nV();
  trace.proposedEdge.assign(n, -1);
  trace.acceptParam.assign(n, std::numeric_limits<double>::quiet_NaN());
  trace.acceptBit.assign(n, -1);
  trace.matchedEdge.assign(n, -1);

  std::vector<double> prefix(g.nU(), 0.0);  // mass of already-processed neighbors
  std::vector<char> matchedU(g.nU(), 0);
  std::vector<int> chosen;

  for (int t = 0; t < n; ++t) {
    const int v = processing[t];
    // One substream per position: replay does not depend on how many draws
    // other positions consumed.
    SplitMix64 rng = substream(seed, static_cast<std::uint64_t>(t));

    // Propose edge e with probability x_e, nothing with the leftover mass.
    const double coin = rng.nextUnit();
    int proposal = -1;
    double cumulative = 0.0;
    for (int e : g.edgesOfV(v)) {
      cumulative += fm.x[e];
      if (coin < cumulative) {
        proposal = e;
        break;
      }
    }

    if (proposal >= 0) {
      const int u = g.edge(proposal).u;
      const double a = acceptanceProb(std::min(prefix[u], 1.0));
      const bool accepted = rng.nextUnit() < a;
      trace.proposedEdge[t] = proposal;
      trace.acceptParam[t] = a;
      trace.acceptBit[t] = accepted ? 1 : 0;
      if (accepted && !matchedU[u]) {
        matchedU[u] = 1;
        chosen.push_back(proposal);
        trace.matchedEdge[t] = proposal;
      }
    }

    // The prefix grows by every incident x, proposal or not; this is what
    // makes the acceptance probability cancel the survival probability.
    for (int e : g.edgesOfV(v)) prefix[g.edge(e).u] += fm.x[e];
  }

  return {buildMatching(g, std::move(chosen)), std::move(trace)};
}

RoundingResult roundOcrs(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                         std::uint64_t seed) {
  return roundOcrs(g, fm, nullptr, seed);
}

std::string RoundingTrace::toJsonLines() const {
  std::ostringstream out;
  for (size_t t = 0; t < order.size(); ++t) {
    nlohmann::ordered_json j;
    j["t"] = t + 1;
    j["vertex"] = order[t];
    if (proposedEdge[t] >= 0) {
      j["proposedEdge"] = proposedEdge[t];
      j["acceptanceParam"] = acceptParam[t];
      j["acceptBit"] = acceptBit[t];
    } else {
      j["proposedEdge"] = nullptr;
      j["acceptanceParam"] = nullptr;
      j["acceptBit"] = nullptr;
    }
    if (matchedEdge[t] >= 0)
      j["matchedEdge"] = matchedEdge[t];
    else
      j["matchedEdge"] = nullptr;
    out << j.dump() << "\n";
  }
  return out.str();
}

SelectabilityEstimate estimateSelectability(const ColoredBipartiteGraph& g,
                                            const FractionalMatching& fm, int trials,
                                            std::uint64_t baseSeed) {
  if (trials < 1)
    throw std::invalid_argument("estimateSelectability: trials must be positive");
  SelectabilityEstimate est;
  est.trials = trials;
  est.matchedCount.assign(g.numEdges(), 0);
  est.proposedCount.assign(g.numEdges(), 0);
  for (int t = 0; t < trials; ++t) {
    RoundingResult r = roundOcrs(g, fm, deriveSeed(baseSeed, t));
    for (int pos = 0; pos < g.nV(); ++pos) {
      if (r.trace.proposedEdge[pos] >= 0) est.proposedCount[r.trace.proposedEdge[pos]] += 1;
    }
    for (int e : r.matching.edges) est.matchedCount[e] += 1;
    est.weightSum += r.matching.weight;
    est.weightSquareSum += r.matching.weight * r.matching.weight;
  }
  return est;
}

double SelectabilityEstimate::meanWeightSigma() const {
  if (trials < 2) return 0.0;
  const double mean = weightSum / trials;
  const double variance =
      std::max(0.0, weightSquareSum / trials - mean * mean) * trials / (trials - 1.0);
  return std::sqrt(variance / trials);
}

Matching completeWithinSupport(const ColoredBipartiteGraph& g, const FractionalMatching& fm,
                               const Matching& m, double supportTol) {
  if (static_cast<int>(fm.x.size()) != g.numEdges())
    throw std::invalid_argument("completeWithinSupport: x must have one entry per edge");
  std::vector<char> usedU(g.nU(), 0), usedV(g.nV(), 0);
  for (int e : m.edges) {
    usedU[g.edge(e).u] = 1;
    usedV[g.edge(e).v] = 1;
  }
  std::vector<int> candidates;
  for (int e = 0; e < g.numEdges(); ++e)
    if (fm.x[e] > supportTol && !usedU[g.edge(e).u] && !usedV[g.edge(e).v])
      candidates.push_back(e);
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](int a, int b) { return g.edge(a).weight > g.edge(b).weight; });
  std::vector<int> edges = m.edges;
  for (int e : candidates) {
    if (usedU[g.edge(e).u] || usedV[g.edge(e).v]) continue;
    usedU[g.edge(e).u] = usedV[g.edge(e).v] = 1;
    edges.push_back(e);
  }
  return buildMatching(g, std::move(edges));
}

double binomialSigma(double p, int trials) {
  return std::sqrt(p * (1.0 - p) / trials);
}

}  // namespace fairmatch
