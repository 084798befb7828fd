#include "fairmatch/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fairmatch {

namespace {

constexpr double kCountSlack = 1e-9;

// Shares of a partial matching, tested directly on integer counts.
bool balanced(const std::vector<int>& counts, int size, const FairnessSpec& spec) {
  for (size_t c = 0; c < counts.size(); ++c) {
    const double lo = spec.alpha(static_cast<int>(c)) * size;
    const double hi = spec.beta(static_cast<int>(c)) * size;
    if (counts[c] + kCountSlack < lo || counts[c] - kCountSlack > hi) return false;
  }
  return true;
}

struct BruteState {
  const ColoredBipartiteGraph& g;
  const FairnessSpec& spec;
  const std::vector<int>& byWeight;  // edge ids, heaviest first
  long workLimit;
  int sizeCap;

  BruteState(const ColoredBipartiteGraph& graph, const FairnessSpec& fairness,
             const std::vector<int>& order, long limit, int cap)
      : g(graph), spec(fairness), byWeight(order), workLimit(limit), sizeCap(cap) {}

  std::vector<double> suffixWeight;  // max additional weight from position i on
  long nodes = 0;

  std::vector<char> usedU, usedV;
  std::vector<int> chosen;
  std::vector<int> counts;
  double weight = 0.0;

  bool haveBest = false;
  double bestWeight = 0.0;
  std::vector<int> bestEdges;

  void consider() {
    if (chosen.empty() && spec.anyPositiveAlpha()) return;
    if (!balanced(counts, static_cast<int>(chosen.size()), spec)) return;
    if (!haveBest || weight > bestWeight) {
      haveBest = true;
      bestWeight = weight;
      bestEdges = chosen;
    }
  }

  void dfs(size_t pos) {
    if (++nodes > workLimit)
      throw WorkLimitExceeded("bruteForceOpt: work limit of " + std::to_string(workLimit) +
                              " nodes exceeded");
    if (pos == byWeight.size()) return;
    // Nothing ahead can lift the running weight past the incumbent.
    if (haveBest && weight + suffixWeight[pos] <= bestWeight) return;

    const Edge& e = g.edge(byWeight[pos]);
    if (!usedU[e.u] && !usedV[e.v] && static_cast<int>(chosen.size()) < sizeCap) {
      usedU[e.u] = usedV[e.v] = 1;
      chosen.push_back(byWeight[pos]);
      counts[e.color] += 1;
      weight += e.weight;
      consider();
      dfs(pos + 1);
      weight -= e.weight;
      counts[e.color] -= 1;
      chosen.pop_back();
      usedU[e.u] = usedV[e.v] = 0;
    }
    dfs(pos + 1);
  }
};

}  // namespace

std::optional<Matching> bruteForceOpt(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                                      const BruteForceOptions& opts) {
  spec.requireCompatible(g.numColors());
  if (opts.workLimit < 1) throw std::invalid_argument("bruteForceOpt: workLimit must be positive");
  if (opts.sizeCap && *opts.sizeCap < 0)
    throw std::invalid_argument("bruteForceOpt: sizeCap must be nonnegative");

  std::vector<int> byWeight(g.numEdges());
  std::iota(byWeight.begin(), byWeight.end(), 0);
  std::stable_sort(byWeight.begin(), byWeight.end(), [&](int a, int b) {
    return g.edge(a).weight > g.edge(b).weight;
  });

  const int cap = opts.sizeCap ? *opts.sizeCap : std::min(g.nU(), g.nV());
  BruteState st{g, spec, byWeight, opts.workLimit, cap};
  st.suffixWeight.assign(g.numEdges() + 1, 0.0);
  for (int i = g.numEdges() - 1; i >= 0; --i)
    st.suffixWeight[i] = st.suffixWeight[i + 1] + g.edge(byWeight[i]).weight;
  st.usedU.assign(g.nU(), 0);
  st.usedV.assign(g.nV(), 0);
  st.counts.assign(g.numColors(), 0);

  st.consider();  // the empty matching, admissible only without lower bounds
  st.dfs(0);

  if (!st.haveBest) return std::nullopt;
  return buildMatching(g, std::move(st.bestEdges));
}

long bruteForceSizeBound(double maxWeight, double minWeight, double C, double beta, double eps) {
  if (!(minWeight > 0.0) || !(maxWeight >= minWeight))
    throw std::invalid_argument("bruteForceSizeBound: need maxWeight >= minWeight > 0");
  if (!(C > 0.0)) throw std::invalid_argument("bruteForceSizeBound: C must be positive");
  if (!(beta > 0.0) || beta > 1.0)
    throw std::invalid_argument("bruteForceSizeBound: beta must lie in (0, 1]");
  if (!(eps >= 0.0) || eps >= 1.0)
    throw std::invalid_argument("bruteForceSizeBound: eps must lie in [0, 1)");
  const double ratio = (maxWeight / minWeight) * (maxWeight / minWeight);
  return static_cast<long>(std::floor(ratio * C / (beta * (1.0 - eps))));
}

Matching peelMatching(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                      const PeelOptions& opts) {
  spec.requireCompatible(g.numColors());
  const int ell = g.numColors();
  const int maxPossible = std::min(g.nU(), g.nV());
  const int minSize = opts.minSize < 0 ? ell : opts.minSize;
  const int maxSize = opts.maxSize < 0 ? maxPossible : opts.maxSize;
  if (minSize < 1) throw std::invalid_argument("peelMatching: minSize must be positive");

  // One canonical greedy run; every candidate size is a prefix of it.
  std::vector<char> usedU(g.nU(), 0), usedV(g.nV(), 0);
  std::vector<int> run;
  for (int step = 0; static_cast<int>(run.size()) < maxSize; ++step) {
    const int color = ell == 0 ? 0 : step % ell;
    int pick = -1;
    for (int e : g.edgesOfColor(color)) {
      const Edge& edge = g.edge(e);
      if (usedU[edge.u] || usedV[edge.v]) continue;
      if (pick < 0 || g.edge(e).weight > g.edge(pick).weight) pick = e;
    }
    if (pick < 0) break;
    usedU[g.edge(pick).u] = usedV[g.edge(pick).v] = 1;
    run.push_back(pick);
  }

  Matching best = buildMatching(g, {});
  bool haveBest = false;
  for (int s = minSize; s <= maxSize && s <= static_cast<int>(run.size()); ++s) {
    Matching candidate =
        buildMatching(g, std::vector<int>(run.begin(), run.begin() + s));
    FairnessReport report = checkDeltaFair(candidate, spec, 0.0);
    if (!report.pass || report.degenerate) continue;
    if (!haveBest || candidate.weight > best.weight) {
      haveBest = true;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace fairmatch
