#include "fairmatch/matching.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace fairmatch {

Matching buildMatching(const ColoredBipartiteGraph& g, std::vector<int> edgeIndices) {
  std::sort(edgeIndices.begin(), edgeIndices.end());
  Matching m;
  m.perColorCount.assign(g.numColors(), 0);
  std::vector<char> usedU(g.nU(), 0), usedV(g.nV(), 0);
  for (int e : edgeIndices) {
    if (e < 0 || e >= g.numEdges())
      throw std::invalid_argument("buildMatching: edge index " + std::to_string(e) +
                                  " out of range");
    const Edge& ed = g.edge(e);
    if (usedU[ed.u] || usedV[ed.v])
      throw std::invalid_argument("buildMatching: edges are not vertex-disjoint at (" +
                                  std::to_string(ed.u) + ", " + std::to_string(ed.v) + ")");
    usedU[ed.u] = usedV[ed.v] = 1;
    m.perColorCount[ed.color] += 1;
    m.weight += ed.weight;
  }
  m.edges = std::move(edgeIndices);
  return m;
}

double totalMass(const FractionalMatching& fm) {
  return std::accumulate(fm.x.begin(), fm.x.end(), 0.0);
}

std::vector<double> colorMasses(const ColoredBipartiteGraph& g, const FractionalMatching& fm) {
  std::vector<double> mass(g.numColors(), 0.0);
  for (int e = 0; e < g.numEdges(); ++e) mass[g.edge(e).color] += fm.x[e];
  return mass;
}

std::vector<std::string> checkFractionalMatching(const ColoredBipartiteGraph& g,
                                                 const FractionalMatching& fm,
                                                 double tol) {
  std::vector<std::string> out;
  if (static_cast<int>(fm.x.size()) != g.numEdges()) {
    out.push_back("x has " + std::to_string(fm.x.size()) + " entries, graph has " +
                  std::to_string(g.numEdges()) + " edges");
    return out;
  }
  for (int e = 0; e < g.numEdges(); ++e) {
    if (!(fm.x[e] >= -tol))
      out.push_back("x[" + std::to_string(e) + "] = " + formatDouble(fm.x[e]) +
                    " is negative");
    if (!(fm.x[e] <= 1.0 + tol))
      out.push_back("x[" + std::to_string(e) + "] = " + formatDouble(fm.x[e]) +
                    " exceeds 1");
  }
  auto checkLoads = [&](int count, bool left) {
    for (int v = 0; v < count; ++v) {
      const auto& inc = left ? g.edgesOfU(v) : g.edgesOfV(v);
      double load = 0.0;
      for (int e : inc) load += fm.x[e];
      if (load > 1.0 + tol)
        out.push_back(std::string(left ? "left" : "right") + " vertex " +
                      std::to_string(v) + " has load " + formatDouble(load));
    }
  };
  checkLoads(g.nU(), true);
  checkLoads(g.nV(), false);
  return out;
}

}  // namespace fairmatch
