#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fairmatch {

// Edge of a colored bipartite graph. u indexes the left side, v the right
// side. Colors are 0-based in memory; the file formats use 1-based colors.
struct Edge {
  int u = 0;
  int v = 0;
  double weight = 1.0;
  int color = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Immutable colored bipartite graph with array-backed adjacency. The
// constructor accepts arbitrary edge lists (including invalid ones) so that
// validate() can report problems as data; adjacency is built only from edges
// whose endpoints and color are in range.
class ColoredBipartiteGraph {
 public:
  ColoredBipartiteGraph() = default;
  ColoredBipartiteGraph(int nU, int nV, int numColors, std::vector<Edge> edges);

  int nU() const { return nU_; }
  int nV() const { return nV_; }
  int numColors() const { return numColors_; }
  int numEdges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Edge indices incident to one vertex. The right-side lists are sorted by
  // left endpoint, which fixes the sampling order used by the rounding step.
  const std::vector<int>& edgesOfU(int u) const { return adjU_[u]; }
  const std::vector<int>& edgesOfV(int v) const { return adjV_[v]; }
  const std::vector<int>& edgesOfColor(int c) const { return byColor_[c]; }

  friend bool operator==(const ColoredBipartiteGraph& a, const ColoredBipartiteGraph& b) {
    return a.nU_ == b.nU_ && a.nV_ == b.nV_ && a.numColors_ == b.numColors_ &&
           a.edges_ == b.edges_;
  }

 private:
  int nU_ = 0;
  int nV_ = 0;
  int numColors_ = 1;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adjU_;
  std::vector<std::vector<int>> adjV_;
  std::vector<std::vector<int>> byColor_;
};

// Structural checks: endpoint and color ranges, strictly positive finite
// weights, no duplicate (u, v) pairs. Returns human-readable violations;
// an empty list means the graph is valid.
std::vector<std::string> validate(const ColoredBipartiteGraph& g);

// Half-open weight interval [lo, hi), lo > 0.
struct WeightRange {
  double lo = 1.0;
  double hi = 2.0;
};

// Random bipartite instance: the n vertices are split into left/right by
// independent fair coins, each crossing pair becomes an edge with probability
// p, weights are uniform in the given range and colors uniform over
// {1..numColors}. The seed is split into independent substreams for the
// partition, the edge coins, the weights and the colors, so the same seed
// reproduces the same graph. Only bipartite output is supported:
// bipartiteSplit=false throws.
ColoredBipartiteGraph generateErdosRenyi(int n, double p, int numColors,
                                         WeightRange weights, bool bipartiteSplit,
                                         std::uint64_t seed);

struct StarFixture {
  ColoredBipartiteGraph graph;  // one left hub, n+1 right leaves, unit weights
  std::vector<double> x;        // feasible fractional matching, sums to 1
};

// Hub-and-leaves instance: n light edges of color 1 with x = eps/n each plus
// one heavy edge of color 2 with x = 1 - eps. Exercises the regime where one
// color's mass is spread over many tiny probabilities while the other color
// is a single near-certain edge.
StarFixture generateStarFixture(int n, double eps);

// Text format:
//   fairmatch-graph v1
//   nU nV m numColors
//   u v weight color     (m lines, colors 1-based, weights round-trip exactly)
// A JSON object mirror {"nU":..,"nV":..,"m":..,"ell":..,"edges":[[u,v,w,c],..]}
// is accepted as well; readGraph auto-detects which one it is given.
ColoredBipartiteGraph readGraph(std::istream& in);
ColoredBipartiteGraph readGraphFile(const std::string& path);
void writeGraph(const ColoredBipartiteGraph& g, std::ostream& out);
void writeGraphFile(const ColoredBipartiteGraph& g, const std::string& path);
std::string writeGraphJson(const ColoredBipartiteGraph& g);
ColoredBipartiteGraph readGraphJson(const std::string& text);

// 17 significant digits: parses back to exactly the same double.
std::string formatDouble(double value);

}  // namespace fairmatch
