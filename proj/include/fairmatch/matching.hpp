#pragma once

#include <string>
#include <vector>

#include "fairmatch/graph.hpp"

namespace fairmatch {

// Integral matching: pairwise vertex-disjoint edges of one graph.
struct Matching {
  std::vector<int> edges;          // edge indices, ascending
  std::vector<int> perColorCount;  // one entry per color
  double weight = 0.0;

  int size() const { return static_cast<int>(edges.size()); }
  bool empty() const { return edges.empty(); }
};

// Builds a Matching from edge indices. Throws std::invalid_argument when an
// index is out of range or two edges share an endpoint.
Matching buildMatching(const ColoredBipartiteGraph& g, std::vector<int> edgeIndices);

// One value per edge plus the weighted objective Σ w_e x_e.
struct FractionalMatching {
  std::vector<double> x;
  double objective = 0.0;
};

// Σ_e x_e.
double totalMass(const FractionalMatching& fm);

// Σ_{e of color c} x_e, one entry per color.
std::vector<double> colorMasses(const ColoredBipartiteGraph& g, const FractionalMatching& fm);

// Feasibility of a fractional matching irrespective of any fairness bounds:
// x has one entry per edge, every x_e lies in [-tol, 1 + tol] and every
// vertex load Σ_{e at v} x_e is at most 1 + tol. Violations as data.
std::vector<std::string> checkFractionalMatching(const ColoredBipartiteGraph& g,
                                                 const FractionalMatching& fm,
                                                 double tol);

}  // namespace fairmatch
