#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "fairmatch/fairness.hpp"
#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"
#include "fairmatch/simplex.hpp"

namespace fairmatch {

// Fractional relaxation of fair matching on g:
//
//   maximize   sum_e w_e x_e
//   subject to sum_{e at v} x_e <= 1                         (row v_i per vertex)
//              alpha_c * sum_E x  - sum_{E_c} x <= 0         (row cLo_c)
//              sum_{E_c} x - beta_c * sum_E x   <= 0         (row cHi_c)
//              x >= 0
//
// Vertex rows come first (left block, then right block), then cLo_c / cHi_c
// per color. Rows that cannot bind are omitted: cLo_c when alpha_c = 0 and
// cHi_c when beta_c = 1, so the (0, 1) spec builds the plain matching LP.
// betaPerturbation scales every beta_c by (1 - eps); it requires a spec with
// all alpha_c = 0. Variables are named e0, e1, ... in edge order.
LinearProgram buildLpFair(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                          std::optional<double> betaPerturbation = std::nullopt);

struct LpSolveResult {
  LpStatus status = LpStatus::kNumericalFailure;
  FractionalMatching fractional;  // meaningful when status == kOptimal
  std::vector<double> duals;
  long iterations = 0;
  std::string message;
};

// Solves an edge-variable LP. On success x is clamped to [0, 1] (the vertex
// rows already force x_e <= 1 up to tolerance) and the objective is
// recomputed from the clamped vector so that downstream sampling sees
// consistent values.
LpSolveResult solve(const LinearProgram& lp, const SimplexOptions& opts = {});

// CPLEX LP text format: Maximize / Subject To (rows under their names) /
// Bounds / End. Round-trippable by standard external solvers.
void exportLp(const LinearProgram& lp, std::ostream& out);
void exportLpFile(const LinearProgram& lp, const std::string& path);

// Reads an external solver's solution as `variableName value` lines. Unknown
// names are an error; variables that never appear are 0 (solvers commonly
// omit zeros). The vector is validated against the rows of the program within
// feasTol before being returned; violations raise std::runtime_error.
FractionalMatching importSolution(const LinearProgram& lp, std::istream& in,
                                  double feasTol = 1e-6);
FractionalMatching importSolutionFile(const LinearProgram& lp, const std::string& path,
                                      double feasTol = 1e-6);

}  // namespace fairmatch
