#pragma once

#include <string>
#include <vector>

namespace fairmatch {

enum class Relation { kLe, kGe, kEq };

struct LpRow {
  std::string name;
  std::vector<std::pair<int, double>> coeffs;  // (variable, coefficient)
  Relation rel = Relation::kLe;
  double rhs = 0.0;
};

// maximize objective^T x subject to the rows, x >= 0 (no finite upper bounds).
struct LinearProgram {
  std::vector<std::string> variableNames;
  std::vector<double> objective;
  std::vector<LpRow> rows;

  int numVariables() const { return static_cast<int>(objective.size()); }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

const char* toString(LpStatus s);

struct SimplexOptions {
  double feasTol = 1e-9;   // absolute row-residual tolerance, scaled by row norm
  double optTol = 1e-9;    // relative reduced-cost tolerance at optimality
  double pivotTol = 1e-10; // smallest pivot magnitude accepted
  // After this many consecutive degenerate pivots the pricing switches to
  // Bland's rule, which guarantees termination.
  int maxDegeneratePivots = 1000;
  long maxIterations = 0;  // 0: derived from the problem size
  int refactorInterval = 128;
};

struct SimplexSolution {
  LpStatus status = LpStatus::kNumericalFailure;
  std::vector<double> x;      // structural variables only
  double objective = 0.0;
  std::vector<double> duals;  // one multiplier per row
  long iterations = 0;
  std::string message;        // failure detail, empty on success
};

// Two-phase revised primal simplex with a dense basis inverse. Phase one is
// skipped when the all-slack basis is already feasible (every row of LP-Fair
// is a <= row with nonnegative right-hand side, so that family never pays for
// it). The returned solution is verified against the rows and the dual
// certificate before kOptimal is reported.
SimplexSolution solveSimplex(const LinearProgram& lp, const SimplexOptions& opts = {});

}  // namespace fairmatch
