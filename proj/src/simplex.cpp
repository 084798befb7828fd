#include "fairmatch/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fairmatch {

const char* toString(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kNumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct SparseCol {
  std::vector<std::pair<int, double>> entries;  // (row, value), row-ascending
};

// Two-phase revised primal simplex over rows normalized to nonnegative
// right-hand sides. The basis inverse is kept densely (row-major) and
// refreshed from scratch every refactorInterval pivots.
class SimplexSolver {
 public:
  SimplexSolver(const LinearProgram& lp, const SimplexOptions& opts)
      : lp_(lp), opts_(opts) {}

  SimplexSolution run();

 private:
  enum class StepResult { kPivoted, kOptimal, kUnbounded, kFailed };

  void buildColumns();
  bool refactor();  // rebuilds binv_ and basicValue_ from basis_
  StepResult step(const std::vector<double>& cost, bool allowArtificial);
  LpStatus iterate(const std::vector<double>& cost, bool allowArtificial);
  bool driveOutArtificials();
  double reducedCost(const std::vector<double>& cost, const std::vector<double>& y,
                     int j) const;
  void computeDuals(const std::vector<double>& cost, std::vector<double>* y) const;
  void applyColumn(int j, std::vector<double>* w) const;  // w = binv * A_j
  bool verify(SimplexSolution* out) const;

  const LinearProgram& lp_;
  SimplexOptions opts_;

  int rows_ = 0;
  int structurals_ = 0;
  int firstArtificial_ = 0;  // column ids >= this are artificial
  int cols_ = 0;
  std::vector<SparseCol> columns_;
  std::vector<double> rhs_;      // normalized, >= 0
  std::vector<int> rowSign_;     // +1 / -1 relative to the input rows
  std::vector<Relation> rowRel_; // input relations

  std::vector<int> basis_;        // column id per row
  std::vector<int> basisPos_;     // row of a basic column, -1 otherwise
  std::vector<double> basicValue_;
  std::vector<double> binv_;      // rows_ x rows_, row-major

  double bScale_ = 1.0;
  long pivots_ = 0;
  int pivotsSinceRefactor_ = 0;
  int consecutiveDegenerate_ = 0;
  bool blandMode_ = false;
  long maxIterations_ = 0;
  std::string failure_;
};

void SimplexSolver::buildColumns() {
  rows_ = static_cast<int>(lp_.rows.size());
  structurals_ = lp_.numVariables();
  rhs_.resize(rows_);
  rowSign_.resize(rows_);
  rowRel_.resize(rows_);

  columns_.assign(structurals_, {});
  // Merge duplicate variable entries within a row while transposing.
  std::vector<double> dense(structurals_, 0.0);
  for (int i = 0; i < rows_; ++i) {
    const LpRow& row = lp_.rows[i];
    rowRel_[i] = row.rel;
    double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    rowSign_[i] = static_cast<int>(sign);
    rhs_[i] = sign * row.rhs;
    std::vector<int> touched;
    for (const auto& [var, coef] : row.coeffs) {
      if (var < 0 || var >= structurals_)
        throw std::invalid_argument("solveSimplex: row '" + row.name +
                                    "' references unknown variable");
      if (dense[var] == 0.0) touched.push_back(var);
      dense[var] += sign * coef;
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    for (int var : touched) {
      if (dense[var] != 0.0) columns_[var].entries.push_back({i, dense[var]});
      dense[var] = 0.0;
    }
    bScale_ = std::max(bScale_, rhs_[i]);
  }

  // Slack (+1) for <=, surplus (-1) for >=; artificials for rows whose slack
  // cannot seed a feasible basis.
  std::vector<int> needsArtificial;
  for (int i = 0; i < rows_; ++i) {
    Relation rel = rowRel_[i];
    if (rowSign_[i] < 0) rel = (rel == Relation::kLe)   ? Relation::kGe
                               : (rel == Relation::kGe) ? Relation::kLe
                                                        : Relation::kEq;
    if (rel == Relation::kLe) {
      SparseCol col;
      col.entries.push_back({i, 1.0});
      columns_.push_back(std::move(col));
    } else if (rel == Relation::kGe) {
      SparseCol col;
      col.entries.push_back({i, -1.0});
      columns_.push_back(std::move(col));
      needsArtificial.push_back(i);
    } else {
      needsArtificial.push_back(i);
    }
  }
  firstArtificial_ = static_cast<int>(columns_.size());
  for (int i : needsArtificial) {
    SparseCol col;
    col.entries.push_back({i, 1.0});
    columns_.push_back(std::move(col));
  }
  cols_ = static_cast<int>(columns_.size());

  // Initial basis: slack where available, artificial otherwise.
  basis_.assign(rows_, -1);
  basisPos_.assign(cols_, -1);
  int slackCursor = structurals_;
  int artCursor = firstArtificial_;
  for (int i = 0; i < rows_; ++i) {
    Relation rel = rowRel_[i];
    if (rowSign_[i] < 0) rel = (rel == Relation::kLe)   ? Relation::kGe
                               : (rel == Relation::kGe) ? Relation::kLe
                                                        : Relation::kEq;
    int chosen;
    if (rel == Relation::kLe) {
      chosen = slackCursor++;
    } else {
      if (rel == Relation::kGe) ++slackCursor;  // its surplus column exists but is nonbasic
      chosen = artCursor++;
    }
    basis_[i] = chosen;
    basisPos_[chosen] = i;
  }

  basicValue_ = rhs_;
  binv_.assign(static_cast<size_t>(rows_) * rows_, 0.0);
  for (int i = 0; i < rows_; ++i) binv_[static_cast<size_t>(i) * rows_ + i] = 1.0;

  maxIterations_ = opts_.maxIterations > 0
                       ? opts_.maxIterations
                       : 2000 + 50L * (rows_ + cols_);
}

void SimplexSolver::applyColumn(int j, std::vector<double>* w) const {
  const auto& entries = columns_[j].entries;
  for (int r = 0; r < rows_; ++r) {
    const double* row = &binv_[static_cast<size_t>(r) * rows_];
    double acc = 0.0;
    for (const auto& [i, v] : entries) acc += row[i] * v;
    (*w)[r] = acc;
  }
}

void SimplexSolver::computeDuals(const std::vector<double>& cost,
                                 std::vector<double>* y) const {
  y->assign(rows_, 0.0);
  for (int r = 0; r < rows_; ++r) {
    double cb = cost[basis_[r]];
    if (cb == 0.0) continue;
    const double* row = &binv_[static_cast<size_t>(r) * rows_];
    for (int i = 0; i < rows_; ++i) (*y)[i] += cb * row[i];
  }
}

double SimplexSolver::reducedCost(const std::vector<double>& cost,
                                  const std::vector<double>& y, int j) const {
  double d = cost[j];
  for (const auto& [i, v] : columns_[j].entries) d -= y[i] * v;
  return d;
}

bool SimplexSolver::refactor() {
  // Gauss-Jordan inversion of the basis matrix with partial pivoting.
  const int n = rows_;
  if (n == 0) return true;
  std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
  for (int r = 0; r < n; ++r)
    for (const auto& [i, v] : columns_[basis_[r]].entries)
      a[static_cast<size_t>(i) * n + r] = v;
  std::vector<double> inv(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) inv[static_cast<size_t>(i) * n + i] = 1.0;

  for (int col = 0; col < n; ++col) {
    int pivotRow = col;
    double best = std::fabs(a[static_cast<size_t>(col) * n + col]);
    for (int r = col + 1; r < n; ++r) {
      double cand = std::fabs(a[static_cast<size_t>(r) * n + col]);
      if (cand > best) {
        best = cand;
        pivotRow = r;
      }
    }
    if (best < 1e-12) {
      failure_ = "basis matrix is numerically singular";
      return false;
    }
    if (pivotRow != col) {
      for (int k = 0; k < n; ++k) {
        std::swap(a[static_cast<size_t>(pivotRow) * n + k],
                  a[static_cast<size_t>(col) * n + k]);
        std::swap(inv[static_cast<size_t>(pivotRow) * n + k],
                  inv[static_cast<size_t>(col) * n + k]);
      }
    }
    const double p = a[static_cast<size_t>(col) * n + col];
    double* arow = &a[static_cast<size_t>(col) * n];
    double* irow = &inv[static_cast<size_t>(col) * n];
    for (int k = 0; k < n; ++k) {
      arow[k] /= p;
      irow[k] /= p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      double f = a[static_cast<size_t>(r) * n + col];
      if (f == 0.0) continue;
      double* ar = &a[static_cast<size_t>(r) * n];
      double* ir = &inv[static_cast<size_t>(r) * n];
      for (int k = 0; k < n; ++k) {
        ar[k] -= f * arow[k];
        ir[k] -= f * irow[k];
      }
    }
  }
  binv_ = std::move(inv);
  for (int r = 0; r < n; ++r) {
    const double* row = &binv_[static_cast<size_t>(r) * n];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += row[i] * rhs_[i];
    basicValue_[r] = acc;
  }
  pivotsSinceRefactor_ = 0;
  return true;
}

SimplexSolver::StepResult SimplexSolver::step(const std::vector<double>& cost,
                                              bool allowArtificial) {
  double cScale = 1.0;
  for (int j = 0; j < cols_; ++j) cScale = std::max(cScale, std::fabs(cost[j]));
  const double dTol = opts_.optTol * cScale;

  std::vector<double> y;
  computeDuals(cost, &y);

  int entering = -1;
  double bestReduced = dTol;
  for (int j = 0; j < cols_; ++j) {
    if (basisPos_[j] >= 0) continue;
    if (!allowArtificial && j >= firstArtificial_) continue;
    double d = reducedCost(cost, y, j);
    if (d <= bestReduced) continue;
    if (blandMode_) {
      entering = j;  // first improving column wins under Bland's rule
      break;
    }
    bestReduced = d;
    entering = j;
  }
  if (entering < 0) return StepResult::kOptimal;

  std::vector<double> w(rows_);
  applyColumn(entering, &w);

  const double zeroValue = opts_.feasTol * bScale_;
  int leaving = -1;
  double theta = kInf;
  double leavingPivot = 0.0;
  bool leavingArtificial = false;
  for (int r = 0; r < rows_; ++r) {
    const bool artificialBasic = basis_[r] >= firstArtificial_;
    double ratio;
    double pivot = w[r];
    if (pivot > opts_.pivotTol) {
      ratio = basicValue_[r] / pivot;
      if (ratio < 0.0) ratio = 0.0;  // tolerance-level negative basics
    } else if (artificialBasic && pivot < -opts_.pivotTol &&
               basicValue_[r] <= zeroValue) {
      // An artificial pinned at zero may leave on a negative pivot: theta
      // stays 0, so feasibility is unaffected and the artificial is gone.
      ratio = 0.0;
    } else {
      continue;
    }
    bool better = false;
    if (ratio < theta - 1e-12) {
      better = true;
    } else if (ratio <= theta + 1e-12) {
      // Tie: prefer evicting artificials, then Bland's smallest variable id,
      // otherwise the largest pivot for stability.
      if (artificialBasic && !leavingArtificial) {
        better = true;
      } else if (artificialBasic == leavingArtificial) {
        better = blandMode_ ? basis_[r] < basis_[leaving]
                            : std::fabs(pivot) > std::fabs(leavingPivot);
      }
    }
    if (better) {
      leaving = r;
      theta = ratio;
      leavingPivot = pivot;
      leavingArtificial = artificialBasic;
    }
  }
  if (leaving < 0) return StepResult::kUnbounded;
  if (theta == kInf) theta = 0.0;

  // Pivot: update the inverse by the elementary row operations that map the
  // entering column to a unit vector.
  const double p = w[leaving];
  double* lrow = &binv_[static_cast<size_t>(leaving) * rows_];
  for (int k = 0; k < rows_; ++k) lrow[k] /= p;
  for (int r = 0; r < rows_; ++r) {
    if (r == leaving) continue;
    const double f = w[r];
    if (f == 0.0) continue;
    double* row = &binv_[static_cast<size_t>(r) * rows_];
    for (int k = 0; k < rows_; ++k) row[k] -= f * lrow[k];
    basicValue_[r] -= theta * f;
    if (basicValue_[r] < 0.0 && basicValue_[r] > -zeroValue) basicValue_[r] = 0.0;
  }
  basicValue_[leaving] = theta;

  basisPos_[basis_[leaving]] = -1;
  basis_[leaving] = entering;
  basisPos_[entering] = leaving;

  ++pivots_;
  ++pivotsSinceRefactor_;
  if (theta <= zeroValue) {
    if (++consecutiveDegenerate_ >= opts_.maxDegeneratePivots) blandMode_ = true;
  } else {
    consecutiveDegenerate_ = 0;
  }
  if (pivotsSinceRefactor_ >= opts_.refactorInterval) {
    if (!refactor()) return StepResult::kFailed;
  }
  return StepResult::kPivoted;
}

LpStatus SimplexSolver::iterate(const std::vector<double>& cost, bool allowArtificial) {
  for (long it = 0; it < maxIterations_; ++it) {
    switch (step(cost, allowArtificial)) {
      case StepResult::kPivoted:
        break;
      case StepResult::kOptimal:
        return LpStatus::kOptimal;
      case StepResult::kUnbounded:
        return LpStatus::kUnbounded;
      case StepResult::kFailed:
        return LpStatus::kNumericalFailure;
    }
  }
  failure_ = "iteration limit reached";
  return LpStatus::kNumericalFailure;
}

bool SimplexSolver::driveOutArtificials() {
  for (int r = 0; r < rows_; ++r) {
    if (basis_[r] < firstArtificial_) continue;
    // Degenerate pivot onto any usable non-artificial column; if the whole
    // row is zero the constraint is redundant and the artificial may stay
    // basic at value zero.
    std::vector<double> w(rows_);
    int target = -1;
    for (int j = 0; j < firstArtificial_ && target < 0; ++j) {
      if (basisPos_[j] >= 0) continue;
      const double* row = &binv_[static_cast<size_t>(r) * rows_];
      double acc = 0.0;
      for (const auto& [i, v] : columns_[j].entries) acc += row[i] * v;
      if (std::fabs(acc) > 1e-7) target = j;
    }
    if (target < 0) continue;
    applyColumn(target, &w);
    const double p = w[r];
    double* lrow = &binv_[static_cast<size_t>(r) * rows_];
    for (int k = 0; k < rows_; ++k) lrow[k] /= p;
    for (int rr = 0; rr < rows_; ++rr) {
      if (rr == r) continue;
      const double f = w[rr];
      if (f == 0.0) continue;
      double* row = &binv_[static_cast<size_t>(rr) * rows_];
      for (int k = 0; k < rows_; ++k) row[k] -= f * lrow[k];
    }
    basisPos_[basis_[r]] = -1;
    basis_[r] = target;
    basisPos_[target] = r;
    ++pivotsSinceRefactor_;
  }
  if (pivotsSinceRefactor_ > 0 && !refactor()) return false;
  return true;
}

bool SimplexSolver::verify(SimplexSolution* out) const {
  // Primal: every input row within feasTol at its own scale; x >= 0.
  for (double v : out->x)
    if (!(v >= -opts_.feasTol * 10)) return false;
  for (int i = 0; i < rows_; ++i) {
    const LpRow& row = lp_.rows[i];
    double lhs = 0.0;
    double scale = std::max(1.0, std::fabs(row.rhs));
    for (const auto& [var, coef] : row.coeffs) {
      lhs += coef * out->x[var];
      scale = std::max(scale, std::fabs(coef));
    }
    const double slack = row.rhs - lhs;
    const double tol = opts_.feasTol * scale * 10;
    if (row.rel == Relation::kLe && slack < -tol) return false;
    if (row.rel == Relation::kGe && slack > tol) return false;
    if (row.rel == Relation::kEq && std::fabs(slack) > tol) return false;
  }
  // Dual: no remaining improving direction among real columns.
  std::vector<double> cost(cols_, 0.0);
  for (int j = 0; j < structurals_; ++j) cost[j] = lp_.objective[j];
  double cScale = 1.0;
  for (int j = 0; j < cols_; ++j) cScale = std::max(cScale, std::fabs(cost[j]));
  std::vector<double> y;
  computeDuals(cost, &y);
  for (int j = 0; j < firstArtificial_; ++j) {
    if (basisPos_[j] >= 0) continue;
    if (reducedCost(cost, y, j) > opts_.optTol * cScale * 100) return false;
  }
  return true;
}

SimplexSolution SimplexSolver::run() {
  SimplexSolution out;
  buildColumns();

  // Phase one only when some row required an artificial seed.
  if (firstArtificial_ < cols_) {
    std::vector<double> cost(cols_, 0.0);
    for (int j = firstArtificial_; j < cols_; ++j) cost[j] = -1.0;
    LpStatus st = iterate(cost, true);
    if (st != LpStatus::kOptimal) {
      // The phase-one objective is bounded above by zero, so anything but
      // optimality here is a numerical breakdown.
      out.status = LpStatus::kNumericalFailure;
      out.message = failure_.empty() ? "phase one failed" : failure_;
      return out;
    }
    // Maximum of -(sum of artificials); feasible iff it reaches ~0.
    double artificialMass = 0.0;
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] >= firstArtificial_) artificialMass += basicValue_[r];
    if (artificialMass > opts_.feasTol * std::max(1.0, bScale_) * 100) {
      out.status = LpStatus::kInfeasible;
      out.iterations = pivots_;
      return out;
    }
    if (!driveOutArtificials()) {
      out.status = LpStatus::kNumericalFailure;
      out.message = failure_;
      return out;
    }
    consecutiveDegenerate_ = 0;
    blandMode_ = false;
  }

  std::vector<double> cost(cols_, 0.0);
  for (int j = 0; j < structurals_; ++j) cost[j] = lp_.objective[j];
  LpStatus st = iterate(cost, false);
  if (st != LpStatus::kOptimal) {
    out.status = st;
    out.message = failure_;
    out.iterations = pivots_;
    return out;
  }

  auto extract = [&] {
    out.x.assign(structurals_, 0.0);
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] < structurals_) out.x[basis_[r]] = basicValue_[r];
    out.objective = 0.0;
    for (int j = 0; j < structurals_; ++j) out.objective += lp_.objective[j] * out.x[j];
    std::vector<double> y;
    computeDuals(cost, &y);
    out.duals.assign(rows_, 0.0);
    for (int i = 0; i < rows_; ++i) out.duals[i] = rowSign_[i] * y[i];
  };
  extract();
  if (!verify(&out)) {
    // One clean rebuild of the inverse, then re-check before giving up.
    if (!refactor() || iterate(cost, false) != LpStatus::kOptimal) {
      out.status = LpStatus::kNumericalFailure;
      out.message = failure_.empty() ? "verification failed" : failure_;
      return out;
    }
    extract();
    if (!verify(&out)) {
      out.status = LpStatus::kNumericalFailure;
      out.message = "optimality certificate failed verification";
      return out;
    }
  }
  out.status = LpStatus::kOptimal;
  out.iterations = pivots_;
  return out;
}

}  // namespace

SimplexSolution solveSimplex(const LinearProgram& lp, const SimplexOptions& opts) {
  if (static_cast<int>(lp.variableNames.size()) != lp.numVariables() &&
      !lp.variableNames.empty())
    throw std::invalid_argument("solveSimplex: variableNames/objective size mismatch");
  SimplexSolver solver(lp, opts);
  return solver.run();
}

}  // namespace fairmatch
