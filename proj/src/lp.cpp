#include "fairmatch/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace fairmatch {

LinearProgram buildLpFair(const ColoredBipartiteGraph& g, const FairnessSpec& spec,
                          std::optional<double> betaPerturbation) {
  spec.requireCompatible(g.numColors());
  double betaScale = 1.0;
  if (betaPerturbation) {
    if (!(*betaPerturbation > 0.0 && *betaPerturbation < 1.0))
      throw std::invalid_argument("buildLpFair: perturbation eps must lie in (0, 1)");
    if (spec.anyPositiveAlpha())
      throw std::invalid_argument(
          "buildLpFair: beta perturbation requires a spec with all alpha = 0");
    betaScale = 1.0 - *betaPerturbation;
  }

  const int m = g.numEdges();
  LinearProgram lp;
  lp.objective.reserve(m);
  lp.variableNames.reserve(m);
  for (int e = 0; e < m; ++e) {
    lp.objective.push_back(g.edge(e).weight);
    lp.variableNames.push_back("e" + std::to_string(e));
  }

  // Unit-load row per vertex that has edges; left block first. Vertex i of
  // the right side is named v_{nU + i} so names identify vertices globally.
  for (int u = 0; u < g.nU(); ++u) {
    if (g.edgesOfU(u).empty()) continue;
    LpRow row;
    row.name = "v_" + std::to_string(u);
    for (int e : g.edgesOfU(u)) row.coeffs.push_back({e, 1.0});
    row.rel = Relation::kLe;
    row.rhs = 1.0;
    lp.rows.push_back(std::move(row));
  }
  for (int v = 0; v < g.nV(); ++v) {
    if (g.edgesOfV(v).empty()) continue;
    LpRow row;
    row.name = "v_" + std::to_string(g.nU() + v);
    for (int e : g.edgesOfV(v)) row.coeffs.push_back({e, 1.0});
    std::sort(row.coeffs.begin(), row.coeffs.end());
    row.rel = Relation::kLe;
    row.rhs = 1.0;
    lp.rows.push_back(std::move(row));
  }

  // Color-share rows, written against the total mass:
  //   alpha_c * sum_E x - sum_{E_c} x <= 0  and  sum_{E_c} x - beta_c * sum_E x <= 0.
  // A row that cannot bind (alpha_c = 0 / effective beta_c = 1) is omitted.
  for (int c = 0; c < g.numColors(); ++c) {
    const double alpha = spec.alpha(c);
    const double beta = spec.beta(c) * betaScale;
    if (alpha > 0.0) {
      LpRow row;
      row.name = "cLo_" + std::to_string(c + 1);
      for (int e = 0; e < m; ++e) {
        double coef = alpha - (g.edge(e).color == c ? 1.0 : 0.0);
        if (coef != 0.0) row.coeffs.push_back({e, coef});
      }
      row.rel = Relation::kLe;
      row.rhs = 0.0;
      lp.rows.push_back(std::move(row));
    }
    if (beta < 1.0) {
      LpRow row;
      row.name = "cHi_" + std::to_string(c + 1);
      for (int e = 0; e < m; ++e) {
        double coef = (g.edge(e).color == c ? 1.0 : 0.0) - beta;
        if (coef != 0.0) row.coeffs.push_back({e, coef});
      }
      row.rel = Relation::kLe;
      row.rhs = 0.0;
      lp.rows.push_back(std::move(row));
    }
  }
  return lp;
}

LpSolveResult solve(const LinearProgram& lp, const SimplexOptions& opts) {
  SimplexSolution s = solveSimplex(lp, opts);
  LpSolveResult out;
  out.status = s.status;
  out.duals = std::move(s.duals);
  out.iterations = s.iterations;
  out.message = std::move(s.message);
  if (s.status != LpStatus::kOptimal) return out;
  out.fractional.x = std::move(s.x);
  for (double& v : out.fractional.x) v = std::clamp(v, 0.0, 1.0);
  out.fractional.objective = 0.0;
  for (int j = 0; j < lp.numVariables(); ++j)
    out.fractional.objective += lp.objective[j] * out.fractional.x[j];
  return out;
}

namespace {

// One objective/constraint term, wrapping lines near the classic 255-char
// LP-format limit.
void appendTerm(std::ostream& out, int* lineLen, bool first, double coef,
                const std::string& name) {
  std::string term;
  if (first) {
    term = (coef < 0 ? "- " : "") + formatDouble(std::fabs(coef)) + " " + name;
  } else {
    term = (coef < 0 ? " - " : " + ") + formatDouble(std::fabs(coef)) + " " + name;
  }
  if (*lineLen + static_cast<int>(term.size()) > 220) {
    out << "\n   ";
    *lineLen = 3;
    if (!first && term[0] == ' ') term.erase(0, 1);
  }
  out << term;
  *lineLen += static_cast<int>(term.size());
}

}  // namespace

void exportLp(const LinearProgram& lp, std::ostream& out) {
  out << "Maximize\n obj:";
  int lineLen = 5;
  bool first = true;
  for (int j = 0; j < lp.numVariables(); ++j) {
    if (lp.objective[j] == 0.0) continue;
    out << (first ? " " : "");
    if (first) ++lineLen;
    appendTerm(out, &lineLen, first, lp.objective[j], lp.variableNames[j]);
    first = false;
  }
  out << "\nSubject To\n";
  for (const LpRow& row : lp.rows) {
    out << " " << row.name << ":";
    lineLen = static_cast<int>(row.name.size()) + 2;
    bool firstTerm = true;
    for (const auto& [var, coef] : row.coeffs) {
      if (coef == 0.0) continue;
      out << (firstTerm ? " " : "");
      if (firstTerm) ++lineLen;
      appendTerm(out, &lineLen, firstTerm, coef, lp.variableNames[var]);
      firstTerm = false;
    }
    if (firstTerm) out << " 0 " << (lp.variableNames.empty() ? "x0" : lp.variableNames[0]);
    const char* rel = row.rel == Relation::kLe ? "<=" : row.rel == Relation::kGe ? ">=" : "=";
    out << " " << rel << " " << formatDouble(row.rhs) << "\n";
  }
  out << "Bounds\n";
  for (const std::string& name : lp.variableNames) out << " 0 <= " << name << "\n";
  out << "End\n";
}

void exportLpFile(const LinearProgram& lp, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open LP output file: " + path);
  exportLp(lp, out);
  if (!out) throw std::runtime_error("failed writing LP file: " + path);
}

FractionalMatching importSolution(const LinearProgram& lp, std::istream& in,
                                  double feasTol) {
  std::unordered_map<std::string, int> byName;
  for (int j = 0; j < static_cast<int>(lp.variableNames.size()); ++j)
    byName[lp.variableNames[j]] = j;

  FractionalMatching fm;
  fm.x.assign(lp.numVariables(), 0.0);
  std::vector<char> seen(lp.numVariables(), 0);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    std::istringstream ls(line);
    std::string name;
    if (!(ls >> name)) continue;       // blank line
    if (name[0] == '#') continue;      // comment
    double value;
    if (!(ls >> value))
      throw std::runtime_error("solution line " + std::to_string(lineNo) +
                               ": expected `variableName value`");
    auto it = byName.find(name);
    if (it == byName.end())
      throw std::runtime_error("solution line " + std::to_string(lineNo) +
                               ": unknown variable '" + name + "'");
    if (seen[it->second])
      throw std::runtime_error("solution line " + std::to_string(lineNo) +
                               ": duplicate variable '" + name + "'");
    seen[it->second] = 1;
    fm.x[it->second] = value;
  }

  for (int j = 0; j < lp.numVariables(); ++j) {
    if (!(fm.x[j] >= -feasTol) || !(fm.x[j] <= 1.0 + feasTol) || !std::isfinite(fm.x[j]))
      throw std::runtime_error("imported value for " + lp.variableNames[j] +
                               " is outside [0, 1]: " + formatDouble(fm.x[j]));
  }
  for (const LpRow& row : lp.rows) {
    double lhs = 0.0;
    double scale = std::max(1.0, std::fabs(row.rhs));
    for (const auto& [var, coef] : row.coeffs) {
      lhs += coef * fm.x[var];
      scale = std::max(scale, std::fabs(coef));
    }
    const double slack = row.rhs - lhs;
    const double tol = feasTol * scale;
    const bool bad = (row.rel == Relation::kLe && slack < -tol) ||
                     (row.rel == Relation::kGe && slack > tol) ||
                     (row.rel == Relation::kEq && std::fabs(slack) > tol);
    if (bad)
      throw std::runtime_error("imported solution violates row '" + row.name +
                               "' by " + formatDouble(std::fabs(slack)));
  }

  for (double& v : fm.x) v = std::clamp(v, 0.0, 1.0);
  fm.objective = 0.0;
  for (int j = 0; j < lp.numVariables(); ++j) fm.objective += lp.objective[j] * fm.x[j];
  return fm;
}

FractionalMatching importSolutionFile(const LinearProgram& lp, const std::string& path,
                                      double feasTol) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open solution file: " + path);
  return importSolution(lp, in, feasTol);
}

}  // namespace fairmatch
