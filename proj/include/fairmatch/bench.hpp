#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fairmatch/graph.hpp"

namespace fairmatch {

// One synthetic-experiment sweep. Every combination of the rule lists times
// `repetitions` is one instance cell; each cell emits one CSV row per
// requested algorithm. Defaults reproduce the full protocol (1440 instances).
struct ExperimentConfig {
  std::vector<int> nValues = {50, 250, 500, 1000};
  // Edge probability as a function of n. Known rules: "10/n", "0.5",
  // "log^2(n)/n" (natural log).
  std::vector<std::string> pRules = {"10/n", "0.5", "log^2(n)/n"};
  // Number of colors as a function of n. Known rules: "2", "3",
  // "ceil(log n)" (natural log).
  std::vector<std::string> ellRules = {"2", "3", "ceil(log n)"};
  // Proportionality bounds as a function of ell. Known rules:
  // "0.9/l-1.1/l", "0.75/l-1.25/l".
  std::vector<std::string> specRules = {"0.9/l-1.1/l", "0.75/l-1.25/l"};
  int repetitions = 10;
  // Which halves of the protocol to emit. Non-bipartite cells are part of the
  // instance grid but out of the library's scope; their rows carry status
  // "skipped-nonbipartite" and no metrics.
  std::vector<bool> bipartite = {true, false};
  std::vector<std::string> algorithms = {"proposal", "peeling", "vanillaLp"};
  WeightRange weights{1.0, 2.0};
  std::uint64_t seed = 1;
  int workers = 1;
  // Instances with more edge variables than this are not solved in-process;
  // their rows are marked "external-solver-required" unless a solution file
  // <instanceId>.fair.sol / <instanceId>.vanilla.sol exists in
  // externalSolutionsDir (lines of `variableName value`).
  int externalVarLimit = 20'000;
  std::string externalSolutionsDir;

  static ExperimentConfig fromJson(const std::string& text);
  static ExperimentConfig fromJsonFile(const std::string& path);
  std::string toJson() const;

  double resolveP(const std::string& rule, int n) const;
  int resolveEll(const std::string& rule, int n) const;
  // alpha, beta for a spec rule at a given color count.
  std::pair<double, double> resolveSpec(const std::string& rule, int ell) const;

  long instanceCount() const;
};

// Flat result record; written as one CSV line. Empty optionals serialize as
// empty fields.
struct MetricsRow {
  std::string instanceId;
  int n = 0;
  std::string pRule;
  int ell = 0;
  double alpha = 0.0;
  double beta = 0.0;
  bool bipartite = true;
  std::uint64_t seed = 0;
  std::string algorithm;
  double weight = 0.0;        // matching weight; LP objective for vanillaLp
  double vanillaLp = 0.0;     // unconstrained relaxation objective
  double pof = 0.0;           // vanillaLp / weight; empty CSV field when weight is 0
  double violLower = 0.0;     // max_c alpha_c / share_c (>= 1; inf possible)
  double violUpper = 0.0;     // max_c share_c / beta_c (>= 1)
  double runtimeMillis = 0.0;
  std::string status = "ok";  // "ok" or an error marker; non-ok rows leave
                              // the metric fields empty
  bool hasMetrics = false;
};

inline constexpr const char* kCsvSchemaComment = "# fairmatch-bench csv v1";
inline constexpr const char* kCsvHeader =
    "instance_id,n,p_rule,ell,alpha,beta,bipartite,seed,algorithm,weight,"
    "vanilla_lp,pof,viol_lower,viol_upper,runtime_ms,status";

std::string toCsvLine(const MetricsRow& row);

struct SweepStats {
  long rowsWritten = 0;
  long rowsSkippedResume = 0;
  long errorRows = 0;
};

// Runs the sweep, appending to outPath (CSV). Rows flush as soon as they are
// complete, in instance order regardless of worker count, so two runs of the
// same config produce identical files apart from the runtime_ms column. An
// existing file resumes: instances whose rows are all present are skipped,
// rows of half-written instances are dropped and recomputed.
SweepStats runSweep(const ExperimentConfig& config, const std::string& outPath);

// Objective of the unconstrained relaxation (the (0, 1) spec). Throws
// std::runtime_error when the solver fails.
double vanillaLpObjective(const ColoredBipartiteGraph& g);

// Groups a sweep CSV by the given columns (comma-separated names) and writes
// count, mean_* and std_* (sample standard deviation) for every numeric
// column. Rows with empty or non-finite values are left out of that column's
// aggregate; groups appear in first-seen order.
void summarize(std::istream& csv, const std::string& groupBy, std::ostream& out);
void summarizeFile(const std::string& csvPath, const std::string& groupBy,
                   const std::string& outPath);

}  // namespace fairmatch
