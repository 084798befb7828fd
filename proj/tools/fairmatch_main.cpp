#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairmatch/baseline.hpp"
#include "fairmatch/bench.hpp"
#include "fairmatch/exact.hpp"
#include "fairmatch/fairness.hpp"
#include "fairmatch/graph.hpp"
#include "fairmatch/lp.hpp"
#include "fairmatch/rounding.hpp"

namespace {

using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitNoResult = 1;   // infeasible / no balanced matching / check failed
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

// Input-level problems (missing files, malformed content) map to the usage
// exit code; anything escaping as a plain std::exception maps to internal.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fairmatch::ColoredBipartiteGraph loadGraph(const std::string& path) {
  try {
    if (path == "-") return fairmatch::readGraph(std::cin);
    return fairmatch::readGraphFile(path);
  } catch (const std::exception& ex) {
    throw UsageError(std::string("cannot read graph: ") + ex.what());
  }
}

std::vector<double> parseDoubleList(const std::string& text, const char* what) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " entry: " + item);
    }
  }
  return values;
}

struct SpecOptions {
  double alpha = 0.0;
  double beta = 1.0;
  std::string alphaPer;
  std::string betaPer;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "Global lower share bound (default 0)");
    cmd->add_option("--beta", beta, "Global upper share bound (default 1)");
    cmd->add_option("--alpha-per", alphaPer,
                    "Comma-separated per-color lower bounds (overrides --alpha)");
    cmd->add_option("--beta-per", betaPer,
                    "Comma-separated per-color upper bounds (overrides --beta)");
  }

  fairmatch::FairnessSpec build(int numColors) const {
    if (alphaPer.empty() && betaPer.empty())
      return fairmatch::FairnessSpec::global(alpha, beta);
    std::vector<double> lows =
        alphaPer.empty() ? std::vector<double>(numColors, 0.0)
                         : parseDoubleList(alphaPer, "--alpha-per");
    std::vector<double> highs =
        betaPer.empty() ? std::vector<double>(numColors, 1.0)
                        : parseDoubleList(betaPer, "--beta-per");
    if (static_cast<int>(lows.size()) != numColors ||
        static_cast<int>(highs.size()) != numColors)
      throw UsageError("per-color bound lists must have one entry per color (" +
                       std::to_string(numColors) + ")");
    std::vector<std::pair<double, double>> bounds;
    bounds.reserve(lows.size());
    for (size_t i = 0; i < lows.size(); ++i) bounds.emplace_back(lows[i], highs[i]);
    return fairmatch::FairnessSpec::perColor(std::move(bounds));
  }
};

void writeOut(const std::string& path, const std::string& content) {
  if (path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw UsageError("cannot open output file: " + path);
  out << content;
}

ordered_json graphJson(const fairmatch::ColoredBipartiteGraph& g) {
  ordered_json j;
  j["nU"] = g.nU();
  j["nV"] = g.nV();
  j["numColors"] = g.numColors();
  j["numEdges"] = g.numEdges();
  return j;
}

ordered_json matchingJson(const fairmatch::ColoredBipartiteGraph& g,
                          const fairmatch::Matching& m) {
  ordered_json j;
  j["size"] = m.size();
  j["weight"] = m.weight;
  j["perColorCount"] = m.perColorCount;
  auto edges = ordered_json::array();
  for (int e : m.edges) {
    const fairmatch::Edge& edge = g.edge(e);
    ordered_json ej;
    ej["edge"] = e;
    ej["u"] = edge.u;
    ej["v"] = edge.v;
    ej["weight"] = edge.weight;
    ej["color"] = edge.color + 1;
    edges.push_back(std::move(ej));
  }
  j["edges"] = std::move(edges);
  return j;
}

std::string matchingLines(const fairmatch::ColoredBipartiteGraph& g,
                          const fairmatch::Matching& m) {
  std::ostringstream out;
  for (int e : m.edges) out << g.edge(e).u << ' ' << g.edge(e).v << '\n';
  return out.str();
}

ordered_json lpJson(fairmatch::LpStatus status, double objective, long iterations) {
  ordered_json j;
  j["status"] = fairmatch::toString(status);
  j["objective"] = objective;
  j["iterations"] = iterations;
  return j;
}

// ---------------------------------------------------------------- gen ----

struct GenArgs {
  std::string kind = "er";
  int n = 0;
  double p = 0.5;
  int colors = 2;
  double wlo = 1.0, whi = 2.0;
  double eps = 0.5;
  std::uint64_t seed = 1;
  std::string output = "-";
  bool json = false;
};

int runGen(const GenArgs& a) {
  fairmatch::ColoredBipartiteGraph g(0, 0, 1, {});
  if (a.kind == "er") {
    g = fairmatch::generateErdosRenyi(a.n, a.p, a.colors, {a.wlo, a.whi},
                                      /*bipartiteSplit=*/true, a.seed);
  } else if (a.kind == "star") {
    g = fairmatch::generateStarFixture(a.n, a.eps).graph;
  } else {
    throw UsageError("unknown --kind: " + a.kind + " (expected er|star)");
  }
  if (a.json) {
    writeOut(a.output, fairmatch::writeGraphJson(g) + "\n");
  } else {
    std::ostringstream out;
    fairmatch::writeGraph(g, out);
    writeOut(a.output, out.str());
  }
  return kExitOk;
}

// -------------------------------------------------------------- solve ----

struct SolveArgs {
  std::string graphPath;
  std::string mode = "two-sided";
  SpecOptions spec;
  double delta = 0.0;
  double eps = 0.1;
  bool epsGiven = false;
  std::uint64_t seed = 1;
  int attempts = 20;
  std::string order;
  std::string matchingOut;
  std::string traceOut;
  double dispatchThreshold = 100.0;
  bool noDispatch = false;
  long workLimit = 10'000'000;
  std::optional<int> sizeCap;
};

std::vector<int> parseOrder(const std::string& text) {
  std::vector<int> order;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      size_t pos = 0;
      order.push_back(std::stoi(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("cannot parse --order entry: " + item);
    }
  }
  return order;
}

int emitSolveResult(const fairmatch::ColoredBipartiteGraph& g, const SolveArgs& a,
                    ordered_json& j, const fairmatch::Matching& m,
                    const fairmatch::FairnessSpec& spec) {
  fairmatch::FairnessReport report = fairmatch::checkDeltaFair(m, spec, a.delta);
  j["matching"] = matchingJson(g, m);
  j["fairness"] = ordered_json::parse(report.toJson());
  if (!a.matchingOut.empty()) writeOut(a.matchingOut, matchingLines(g, m));
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

int runSolve(const SolveArgs& a) {
  const fairmatch::ColoredBipartiteGraph g = loadGraph(a.graphPath);
  fairmatch::FairnessSpec spec = a.spec.build(g.numColors());
  spec.requireCompatible(g.numColors());
  if (a.epsGiven) spec.epsilon = a.eps;

  ordered_json j;
  j["mode"] = a.mode;
  j["graph"] = graphJson(g);

  if (a.mode == "two-sided") {
    // With positive lower bounds the relaxation is used as-is; in the
    // upper-bounds-only regime the betas are pre-shrunk by (1 - eps) so the
    // rounded matching concentrates strictly inside them.
    std::optional<double> perturb;
    if (spec.allAlphaZero()) perturb = spec.epsilon.value_or(0.1);
    if (perturb) j["betaPerturbation"] = *perturb;
    fairmatch::LpSolveResult lp = fairmatch::solve(fairmatch::buildLpFair(g, spec, perturb));
    j["lp"] = lpJson(lp.status, lp.fractional.objective, lp.iterations);
    if (lp.status != fairmatch::LpStatus::kOptimal) {
      std::cout << j.dump(2) << "\n";
      return lp.status == fairmatch::LpStatus::kNumericalFailure ? kExitInternal
                                                                 : kExitNoResult;
    }
    std::vector<int> order;
    fairmatch::RoundingResult rounded =
        a.order.empty()
            ? fairmatch::roundOcrs(g, lp.fractional, a.seed)
            : (order = parseOrder(a.order),
               fairmatch::roundOcrs(g, lp.fractional, &order, a.seed));
    if (!a.traceOut.empty()) writeOut(a.traceOut, rounded.trace.toJsonLines());
    fairmatch::FairnessReport report =
        fairmatch::checkDeltaFair(rounded.matching, spec, a.delta);
    fairmatch::attachFailureBounds(report, g, lp.fractional);
    j["matching"] = matchingJson(g, rounded.matching);
    j["fairness"] = ordered_json::parse(report.toJson());
    if (!a.matchingOut.empty()) writeOut(a.matchingOut, matchingLines(g, rounded.matching));
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }

  if (a.mode == "exact-beta") {
    fairmatch::ExactBetaOptions opts;
    opts.maxAttempts = a.attempts;
    opts.dispatchThreshold = a.dispatchThreshold;
    opts.enableBruteForceDispatch = !a.noDispatch;
    opts.bruteForceWorkLimit = a.workLimit;
    const double eps = spec.epsilon.value_or(a.eps);
    fairmatch::ExactModeResult result = fairmatch::solveExactBeta(g, spec, eps, a.seed, opts);
    j["eps"] = eps;
    j["lp"] = lpJson(result.lpStatus, result.lpObjective, 0);
    j["lp"].erase("iterations");
    j["satisfiedBeta"] = result.satisfiedBeta;
    j["attempts"] = result.attempts;
    j["usedBruteForce"] = result.usedBruteForce;
    if (!spec.isPerColor())
      j["betaExcessBound"] =
          fairmatch::failureBoundOneSided(eps, spec.beta(0), result.lpTotalMass);
    fairmatch::FairnessReport report =
        fairmatch::checkDeltaFair(result.matching, spec, a.delta);
    j["matching"] = matchingJson(g, result.matching);
    j["fairness"] = ordered_json::parse(report.toJson());
    if (!a.matchingOut.empty())
      writeOut(a.matchingOut, matchingLines(g, result.matching));
    std::cout << j.dump(2) << "\n";
    if (result.lpStatus == fairmatch::LpStatus::kNumericalFailure) return kExitInternal;
    return result.satisfiedBeta ? kExitOk : kExitNoResult;
  }

  if (a.mode == "brute") {
    fairmatch::BruteForceOptions opts;
    opts.workLimit = a.workLimit;
    opts.sizeCap = a.sizeCap;
    std::optional<fairmatch::Matching> best;
    try {
      best = fairmatch::bruteForceOpt(g, spec, opts);
    } catch (const fairmatch::WorkLimitExceeded& ex) {
      j["status"] = "work-limit-exceeded";
      j["message"] = ex.what();
      std::cout << j.dump(2) << "\n";
      return kExitInternal;
    }
    j["balancedMatchingExists"] = best.has_value();
    if (!best) {
      std::cout << j.dump(2) << "\n";
      return kExitNoResult;
    }
    return emitSolveResult(g, a, j, *best, spec);
  }

  if (a.mode == "peel") {
    fairmatch::Matching m = fairmatch::peelMatching(g, spec);
    const int code = (m.empty() && g.numEdges() > 0) ? kExitNoResult : kExitOk;
    const int emitted = emitSolveResult(g, a, j, m, spec);
    return emitted == kExitOk ? code : emitted;
  }

  throw UsageError("unknown --mode: " + a.mode +
                   " (expected two-sided|exact-beta|brute|peel)");
}

// ---------------------------------------------------------- lp-export ----

struct LpExportArgs {
  std::string graphPath;
  SpecOptions spec;
  double perturbEps = 0.0;
  bool perturbGiven = false;
  std::string output = "-";
};

int runLpExport(const LpExportArgs& a) {
  const fairmatch::ColoredBipartiteGraph g = loadGraph(a.graphPath);
  const fairmatch::FairnessSpec spec = a.spec.build(g.numColors());
  std::optional<double> perturb;
  if (a.perturbGiven) perturb = a.perturbEps;
  std::ostringstream out;
  fairmatch::exportLp(fairmatch::buildLpFair(g, spec, perturb), out);
  writeOut(a.output, out.str());
  return kExitOk;
}

// ------------------------------------------------------------- verify ----

struct VerifyArgs {
  std::string graphPath;
  std::string matchingPath;
  SpecOptions spec;
  double delta = 0.0;
};

int runVerify(const VerifyArgs& a) {
  const fairmatch::ColoredBipartiteGraph g = loadGraph(a.graphPath);
  const fairmatch::FairnessSpec spec = a.spec.build(g.numColors());
  spec.requireCompatible(g.numColors());

  std::ifstream in(a.matchingPath);
  if (!in) throw UsageError("cannot open matching file: " + a.matchingPath);
  std::map<std::pair<int, int>, int> edgeOf;
  for (int e = 0; e < g.numEdges(); ++e)
    edgeOf[{g.edge(e).u, g.edge(e).v}] = e;
  std::vector<int> edges;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    int u = 0, v = 0;
    if (!(fields >> u >> v))
      throw UsageError("matching line " + std::to_string(lineNo) + " is not \"u v\"");
    auto it = edgeOf.find({u, v});
    if (it == edgeOf.end())
      throw UsageError("matching line " + std::to_string(lineNo) + ": no edge (" +
                       std::to_string(u) + ", " + std::to_string(v) + ") in the graph");
    edges.push_back(it->second);
  }

  fairmatch::Matching m;
  try {
    m = fairmatch::buildMatching(g, std::move(edges));
  } catch (const std::invalid_argument& ex) {
    std::cout << "invalid matching: " << ex.what() << "\n";
    return kExitNoResult;
  }

  fairmatch::FairnessReport report = fairmatch::checkDeltaFair(m, spec, a.delta);
  std::printf("matching: size %d, weight %s\n", m.size(),
              fairmatch::formatDouble(m.weight).c_str());
  std::printf("%-6s %-6s %-12s %-12s %-12s %s\n", "color", "count", "share", "lower",
              "upper", "pass");
  for (const fairmatch::ColorFairness& cf : report.colors) {
    std::printf("%-6d %-6d %-12.6f %-12.6f %-12.6f %s\n", cf.color + 1, cf.count, cf.share,
                cf.lowerTarget, cf.upperTarget, cf.pass ? "yes" : "NO");
  }
  if (report.degenerate) std::printf("empty matching: shares undefined, vacuous pass\n");
  std::printf("%s\n", report.pass ? "PASS" : "FAIL");
  return report.pass ? kExitOk : kExitNoResult;
}

// -------------------------------------------------------------- bench ----

struct BenchArgs {
  std::string configPath;
  std::string output;
  int workers = 0;
  bool smoke = false;
};

int runBench(const BenchArgs& a) {
  fairmatch::ExperimentConfig cfg;
  if (!a.configPath.empty()) {
    try {
      cfg = fairmatch::ExperimentConfig::fromJsonFile(a.configPath);
    } catch (const std::exception& ex) {
      throw UsageError(std::string("cannot load config: ") + ex.what());
    }
  }
  if (a.smoke) {
    cfg.nValues = {20, 40};
    cfg.pRules = {"0.3"};
    cfg.repetitions = 2;
  }
  if (a.workers > 0) cfg.workers = a.workers;
  fairmatch::SweepStats stats = fairmatch::runSweep(cfg, a.output);
  ordered_json j;
  j["output"] = a.output;
  j["instances"] = cfg.instanceCount();
  j["rowsWritten"] = stats.rowsWritten;
  j["rowsSkippedResume"] = stats.rowsSkippedResume;
  j["errorRows"] = stats.errorRows;
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------- summarize ----

struct SummarizeArgs {
  std::string input;
  std::string groupBy = "n,algorithm";
  std::string output = "-";
};

int runSummarize(const SummarizeArgs& a) {
  std::ifstream in(a.input, std::ios::binary);
  if (!in) throw UsageError("cannot open csv file: " + a.input);
  std::ostringstream out;
  fairmatch::summarize(in, a.groupBy, out);
  writeOut(a.output, out.str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proportionally fair maximum-weight bipartite matching"};
  app.require_subcommand(1);

  GenArgs gen;
  CLI::App* genCmd = app.add_subcommand("gen", "Generate a synthetic instance");
  genCmd->add_option("--kind", gen.kind, "er|star (default er)");
  genCmd->add_option("--n", gen.n, "Vertices (er: total, split at random; star: light edges)")
      ->required();
  genCmd->add_option("--p", gen.p, "Edge probability (er)");
  genCmd->add_option("--colors", gen.colors, "Number of colors (er, default 2)");
  genCmd->add_option("--wlo", gen.wlo, "Weight range lower end (er, default 1)");
  genCmd->add_option("--whi", gen.whi, "Weight range upper end (er, default 2)");
  genCmd->add_option("--eps", gen.eps, "Star fixture heavy-edge gap (default 0.5)");
  genCmd->add_option("--seed", gen.seed, "Generator seed (default 1)");
  genCmd->add_option("-o,--output", gen.output, "Output path, - for stdout");
  genCmd->add_flag("--json", gen.json, "Emit the JSON graph format");

  SolveArgs solve;
  CLI::App* solveCmd = app.add_subcommand("solve", "Solve one instance");
  solveCmd->add_option("-g,--graph", solve.graphPath, "Graph file, - for stdin")->required();
  solveCmd->add_option("--mode", solve.mode, "two-sided|exact-beta|brute|peel");
  solve.spec.attach(solveCmd);
  solveCmd->add_option("--delta", solve.delta, "Share tolerance for the fairness report");
  CLI::Option* epsOpt =
      solveCmd->add_option("--eps", solve.eps, "Beta perturbation (default 0.1)");
  solveCmd->add_option("--seed", solve.seed, "Rounding seed (default 1)");
  solveCmd->add_option("--attempts", solve.attempts, "exact-beta rounding attempts");
  solveCmd->add_option("--order", solve.order, "Comma-separated right-vertex order");
  solveCmd->add_option("-o,--matching-out", solve.matchingOut, "Write matching as u-v lines");
  solveCmd->add_option("--trace-out", solve.traceOut, "Write the sampler trace (JSON lines)");
  solveCmd->add_option("--dispatch-threshold", solve.dispatchThreshold,
                       "exact-beta: enumerate when beta*mass is below this");
  solveCmd->add_flag("--no-dispatch", solve.noDispatch,
                     "exact-beta: never switch to enumeration");
  solveCmd->add_option("--work-limit", solve.workLimit, "Enumeration node budget");
  int sizeCapValue = -1;
  CLI::Option* sizeCapOpt =
      solveCmd->add_option("--size-cap", sizeCapValue, "brute: cap matching size");

  LpExportArgs lpExport;
  CLI::App* lpCmd = app.add_subcommand("lp-export", "Write the relaxation in LP text format");
  lpCmd->add_option("-g,--graph", lpExport.graphPath, "Graph file, - for stdin")->required();
  lpExport.spec.attach(lpCmd);
  CLI::Option* perturbOpt = lpCmd->add_option("--perturb-eps", lpExport.perturbEps,
                                              "Scale every beta by (1 - eps)");
  lpCmd->add_option("-o,--output", lpExport.output, "Output path, - for stdout");

  VerifyArgs verify;
  CLI::App* verifyCmd =
      app.add_subcommand("verify", "Check a matching file against share bounds");
  verifyCmd->add_option("-g,--graph", verify.graphPath, "Graph file, - for stdin")->required();
  verifyCmd->add_option("-m,--matching", verify.matchingPath, "Matching file (u v lines)")
      ->required();
  verify.spec.attach(verifyCmd);
  verifyCmd->add_option("--delta", verify.delta, "Share tolerance");

  BenchArgs bench;
  CLI::App* benchCmd = app.add_subcommand("bench", "Run the synthetic experiment sweep");
  benchCmd->add_option("-c,--config", bench.configPath, "Experiment config (JSON)");
  benchCmd->add_option("-o,--output", bench.output, "CSV output path")->required();
  benchCmd->add_option("--workers", bench.workers, "Override worker count");
  benchCmd->add_flag("--smoke", bench.smoke, "Shrink the grid for a quick end-to-end run");

  SummarizeArgs summarize;
  CLI::App* sumCmd = app.add_subcommand("summarize", "Aggregate a sweep CSV");
  sumCmd->add_option("-i,--input", summarize.input, "Sweep CSV path")->required();
  sumCmd->add_option("--group-by", summarize.groupBy, "Comma-separated group columns");
  sumCmd->add_option("-o,--output", summarize.output, "Output path, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    solve.epsGiven = epsOpt->count() > 0;
    if (sizeCapOpt->count() > 0) solve.sizeCap = sizeCapValue;
    lpExport.perturbGiven = perturbOpt->count() > 0;
    if (genCmd->parsed()) return runGen(gen);
    if (solveCmd->parsed()) return runSolve(solve);
    if (lpCmd->parsed()) return runLpExport(lpExport);
    if (verifyCmd->parsed()) return runVerify(verify);
    if (benchCmd->parsed()) return runBench(bench);
    if (sumCmd->parsed()) return runSummarize(summarize);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const UsageError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::cerr << "internal error: " << ex.what() << "\n";
    return kExitInternal;
  }
}
