#include "fairmatch/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "fairmatch/baseline.hpp"
#include "fairmatch/fairness.hpp"
#include "fairmatch/lp.hpp"
#include "fairmatch/rng.hpp"
#include "fairmatch/rounding.hpp"

namespace fairmatch {

namespace {

bool parseDoubleFull(const std::string& s, double& out) {
  if (s.empty()) return false;
  try {
    size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

// "0.9/l" at ell = 3 -> 0.3; plain numbers pass through.
double resolveSpecSide(const std::string& side, int ell) {
  double value = 0.0;
  if (side.size() > 2 && side.compare(side.size() - 2, 2, "/l") == 0) {
    if (!parseDoubleFull(side.substr(0, side.size() - 2), value))
      throw std::invalid_argument("unknown spec rule component: " + side);
    return value / ell;
  }
  if (!parseDoubleFull(side, value))
    throw std::invalid_argument("unknown spec rule component: " + side);
  return value;
}

std::vector<std::string> splitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

std::string sanitizeStatus(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  if (s.size() > 120) s.resize(120);
  return s;
}

struct InstancePlan {
  long index = 0;
  std::string id;
  int n = 0;
  std::string pRule;
  double p = 0.0;
  int ell = 0;
  double alpha = 0.0;
  double beta = 0.0;
  bool bipartite = true;
  std::uint64_t seed = 0;
};

// Resolves every rule up front, so configuration errors surface before any
// work starts and instance seeds are fixed by enumeration position alone.
std::vector<InstancePlan> enumerateInstances(const ExperimentConfig& cfg) {
  if (cfg.repetitions < 1) throw std::invalid_argument("repetitions must be positive");
  if (cfg.nValues.empty() || cfg.pRules.empty() || cfg.ellRules.empty() ||
      cfg.specRules.empty() || cfg.bipartite.empty() || cfg.algorithms.empty())
    throw std::invalid_argument("every experiment dimension needs at least one entry");
  std::vector<InstancePlan> plans;
  plans.reserve(static_cast<size_t>(cfg.instanceCount()));
  long index = 0;
  for (int n : cfg.nValues) {
    for (size_t pi = 0; pi < cfg.pRules.size(); ++pi) {
      for (size_t ei = 0; ei < cfg.ellRules.size(); ++ei) {
        for (size_t si = 0; si < cfg.specRules.size(); ++si) {
          for (bool b : cfg.bipartite) {
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
              InstancePlan plan;
              plan.index = index;
              plan.n = n;
              plan.pRule = cfg.pRules[pi];
              plan.p = cfg.resolveP(plan.pRule, n);
              plan.ell = cfg.resolveEll(cfg.ellRules[ei], n);
              auto bounds = cfg.resolveSpec(cfg.specRules[si], plan.ell);
              plan.alpha = bounds.first;
              plan.beta = bounds.second;
              plan.bipartite = b;
              plan.seed = deriveSeed(cfg.seed, static_cast<std::uint64_t>(index));
              plan.id = "n" + std::to_string(n) + "-p" + std::to_string(pi) + "-e" +
                        std::to_string(ei) + "-s" + std::to_string(si) + "-b" +
                        (b ? "1" : "0") + "-r" + std::to_string(rep);
              plans.push_back(std::move(plan));
              ++index;
            }
          }
        }
      }
    }
  }
  return plans;
}

MetricsRow baseRow(const InstancePlan& plan, const std::string& algorithm) {
  MetricsRow row;
  row.instanceId = plan.id;
  row.n = plan.n;
  row.pRule = plan.pRule;
  row.ell = plan.ell;
  row.alpha = plan.alpha;
  row.beta = plan.beta;
  row.bipartite = plan.bipartite;
  row.seed = plan.seed;
  row.algorithm = algorithm;
  return row;
}

// max_c alpha/share and max_c share/beta over shares summing to 1; both clamp
// to 1 from below so 1.0 reads "within bounds". All-zero shares mean nothing
// was selected: the lower factor is infinite whenever some alpha is positive.
std::pair<double, double> shareViolations(const std::vector<double>& quantity, double total,
                                          double alpha, double beta) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  double lower = 1.0, upper = 1.0;
  if (total <= 0.0) {
    if (alpha > 0.0) lower = kInf;
    return {lower, upper};
  }
  for (double q : quantity) {
    const double share = q / total;
    if (share < alpha) lower = std::max(lower, share == 0.0 ? kInf : alpha / share);
    if (beta > 0.0 && share > beta) upper = std::max(upper, share / beta);
  }
  return {lower, upper};
}

double elapsedMs(std::chrono::steady_clock::time_point from) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - from)
      .count();
}

void fillMatchingMetrics(MetricsRow& row, const Matching& m, double vanillaObj, double alpha,
                         double beta) {
  row.weight = m.weight;
  row.vanillaLp = vanillaObj;
  row.pof = m.weight > 0.0 ? vanillaObj / m.weight
                           : std::numeric_limits<double>::infinity();
  std::vector<double> counts(m.perColorCount.begin(), m.perColorCount.end());
  auto v = shareViolations(counts, static_cast<double>(m.size()), alpha, beta);
  row.violLower = v.first;
  row.violUpper = v.second;
  row.hasMetrics = true;
}

std::vector<MetricsRow> computeInstance(const ExperimentConfig& cfg, const InstancePlan& plan) {
  std::vector<MetricsRow> rows;
  rows.reserve(cfg.algorithms.size());
  for (const std::string& alg : cfg.algorithms) rows.push_back(baseRow(plan, alg));

  auto markAll = [&](const std::string& status) {
    for (MetricsRow& row : rows) {
      row.status = status;
      row.hasMetrics = false;
    }
  };

  if (!plan.bipartite) {
    markAll("skipped-nonbipartite");
    return rows;
  }

  ColoredBipartiteGraph g = generateErdosRenyi(plan.n, plan.p, plan.ell, cfg.weights,
                                               /*bipartiteSplit=*/true, plan.seed);
  const FairnessSpec spec = FairnessSpec::global(plan.alpha, plan.beta);
  const FairnessSpec vanillaSpec = FairnessSpec::global(0.0, 1.0);

  FractionalMatching fairFrac, vanillaFrac;
  double fairMs = 0.0, vanillaMs = 0.0;
  const bool wantProposal =
      std::find(cfg.algorithms.begin(), cfg.algorithms.end(), "proposal") != cfg.algorithms.end();

  if (g.numEdges() > cfg.externalVarLimit) {
    if (cfg.externalSolutionsDir.empty()) {
      markAll("external-solver-required");
      return rows;
    }
    namespace fs = std::filesystem;
    const fs::path dir(cfg.externalSolutionsDir);
    const fs::path fairPath = dir / (plan.id + ".fair.sol");
    const fs::path vanillaPath = dir / (plan.id + ".vanilla.sol");
    if (!fs::exists(fairPath) || !fs::exists(vanillaPath)) {
      markAll("external-solver-required");
      return rows;
    }
    try {
      auto t0 = std::chrono::steady_clock::now();
      fairFrac = importSolutionFile(buildLpFair(g, spec), fairPath.string());
      fairMs = elapsedMs(t0);
      t0 = std::chrono::steady_clock::now();
      vanillaFrac = importSolutionFile(buildLpFair(g, vanillaSpec), vanillaPath.string());
      vanillaMs = elapsedMs(t0);
    } catch (const std::exception& ex) {
      markAll(sanitizeStatus(std::string("error:") + ex.what()));
      return rows;
    }
  } else {
    auto t0 = std::chrono::steady_clock::now();
    LpSolveResult vanilla = solve(buildLpFair(g, vanillaSpec));
    vanillaMs = elapsedMs(t0);
    if (vanilla.status != LpStatus::kOptimal) {
      markAll(sanitizeStatus(std::string("error:vanilla-lp-") + toString(vanilla.status)));
      return rows;
    }
    vanillaFrac = std::move(vanilla.fractional);
    if (wantProposal) {
      t0 = std::chrono::steady_clock::now();
      LpSolveResult fair = solve(buildLpFair(g, spec));
      fairMs = elapsedMs(t0);
      if (fair.status != LpStatus::kOptimal) {
        markAll(sanitizeStatus(std::string("error:fair-lp-") + toString(fair.status)));
        return rows;
      }
      fairFrac = std::move(fair.fractional);
    }
  }

  const double vanillaObj = vanillaFrac.objective;
  for (MetricsRow& row : rows) {
    try {
      if (row.algorithm == "proposal") {
        auto t0 = std::chrono::steady_clock::now();
        RoundingResult r = roundOcrs(g, fairFrac, deriveSeed(plan.seed, 101));
        // Reported as deployed: the rounded core made maximal within the
        // relaxation's support (weight only grows; the fair shares stay
        // anchored to the relaxation's color masses).
        Matching m = completeWithinSupport(g, fairFrac, r.matching);
        fillMatchingMetrics(row, m, vanillaObj, plan.alpha, plan.beta);
        row.runtimeMillis = fairMs + elapsedMs(t0);
      } else if (row.algorithm == "peeling") {
        auto t0 = std::chrono::steady_clock::now();
        Matching m = peelMatching(g, spec);
        fillMatchingMetrics(row, m, vanillaObj, plan.alpha, plan.beta);
        row.runtimeMillis = elapsedMs(t0);
      } else if (row.algorithm == "vanillaLp") {
        row.weight = vanillaObj;
        row.vanillaLp = vanillaObj;
        row.pof = 1.0;
        auto v = shareViolations(colorMasses(g, vanillaFrac), totalMass(vanillaFrac),
                                 plan.alpha, plan.beta);
        row.violLower = v.first;
        row.violUpper = v.second;
        row.runtimeMillis = vanillaMs;
        row.hasMetrics = true;
      } else {
        row.status = "error:unknown-algorithm";
        row.hasMetrics = false;
      }
    } catch (const std::exception& ex) {
      row.status = sanitizeStatus(std::string("error:") + ex.what());
      row.hasMetrics = false;
    }
  }
  return rows;
}

std::vector<MetricsRow> computeInstanceSafe(const ExperimentConfig& cfg,
                                            const InstancePlan& plan) {
  try {
    return computeInstance(cfg, plan);
  } catch (const std::exception& ex) {
    std::vector<MetricsRow> rows;
    for (const std::string& alg : cfg.algorithms) {
      MetricsRow row = baseRow(plan, alg);
      row.status = sanitizeStatus(std::string("error:") + ex.what());
      rows.push_back(std::move(row));
    }
    return rows;
  }
}

}  // namespace

double ExperimentConfig::resolveP(const std::string& rule, int n) const {
  if (n < 1) throw std::invalid_argument("resolveP: n must be positive");
  double value = 0.0;
  if (rule == "10/n") {
    value = 10.0 / n;
  } else if (rule == "log^2(n)/n") {
    const double ln = std::log(static_cast<double>(n));
    value = ln * ln / n;
  } else if (!parseDoubleFull(rule, value)) {
    throw std::invalid_argument("unknown edge-probability rule: " + rule);
  }
  return std::clamp(value, 0.0, 1.0);
}

int ExperimentConfig::resolveEll(const std::string& rule, int n) const {
  if (n < 1) throw std::invalid_argument("resolveEll: n must be positive");
  double value = 0.0;
  if (rule == "ceil(log n)") {
    value = std::ceil(std::log(static_cast<double>(n)));
  } else if (!parseDoubleFull(rule, value)) {
    throw std::invalid_argument("unknown color-count rule: " + rule);
  }
  const int ell = static_cast<int>(std::lround(value));
  if (ell < 1 || std::abs(value - ell) > 1e-9)
    throw std::invalid_argument("color-count rule must yield a positive integer: " + rule);
  return ell;
}

std::pair<double, double> ExperimentConfig::resolveSpec(const std::string& rule, int ell) const {
  if (ell < 1) throw std::invalid_argument("resolveSpec: ell must be positive");
  const size_t dash = rule.find('-');
  if (dash == std::string::npos)
    throw std::invalid_argument("spec rule must look like \"0.9/l-1.1/l\": " + rule);
  double alpha = resolveSpecSide(rule.substr(0, dash), ell);
  double beta = resolveSpecSide(rule.substr(dash + 1), ell);
  alpha = std::max(0.0, alpha);
  beta = std::min(1.0, beta);
  if (!(alpha <= beta))
    throw std::invalid_argument("spec rule yields alpha > beta: " + rule);
  return {alpha, beta};
}

long ExperimentConfig::instanceCount() const {
  return static_cast<long>(nValues.size()) * static_cast<long>(pRules.size()) *
         static_cast<long>(ellRules.size()) * static_cast<long>(specRules.size()) *
         static_cast<long>(bipartite.size()) * repetitions;
}

ExperimentConfig ExperimentConfig::fromJson(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  ExperimentConfig cfg;
  cfg.nValues = j.value("nValues", cfg.nValues);
  cfg.pRules = j.value("pRules", cfg.pRules);
  cfg.ellRules = j.value("ellRules", cfg.ellRules);
  cfg.specRules = j.value("specRules", cfg.specRules);
  cfg.repetitions = j.value("repetitions", cfg.repetitions);
  if (j.contains("bipartite")) cfg.bipartite = j.at("bipartite").get<std::vector<bool>>();
  cfg.algorithms = j.value("algorithms", cfg.algorithms);
  if (j.contains("weights")) {
    cfg.weights.lo = j.at("weights").value("lo", cfg.weights.lo);
    cfg.weights.hi = j.at("weights").value("hi", cfg.weights.hi);
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.workers = j.value("workers", cfg.workers);
  cfg.externalVarLimit = j.value("externalVarLimit", cfg.externalVarLimit);
  cfg.externalSolutionsDir = j.value("externalSolutionsDir", cfg.externalSolutionsDir);
  return cfg;
}

ExperimentConfig ExperimentConfig::fromJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return fromJson(buffer.str());
}

std::string ExperimentConfig::toJson() const {
  nlohmann::ordered_json j;
  j["nValues"] = nValues;
  j["pRules"] = pRules;
  j["ellRules"] = ellRules;
  j["specRules"] = specRules;
  j["repetitions"] = repetitions;
  j["bipartite"] = bipartite;
  j["algorithms"] = algorithms;
  j["weights"] = {{"lo", weights.lo}, {"hi", weights.hi}};
  j["seed"] = seed;
  j["workers"] = workers;
  j["externalVarLimit"] = externalVarLimit;
  j["externalSolutionsDir"] = externalSolutionsDir;
  return j.dump(2);
}

std::string toCsvLine(const MetricsRow& row) {
  std::ostringstream out;
  out << row.instanceId << ',' << row.n << ',' << row.pRule << ',' << row.ell << ','
      << formatDouble(row.alpha) << ',' << formatDouble(row.beta) << ','
      << (row.bipartite ? '1' : '0') << ',' << row.seed << ',' << row.algorithm << ',';
  if (row.hasMetrics) {
    out << formatDouble(row.weight) << ',' << formatDouble(row.vanillaLp) << ',';
    // A zero-weight matching has no meaningful price ratio: empty field.
    if (row.weight > 0.0) out << formatDouble(row.pof);
    out << ',' << formatDouble(row.violLower) << ',' << formatDouble(row.violUpper) << ','
        << formatDouble(row.runtimeMillis);
  } else {
    out << ",,,,,";
  }
  out << ',' << row.status;
  return out.str();
}

double vanillaLpObjective(const ColoredBipartiteGraph& g) {
  LpSolveResult r = solve(buildLpFair(g, FairnessSpec::global(0.0, 1.0)));
  if (r.status != LpStatus::kOptimal)
    throw std::runtime_error(std::string("unconstrained relaxation failed: ") +
                             toString(r.status) +
                             (r.message.empty() ? "" : " (" + r.message + ")"));
  return r.fractional.objective;
}

SweepStats runSweep(const ExperimentConfig& config, const std::string& outPath) {
  const std::vector<InstancePlan> plans = enumerateInstances(config);
  const size_t perInstance = config.algorithms.size();
  SweepStats stats;

  // Resume: keep the longest prefix of instances whose rows are all present
  // and intact; everything after it is recomputed.
  std::vector<std::string> keptLines;
  {
    std::ifstream in(outPath, std::ios::binary);
    if (in) {
      std::ostringstream buffer;
      buffer << in.rdbuf();
      std::string content = buffer.str();
      std::vector<std::string> lines;
      size_t start = 0;
      while (start < content.size()) {
        size_t nl = content.find('\n', start);
        if (nl == std::string::npos) break;  // unterminated tail: dropped
        lines.push_back(content.substr(start, nl - start));
        start = nl + 1;
      }
      if (lines.size() >= 2 && lines[0] == kCsvSchemaComment && lines[1] == kCsvHeader) {
        size_t lineIdx = 2;
        for (const InstancePlan& plan : plans) {
          if (lineIdx + perInstance > lines.size()) break;
          bool complete = true;
          for (size_t a = 0; a < perInstance && complete; ++a) {
            const std::vector<std::string> fields = splitCsv(lines[lineIdx + a]);
            complete = fields.size() == 16 && fields[0] == plan.id &&
                       fields[8] == config.algorithms[a];
          }
          if (!complete) break;
          for (size_t a = 0; a < perInstance; ++a) keptLines.push_back(lines[lineIdx + a]);
          lineIdx += perInstance;
        }
      }
    }
  }
  const long resumedInstances = static_cast<long>(keptLines.size() / perInstance);
  stats.rowsSkippedResume = static_cast<long>(keptLines.size());

  std::ofstream out(outPath, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + outPath);
  out << kCsvSchemaComment << '\n' << kCsvHeader << '\n';
  for (const std::string& line : keptLines) out << line << '\n';
  out.flush();

  const long total = static_cast<long>(plans.size());
  const int workers = std::max(1, config.workers);

  std::mutex mu;
  std::condition_variable cv;
  std::map<long, std::vector<MetricsRow>> done;
  std::atomic<long> next{resumedInstances};

  auto work = [&]() {
    while (true) {
      const long idx = next.fetch_add(1);
      if (idx >= total) break;
      std::vector<MetricsRow> rows = computeInstanceSafe(config, plans[idx]);
      {
        std::lock_guard<std::mutex> lock(mu);
        done.emplace(idx, std::move(rows));
      }
      cv.notify_all();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);

  // Rows leave the buffer strictly in instance order, so the file layout is
  // independent of the worker count.
  for (long k = resumedInstances; k < total; ++k) {
    std::vector<MetricsRow> rows;
    {
      std::unique_lock<std::mutex> lock(mu);
      cv.wait(lock, [&] { return done.count(k) > 0; });
      rows = std::move(done.at(k));
      done.erase(k);
    }
    for (const MetricsRow& row : rows) {
      out << toCsvLine(row) << '\n';
      stats.rowsWritten += 1;
      if (row.status.rfind("error", 0) == 0) stats.errorRows += 1;
    }
    out.flush();
  }
  for (std::thread& t : pool) t.join();
  return stats;
}

void summarize(std::istream& csv, const std::string& groupBy, std::ostream& out) {
  std::string line;
  std::vector<std::string> header;
  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    header = splitCsv(line);
    break;
  }
  if (header.empty()) throw std::runtime_error("summarize: no header row found");

  std::vector<int> groupCols;
  {
    std::istringstream names(groupBy);
    std::string name;
    while (std::getline(names, name, ',')) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end())
        throw std::invalid_argument("summarize: unknown group column: " + name);
      groupCols.push_back(static_cast<int>(it - header.begin()));
    }
  }
  if (groupCols.empty()) throw std::invalid_argument("summarize: no group columns given");

  std::vector<int> valueCols;
  for (int c = 0; c < static_cast<int>(header.size()); ++c)
    if (std::find(groupCols.begin(), groupCols.end(), c) == groupCols.end())
      valueCols.push_back(c);

  struct Accumulator {
    long count = 0;
    double sum = 0.0, sumSq = 0.0;
  };
  struct Group {
    std::vector<std::string> key;
    long rows = 0;
    std::vector<Accumulator> acc;
  };
  std::vector<Group> groups;
  std::map<std::vector<std::string>, size_t> groupIndex;
  std::vector<char> columnNumeric(valueCols.size(), 0);

  while (std::getline(csv, line)) {
    if (line.empty() || line[0] == '#') continue;
    const std::vector<std::string> fields = splitCsv(line);
    if (fields.size() != header.size()) continue;  // partial line: not aggregatable
    std::vector<std::string> key;
    key.reserve(groupCols.size());
    for (int c : groupCols) key.push_back(fields[c]);
    auto found = groupIndex.find(key);
    size_t gi;
    if (found == groupIndex.end()) {
      gi = groups.size();
      groupIndex.emplace(key, gi);
      groups.push_back(Group{key, 0, std::vector<Accumulator>(valueCols.size())});
    } else {
      gi = found->second;
    }
    Group& group = groups[gi];
    group.rows += 1;
    for (size_t vi = 0; vi < valueCols.size(); ++vi) {
      double value = 0.0;
      if (!parseDoubleFull(fields[valueCols[vi]], value) || !std::isfinite(value)) continue;
      columnNumeric[vi] = 1;
      group.acc[vi].count += 1;
      group.acc[vi].sum += value;
      group.acc[vi].sumSq += value * value;
    }
  }

  std::istringstream names(groupBy);
  std::string name;
  bool first = true;
  while (std::getline(names, name, ',')) {
    out << (first ? "" : ",") << name;
    first = false;
  }
  out << ",count";
  for (size_t vi = 0; vi < valueCols.size(); ++vi)
    if (columnNumeric[vi])
      out << ",mean_" << header[valueCols[vi]] << ",std_" << header[valueCols[vi]];
  out << '\n';

  for (const Group& group : groups) {
    for (size_t k = 0; k < group.key.size(); ++k) out << (k ? "," : "") << group.key[k];
    out << ',' << group.rows;
    for (size_t vi = 0; vi < valueCols.size(); ++vi) {
      if (!columnNumeric[vi]) continue;
      const Accumulator& a = group.acc[vi];
      if (a.count == 0) {
        out << ",,";
        continue;
      }
      const double mean = a.sum / a.count;
      double sd = 0.0;
      if (a.count > 1) {
        const double var =
            std::max(0.0, (a.sumSq - a.count * mean * mean) / (a.count - 1.0));
        sd = std::sqrt(var);
      }
      out << ',' << formatDouble(mean) << ',' << formatDouble(sd);
    }
    out << '\n';
  }
}

void summarizeFile(const std::string& csvPath, const std::string& groupBy,
                   const std::string& outPath) {
  std::ifstream in(csvPath, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open csv file: " + csvPath);
  std::ofstream out(outPath, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + outPath);
  summarize(in, groupBy, out);
}

}  // namespace fairmatch
