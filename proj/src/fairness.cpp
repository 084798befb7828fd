#include "fairmatch/fairness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "fairmatch/rng.hpp"
#include "fairmatch/rounding.hpp"

namespace fairmatch {

namespace {

void requireBoundPair(double alpha, double beta) {
  if (!(alpha >= 0.0) || !(beta <= 1.0) || !(alpha <= beta))
    throw std::invalid_argument("fairness bounds must satisfy 0 <= alpha <= beta <= 1");
}

}  // namespace

FairnessSpec FairnessSpec::global(double alpha, double beta) {
  requireBoundPair(alpha, beta);
  FairnessSpec s;
  s.bounds_ = {{alpha, beta}};
  s.perColor_ = false;
  return s;
}

FairnessSpec FairnessSpec::perColor(std::vector<std::pair<double, double>> bounds) {
  if (bounds.empty())
    throw std::invalid_argument("per-color spec needs at least one bound pair");
  for (const auto& [a, b] : bounds) requireBoundPair(a, b);
  FairnessSpec s;
  s.bounds_ = std::move(bounds);
  s.perColor_ = true;
  return s;
}

bool FairnessSpec::anyPositiveAlpha() const {
  return std::any_of(bounds_.begin(), bounds_.end(),
                     [](const auto& p) { return p.first > 0.0; });
}

void FairnessSpec::requireCompatible(int numColors) const {
  if (perColor_ && static_cast<int>(bounds_.size()) != numColors)
    throw std::invalid_argument("per-color spec has " + std::to_string(bounds_.size()) +
                                " bounds but the graph has " + std::to_string(numColors) +
                                " colors");
}

FairnessReport checkDeltaFair(const Matching& m, const FairnessSpec& spec, double delta) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("checkDeltaFair: delta must be nonnegative");
  const int numColors = static_cast<int>(m.perColorCount.size());
  spec.requireCompatible(numColors);

  FairnessReport report;
  report.matchingSize = m.size();
  report.delta = delta;
  report.degenerate = m.empty();
  report.colors.reserve(numColors);
  for (int c = 0; c < numColors; ++c) {
    ColorFairness cf;
    cf.color = c;
    cf.count = m.perColorCount[c];
    cf.lowerTarget = (1.0 - delta) * spec.alpha(c);
    cf.upperTarget = (1.0 + delta) * spec.beta(c);
    if (!report.degenerate) {
      cf.share = static_cast<double>(cf.count) / m.size();
      cf.pass = cf.share >= cf.lowerTarget && cf.share <= cf.upperTarget;
      if (cf.share < spec.alpha(c)) {
        double factor = cf.share == 0.0 ? std::numeric_limits<double>::infinity()
                                        : spec.alpha(c) / cf.share;
        report.violationLower = std::max(report.violationLower, factor);
      }
      if (spec.beta(c) > 0.0 && cf.share > spec.beta(c)) {
        report.violationUpper = std::max(report.violationUpper, cf.share / spec.beta(c));
      }
    }
    report.pass = report.pass && cf.pass;
    report.colors.push_back(cf);
  }
  return report;
}

double failureBoundTwoSided(double delta, double colorMass) {
  if (!(delta >= 0.0) || !(colorMass >= 0.0))
    throw std::invalid_argument("failureBoundTwoSided: arguments must be nonnegative");
  return std::min(1.0, 4.0 * std::exp(-delta * delta * colorMass / 28.0));
}

std::vector<double> failureBoundTwoSided(const ColoredBipartiteGraph& g,
                                         const FractionalMatching& fm, double delta) {
  std::vector<double> out;
  for (double mass : colorMasses(g, fm)) out.push_back(failureBoundTwoSided(delta, mass));
  return out;
}

double failureBoundOneSided(double eps, double beta, double totalMass) {
  if (!(eps >= 0.0) || !(beta >= 0.0) || !(totalMass >= 0.0))
    throw std::invalid_argument("failureBoundOneSided: arguments must be nonnegative");
  return std::min(1.0, 2.0 * std::exp(-eps * eps * beta * totalMass / 28.0));
}

void attachFailureBounds(FairnessReport& report, const ColoredBipartiteGraph& g,
                         const FractionalMatching& fm) {
  report.failureBoundPerColor = failureBoundTwoSided(g, fm, report.delta);
}

ConcentrationStats empiricalConcentration(const ColoredBipartiteGraph& g,
                                          const FractionalMatching& fm, double delta,
                                          int trials, std::uint64_t baseSeed) {
  if (trials < 1) throw std::invalid_argument("empiricalConcentration: trials must be positive");
  const std::vector<double> mass = colorMasses(g, fm);
  const int numColors = g.numColors();
  std::vector<long> exceed(numColors, 0);
  for (int t = 0; t < trials; ++t) {
    Matching m = roundOcrs(g, fm, deriveSeed(baseSeed, t)).matching;
    for (int c = 0; c < numColors; ++c) {
      double deviation = std::fabs(m.perColorCount[c] - mass[c] / 2.0);
      if (deviation >= delta * mass[c] / 2.0) exceed[c] += 1;
    }
  }
  ConcentrationStats stats;
  stats.trials = trials;
  for (int c = 0; c < numColors; ++c) {
    stats.exceedFrequency.push_back(static_cast<double>(exceed[c]) / trials);
    stats.analyticBound.push_back(
        std::min(1.0, 2.0 * std::exp(-delta * delta * mass[c] / 28.0)));
  }
  return stats;
}

std::vector<std::string> checkColorBounds(const ColoredBipartiteGraph& g,
                                          const FractionalMatching& fm,
                                          const FairnessSpec& spec, double betaScale,
                                          double tol) {
  spec.requireCompatible(g.numColors());
  std::vector<std::string> out;
  const std::vector<double> mass = colorMasses(g, fm);
  const double total = totalMass(fm);
  const double scaledTol = tol * std::max(1.0, total);
  for (int c = 0; c < g.numColors(); ++c) {
    if (mass[c] < spec.alpha(c) * total - scaledTol)
      out.push_back("color " + std::to_string(c + 1) + " mass " + formatDouble(mass[c]) +
                    " below alpha share " + formatDouble(spec.alpha(c) * total));
    if (mass[c] > spec.beta(c) * betaScale * total + scaledTol)
      out.push_back("color " + std::to_string(c + 1) + " mass " + formatDouble(mass[c]) +
                    " above beta share " + formatDouble(spec.beta(c) * betaScale * total));
  }
  return out;
}

std::string FairnessReport::toJson() const {
  nlohmann::ordered_json j;
  j["matchingSize"] = matchingSize;
  j["delta"] = delta;
  j["degenerate"] = degenerate;
  j["pass"] = pass;
  auto arr = nlohmann::ordered_json::array();
  for (const ColorFairness& cf : colors) {
    nlohmann::ordered_json cj;
    cj["color"] = cf.color + 1;
    cj["count"] = cf.count;
    cj["share"] = cf.share;
    cj["lowerTarget"] = cf.lowerTarget;
    cj["upperTarget"] = cf.upperTarget;
    cj["pass"] = cf.pass;
    arr.push_back(std::move(cj));
  }
  j["colors"] = std::move(arr);
  // Non-finite ratios (a required color that ended up empty) serialize as null.
  j["violationLower"] = violationLower;
  j["violationUpper"] = violationUpper;
  if (!failureBoundPerColor.empty()) j["failureBoundPerColor"] = failureBoundPerColor;
  return j.dump();
}

}  // namespace fairmatch
