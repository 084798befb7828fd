#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fairmatch/graph.hpp"
#include "fairmatch/matching.hpp"

namespace fairmatch {

// Proportionality bounds: for every color c the matched share |M_c| / |M|
// must lie in [alpha_c, beta_c]. Either one global pair applying to every
// color or an explicit pair per color.
class FairnessSpec {
 public:
  static FairnessSpec global(double alpha, double beta);
  static FairnessSpec perColor(std::vector<std::pair<double, double>> bounds);

  bool isPerColor() const { return perColor_; }
  // Number of colors a per-color spec was built for; 0 for a global spec,
  // which is compatible with any graph.
  int boundCount() const { return perColor_ ? static_cast<int>(bounds_.size()) : 0; }
  double alpha(int color) const { return bounds_[perColor_ ? color : 0].first; }
  double beta(int color) const { return bounds_[perColor_ ? color : 0].second; }
  bool anyPositiveAlpha() const;
  bool allAlphaZero() const { return !anyPositiveAlpha(); }

  // Throws std::invalid_argument when a per-color spec does not have exactly
  // numColors entries.
  void requireCompatible(int numColors) const;

  // Perturbation parameter for the exact-beta pipeline, in (0, 1) when set.
  std::optional<double> epsilon;

 private:
  FairnessSpec() = default;
  std::vector<std::pair<double, double>> bounds_;
  bool perColor_ = false;
};

struct ColorFairness {
  int color = 0;        // 0-based
  int count = 0;        // matched edges of this color
  double share = 0.0;   // count / |M|; 0 when the matching is empty
  double lowerTarget = 0.0;  // (1 - delta) * alpha_c
  double upperTarget = 0.0;  // (1 + delta) * beta_c
  bool pass = true;
};

struct FairnessReport {
  int matchingSize = 0;
  double delta = 0.0;
  bool degenerate = false;  // empty matching: shares undefined, vacuous pass
  bool pass = true;
  std::vector<ColorFairness> colors;
  // How far the raw bounds are missed, ignoring delta: max_c alpha_c/share_c
  // over colors below their lower bound (1 when none, +inf when such a color
  // has share 0) and max_c share_c/beta_c over colors above their upper bound.
  double violationLower = 1.0;
  double violationUpper = 1.0;
  // Optional per-color failure bounds 4*exp(-delta^2 S_c / 28); filled by
  // attachFailureBounds when a fractional solution is available.
  std::vector<double> failureBoundPerColor;

  std::string toJson() const;
};

// Checks |M_c| / |M| against [(1-delta)*alpha_c, (1+delta)*beta_c] for every
// color. delta = 0 is the exact check. An empty matching is degenerate: it
// passes vacuously and no shares are computed.
FairnessReport checkDeltaFair(const Matching& m, const FairnessSpec& spec, double delta);

void attachFailureBounds(FairnessReport& report, const ColoredBipartiteGraph& g,
                         const FractionalMatching& fm);

// Probability bound for one color missing its delta-relaxed share window:
// min(1, 4*exp(-delta^2 * colorMass / 28)), where colorMass is the fractional
// mass S_c of the color. The constant 28 comes from the concentration
// analysis of the proposal rounding.
double failureBoundTwoSided(double delta, double colorMass);
std::vector<double> failureBoundTwoSided(const ColoredBipartiteGraph& g,
                                         const FractionalMatching& fm, double delta);

// One-sided variant for the exact-beta pipeline: min(1, 2*exp(-eps^2 * beta *
// totalMass / 28)) bounds the probability that any color exceeds beta when
// the fractional solution was computed against (1 - eps) * beta.
double failureBoundOneSided(double eps, double beta, double totalMass);

// Monte Carlo check of the per-color concentration |#matched_c - S_c/2| <
// delta * S_c/2. Runs `trials` roundings of (g, fm) and reports, per color,
// the frequency of deviations at least delta * S_c / 2 next to the analytic
// bound 2*exp(-delta^2 S_c / 28).
struct ConcentrationStats {
  std::vector<double> exceedFrequency;  // per color
  std::vector<double> analyticBound;    // per color, capped at 1
  int trials = 0;
};
ConcentrationStats empiricalConcentration(const ColoredBipartiteGraph& g,
                                          const FractionalMatching& fm, double delta,
                                          int trials, std::uint64_t baseSeed);

// Color-mass bounds of a fractional matching against a spec: for every color,
// alpha_c * total - tol * scale <= S_c <= beta_c * total + tol * scale with
// scale = max(1, total). betaScale multiplies every beta_c (used by the
// perturbed program); pass 1.0 for the plain check. Violations as data.
std::vector<std::string> checkColorBounds(const ColoredBipartiteGraph& g,
                                          const FractionalMatching& fm,
                                          const FairnessSpec& spec, double betaScale,
                                          double tol);

}  // namespace fairmatch
