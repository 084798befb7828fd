#include "fairmatch/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <json.hpp>

#include "fairmatch/rng.hpp"

namespace fairmatch {

ColoredBipartiteGraph::ColoredBipartiteGraph(int nU, int nV, int numColors,
                                             std::vector<Edge> edges)
    : nU_(nU), nV_(nV), numColors_(numColors), edges_(std::move(edges)) {
  adjU_.assign(std::max(nU_, 0), {});
  adjV_.assign(std::max(nV_, 0), {});
  byColor_.assign(std::max(numColors_, 0), {});
  for (int e = 0; e < static_cast<int>(edges_.size()); ++e) {
    const Edge& ed = edges_[e];
    if (ed.u < 0 || ed.u >= nU_ || ed.v < 0 || ed.v >= nV_) continue;
    adjU_[ed.u].push_back(e);
    adjV_[ed.v].push_back(e);
    if (ed.color >= 0 && ed.color < numColors_) byColor_[ed.color].push_back(e);
  }
  // Sampling over a right vertex walks its edges in left-endpoint order.
  for (auto& list : adjV_) {
    std::sort(list.begin(), list.end(),
              [this](int a, int b) { return edges_[a].u < edges_[b].u; });
  }
}

std::vector<std::string> validate(const ColoredBipartiteGraph& g) {
  std::vector<std::string> out;
  auto note = [&out](const std::string& s) { out.push_back(s); };
  if (g.nU() < 0) note("nU must be nonnegative");
  if (g.nV() < 0) note("nV must be nonnegative");
  if (g.numColors() < 1) note("numColors must be at least 1");
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < g.numEdges(); ++e) {
    const Edge& ed = g.edge(e);
    std::string where = "edge " + std::to_string(e);
    if (ed.u < 0 || ed.u >= g.nU())
      note(where + ": left endpoint " + std::to_string(ed.u) + " out of range");
    if (ed.v < 0 || ed.v >= g.nV())
      note(where + ": right endpoint " + std::to_string(ed.v) + " out of range");
    if (!(ed.weight > 0.0) || !std::isfinite(ed.weight))
      note(where + ": weight must be positive and finite (got " +
           formatDouble(ed.weight) + ")");
    if (ed.color < 0 || ed.color >= g.numColors())
      note(where + ": color " + std::to_string(ed.color + 1) + " out of range");
    if (!seen.insert({ed.u, ed.v}).second)
      note(where + ": duplicate pair (" + std::to_string(ed.u) + ", " +
           std::to_string(ed.v) + ")");
  }
  return out;
}

ColoredBipartiteGraph generateErdosRenyi(int n, double p, int numColors,
                                         WeightRange weights, bool bipartiteSplit,
                                         std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("generateErdosRenyi: n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument("generateErdosRenyi: p must lie in [0, 1]");
  if (numColors < 1)
    throw std::invalid_argument("generateErdosRenyi: numColors must be at least 1");
  if (!(weights.lo > 0.0) || !(weights.hi > weights.lo) || !std::isfinite(weights.hi))
    throw std::invalid_argument("generateErdosRenyi: weight range must satisfy 0 < lo < hi");
  if (!bipartiteSplit)
    throw std::invalid_argument(
        "generateErdosRenyi: only bipartite output is supported; pass bipartiteSplit=true");

  SplitMix64 partitionRng = substream(seed, 0);
  SplitMix64 edgeRng = substream(seed, 1);
  SplitMix64 weightRng = substream(seed, 2);
  SplitMix64 colorRng = substream(seed, 3);

  // Independent fair coin per vertex; left/right indices keep vertex order.
  std::vector<int> leftOf(n, -1), rightOf(n, -1);
  int nU = 0, nV = 0;
  for (int i = 0; i < n; ++i) {
    if (partitionRng.next() >> 63) {
      rightOf[i] = nV++;
    } else {
      leftOf[i] = nU++;
    }
  }

  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    if (leftOf[i] < 0) continue;
    for (int j = 0; j < n; ++j) {
      if (rightOf[j] < 0) continue;
      if (edgeRng.nextUnit() < p) {
        edges.push_back({leftOf[i], rightOf[j], 0.0, 0});
      }
    }
  }
  for (Edge& e : edges) {
    e.weight = weights.lo + weightRng.nextUnit() * (weights.hi - weights.lo);
    e.color = static_cast<int>(colorRng.nextBelow(static_cast<std::uint64_t>(numColors)));
  }
  return ColoredBipartiteGraph(nU, nV, numColors, std::move(edges));
}

StarFixture generateStarFixture(int n, double eps) {
  if (n < 1) throw std::invalid_argument("generateStarFixture: n must be at least 1");
  if (!(eps > 0.0 && eps < 1.0))
    throw std::invalid_argument("generateStarFixture: eps must lie in (0, 1)");
  std::vector<Edge> edges;
  std::vector<double> x;
  edges.reserve(n + 1);
  x.reserve(n + 1);
  for (int t = 0; t < n; ++t) {
    edges.push_back({0, t, 1.0, 0});
    x.push_back(eps / n);
  }
  edges.push_back({0, n, 1.0, 1});
  x.push_back(1.0 - eps);
  return {ColoredBipartiteGraph(1, n + 1, 2, std::move(edges)), std::move(x)};
}

std::string formatDouble(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

ColoredBipartiteGraph readGraphText(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("graph file: empty input");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  if (header != "fairmatch-graph v1")
    throw std::runtime_error("graph file: expected header 'fairmatch-graph v1', got '" +
                             header + "'");
  int nU, nV, m, ell;
  if (!(in >> nU >> nV >> m >> ell))
    throw std::runtime_error("graph file: malformed size line (want: nU nV m numColors)");
  if (m < 0) throw std::runtime_error("graph file: negative edge count");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (int i = 0; i < m; ++i) {
    Edge e;
    int color1;
    if (!(in >> e.u >> e.v >> e.weight >> color1))
      throw std::runtime_error("graph file: malformed edge line " + std::to_string(i + 1));
    e.color = color1 - 1;
    edges.push_back(e);
  }
  std::string trailing;
  if (in >> trailing)
    throw std::runtime_error("graph file: unexpected trailing content '" + trailing + "'");
  return ColoredBipartiteGraph(nU, nV, ell, std::move(edges));
}

}  // namespace

ColoredBipartiteGraph readGraphJson(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.is_object()) throw std::runtime_error("graph json: top level must be an object");
  const int nU = j.at("nU").get<int>();
  const int nV = j.at("nV").get<int>();
  const int ell = j.at("ell").get<int>();
  const auto& arr = j.at("edges");
  if (!arr.is_array()) throw std::runtime_error("graph json: 'edges' must be an array");
  if (j.contains("m") && j.at("m").get<int>() != static_cast<int>(arr.size()))
    throw std::runtime_error("graph json: 'm' does not match the edge count");
  std::vector<Edge> edges;
  edges.reserve(arr.size());
  for (const auto& item : arr) {
    if (!item.is_array() || item.size() != 4)
      throw std::runtime_error("graph json: each edge must be [u, v, weight, color]");
    Edge e;
    e.u = item[0].get<int>();
    e.v = item[1].get<int>();
    e.weight = item[2].get<double>();
    e.color = item[3].get<int>() - 1;
    edges.push_back(e);
  }
  return ColoredBipartiteGraph(nU, nV, ell, std::move(edges));
}

ColoredBipartiteGraph readGraph(std::istream& in) {
  // Peek past whitespace: a JSON mirror starts with '{'.
  int c = in.peek();
  while (c == ' ' || c == '\n' || c == '\t' || c == '\r') {
    in.get();
    c = in.peek();
  }
  if (c == '{') {
    std::ostringstream all;
    all << in.rdbuf();
    return readGraphJson(all.str());
  }
  return readGraphText(in);
}

ColoredBipartiteGraph readGraphFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return readGraph(in);
}

void writeGraph(const ColoredBipartiteGraph& g, std::ostream& out) {
  out << "fairmatch-graph v1\n";
  out << g.nU() << ' ' << g.nV() << ' ' << g.numEdges() << ' ' << g.numColors() << '\n';
  for (const Edge& e : g.edges()) {
    out << e.u << ' ' << e.v << ' ' << formatDouble(e.weight) << ' ' << (e.color + 1)
        << '\n';
  }
}

void writeGraphFile(const ColoredBipartiteGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  writeGraph(g, out);
  if (!out) throw std::runtime_error("failed writing graph file: " + path);
}

std::string writeGraphJson(const ColoredBipartiteGraph& g) {
  nlohmann::ordered_json j;
  j["nU"] = g.nU();
  j["nV"] = g.nV();
  j["m"] = g.numEdges();
  j["ell"] = g.numColors();
  auto arr = nlohmann::ordered_json::array();
  for (const Edge& e : g.edges()) {
    arr.push_back({e.u, e.v, e.weight, e.color + 1});
  }
  j["edges"] = std::move(arr);
  return j.dump();
}

}  // namespace fairmatch
