#pragma once

#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "frrsim/topology.hpp"

namespace frrsim {

enum class TopologyKind { kFigure1, kComplete, kTorus, kHypercube, kRandom, kFile, kInline };

NLOHMANN_JSON_SERIALIZE_ENUM(TopologyKind, {
                                               {TopologyKind::kFigure1, "figure1"},
                                               {TopologyKind::kComplete, "complete"},
                                               {TopologyKind::kTorus, "torus"},
                                               {TopologyKind::kHypercube, "hypercube"},
                                               {TopologyKind::kRandom, "random"},
                                               {TopologyKind::kFile, "file"},
                                               {TopologyKind::kInline, "inline"},
                                           })

struct TopologyDescriptor {
  TopologyKind kind = TopologyKind::kFigure1;
  int n = 0;     // complete, random
  int rows = 0;  // torus
  int cols = 0;
  int dim = 0;   // hypercube
  double p = 0.0;
  std::uint64_t seed = 0;
  int min_edge_connectivity = 1;
  std::string path;                                          // file
  std::vector<std::string> nodes;                            // inline
  std::vector<std::pair<std::string, std::string>> links;   // inline

  bool operator==(const TopologyDescriptor&) const = default;
};

// Node names S, H, S1..S4, D; H hangs off S1 to carry the competing flow.
inline Topology figure1() {
  return Topology({"S", "H", "S1", "S2", "S3", "S4", "D"},
                  {{"S", "S1"},
                   {"H", "S1"},
                   {"S1", "S2"},
                   {"S1", "S3"},
                   {"S2", "S4"},
                   {"S3", "S4"},
                   {"S4", "D"}});
}

inline Topology complete_graph(int n) {
  if (n < 2) throw Error("complete: need n >= 2");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  std::vector<std::pair<std::string, std::string>> links;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) links.emplace_back(names[i], names[j]);
  }
  return Topology(std::move(names), links);
}

inline Topology torus(int rows, int cols) {
  if (rows < 3 || cols < 3) throw Error("torus: need rows, cols >= 3");
  auto name = [](int r, int c) { return std::to_string(r) + "." + std::to_string(c); };
  std::vector<std::string> names;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) names.push_back(name(r, c));
  }
  std::vector<std::pair<std::string, std::string>> links;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      links.emplace_back(name(r, c), name(r, (c + 1) % cols));
      links.emplace_back(name(r, c), name((r + 1) % rows, c));
    }
  }
  return Topology(std::move(names), links);
}

inline Topology hypercube(int dim) {
  if (dim < 1 || dim > 16) throw Error("hypercube: need 1 <= dim <= 16");
  const int n = 1 << dim;
  auto name = [dim](int x) {
    std::string s(static_cast<std::size_t>(dim), '0');
    for (int b = 0; b < dim; ++b) {
      if (x & (1 << b)) s[static_cast<std::size_t>(dim - 1 - b)] = '1';
    }
    return s;
  };
  std::vector<std::string> names;
  for (int x = 0; x < n; ++x) names.push_back(name(x));
  std::vector<std::pair<std::string, std::string>> links;
  for (int x = 0; x < n; ++x) {
    for (int b = 0; b < dim; ++b) {
      const int y = x ^ (1 << b);
      if (x < y) links.emplace_back(names[x], names[y]);
    }
  }
  return Topology(std::move(names), links);
}

inline constexpr int kRandomRetryBudget = 1000;

// G(n, p) with rejection: the seed is incremented until the sample is
// connected and reaches the requested edge connectivity. Bits are drawn from
// mt19937_64 directly so samples are identical across standard libraries.
inline Topology random_graph(int n, double p, std::uint64_t seed, int min_connectivity) {
  if (n < 2) throw Error("random: need n >= 2");
  if (p < 0.0 || p > 1.0) throw Error("random: p must lie in [0, 1]");
  if (min_connectivity > n - 1) throw Error("random: connectivity above n-1 unreachable");
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  for (int attempt = 0; attempt < kRandomRetryBudget; ++attempt) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(attempt));
    std::vector<std::pair<std::string, std::string>> links;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < p) links.emplace_back(names[i], names[j]);
      }
    }
    Topology t(names, links);
    if (is_connected(t) && edge_connectivity(t) >= std::max(1, min_connectivity)) {
      return t;
    }
  }
  throw Error("random: retry budget exhausted before reaching edge connectivity " +
              std::to_string(min_connectivity));
}

inline nlohmann::ordered_json topology_to_json(const Topology& t) {
  nlohmann::ordered_json j;
  j["nodes"] = t.names();
  auto links = nlohmann::ordered_json::array();
  for (const auto& [a, b] : t.link_names()) links.push_back({a, b});
  j["links"] = std::move(links);
  return j;
}

inline Topology topology_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("links")) {
    throw Error("topology JSON must be an object with \"nodes\" and \"links\"");
  }
  std::vector<std::string> nodes;
  for (const auto& n : j.at("nodes")) {
    nodes.push_back(n.is_string() ? n.get<std::string>() : n.dump());
  }
  std::vector<std::pair<std::string, std::string>> links;
  for (const auto& l : j.at("links")) {
    if (!l.is_array() || l.size() != 2) throw Error("topology JSON: link must be a pair");
    auto endpoint = [](const nlohmann::json& x) {
      return x.is_string() ? x.get<std::string>() : x.dump();
    };
    links.emplace_back(endpoint(l[0]), endpoint(l[1]));
  }
  return Topology(std::move(nodes), links);
}

inline Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topology file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("topology file '" + path + "': " + e.what());
  }
  return topology_from_json(j);
}

inline Topology build_topology(const TopologyDescriptor& d) {
  Topology t;
  switch (d.kind) {
    case TopologyKind::kFigure1: t = figure1(); break;
    case TopologyKind::kComplete:
      if (d.n < 3) throw Error("complete: need n >= 3");
      t = complete_graph(d.n);
      break;
    case TopologyKind::kTorus: t = torus(d.rows, d.cols); break;
    case TopologyKind::kHypercube:
      if (d.dim < 2) throw Error("hypercube: need dim >= 2");
      t = hypercube(d.dim);
      break;
    case TopologyKind::kRandom:
      t = random_graph(d.n, d.p, d.seed, d.min_edge_connectivity);
      break;
    case TopologyKind::kFile: t = load_topology_file(d.path); break;
    case TopologyKind::kInline: t = Topology(d.nodes, d.links); break;
  }
  if (!is_connected(t)) throw Error("topology is not connected");
  return t;
}

}  // namespace frrsim
