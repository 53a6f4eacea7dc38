#pragma once

#include <algorithm>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "frrsim/max_flow.hpp"
#include "frrsim/types.hpp"

namespace frrsim {

// Undirected simple graph. Every link implies both directed edges; failures
// always take out both directions together.
class Topology {
 public:
  struct Link {
    NodeId low;
    NodeId high;
  };

  Topology() = default;

  Topology(std::vector<std::string> names,
           const std::vector<std::pair<std::string, std::string>>& links)
      : names_(std::move(names)), out_(names_.size()) {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw Error("topology: empty node name");
      if (!by_name_.emplace(names_[i], node_id(i)).second) {
        throw Error("topology: duplicate node '" + names_[i] + "'");
      }
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [a, b] : links) {
      const NodeId u = node(a);
      const NodeId v = node(b);
      if (u == v) throw Error("topology: self-loop at '" + a + "'");
      const std::pair key{std::min(index(u), index(v)), std::max(index(u), index(v))};
      if (!seen.insert(key).second) {
        throw Error("topology: duplicate link " + a + "-" + b);
      }
      const std::size_t l = links_.size();
      links_.push_back({node_id(key.first), node_id(key.second)});
      out_[key.first].push_back(edge_id(2 * l));
      out_[key.second].push_back(edge_id(2 * l + 1));
    }
    for (auto& edges : out_) {
      std::sort(edges.begin(), edges.end(), [this](EdgeId x, EdgeId y) {
        return index(head(x)) < index(head(y));
      });
    }
  }

  std::size_t node_count() const { return names_.size(); }
  std::size_t link_count() const { return links_.size(); }
  std::size_t edge_count() const { return 2 * links_.size(); }

  const std::string& name(NodeId v) const { return names_.at(index(v)); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  NodeId node(std::string_view name) const {
    if (auto v = find(name)) return *v;
    throw Error("unknown node '" + std::string(name) + "'");
  }

  const Link& link(LinkId l) const { return links_.at(index(l)); }

  NodeId tail(EdgeId e) const {
    const Link& l = links_.at(index(link_of(e)));
    return (index(e) & 1U) ? l.high : l.low;
  }
  NodeId head(EdgeId e) const {
    const Link& l = links_.at(index(link_of(e)));
    return (index(e) & 1U) ? l.low : l.high;
  }

  // Outgoing directed edges of v, sorted by neighbor index.
  std::span<const EdgeId> out_edges(NodeId v) const { return out_.at(index(v)); }

  std::vector<EdgeId> in_edges(NodeId v) const {
    std::vector<EdgeId> in;
    for (EdgeId e : out_edges(v)) in.push_back(reverse(e));
    return in;
  }

  std::optional<EdgeId> edge_between(NodeId u, NodeId v) const {
    for (EdgeId e : out_edges(u)) {
      if (head(e) == v) return e;
    }
    return std::nullopt;
  }

  std::optional<LinkId> link_between(NodeId u, NodeId v) const {
    if (auto e = edge_between(u, v)) return link_of(*e);
    return std::nullopt;
  }

  std::string edge_label(EdgeId e) const {
    return name(tail(e)) + "->" + name(head(e));
  }
  std::string link_label(LinkId l) const {
    return name(link(l).low) + "-" + name(link(l).high);
  }

  std::vector<std::pair<std::string, std::string>> link_names() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const Link& l : links_) out.emplace_back(name(l.low), name(l.high));
    return out;
  }

  bool operator==(const Topology& other) const {
    return names_ == other.names_ && link_names() == other.link_names();
  }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeId> by_name_;
  std::vector<Link> links_;
  std::vector<std::vector<EdgeId>> out_;
};

// A source/destination pair; the unit forwarding state is compiled for.
struct Flow {
  std::string id;
  NodeId source;
  NodeId destination;

  bool operator==(const Flow&) const = default;
};

inline Flow make_flow(const Topology& t, std::string id, std::string_view source,
                      std::string_view destination) {
  Flow f{std::move(id), t.node(source), t.node(destination)};
  if (f.source == f.destination) {
    throw Error("flow '" + f.id + "': source equals destination");
  }
  return f;
}

inline std::vector<Flow> all_pair_flows(const Topology& t) {
  std::vector<Flow> flows;
  for (std::size_t s = 0; s < t.node_count(); ++s) {
    for (std::size_t d = 0; d < t.node_count(); ++d) {
      if (s == d) continue;
      flows.push_back({t.name(node_id(s)) + "->" + t.name(node_id(d)),
                       node_id(s), node_id(d)});
    }
  }
  return flows;
}

class FailureSet {
 public:
  FailureSet() = default;

  static FailureSet link(LinkId l) {
    FailureSet f;
    f.links_.insert(l);
    return f;
  }
  static FailureSet node(NodeId v) {
    FailureSet f;
    f.nodes_.insert(v);
    return f;
  }

  void fail_link(const Topology& t, LinkId l) {
    if (index(l) >= t.link_count()) throw Error("failure: unknown link");
    links_.insert(l);
  }
  void fail_node(const Topology& t, NodeId v) {
    if (index(v) >= t.node_count()) throw Error("failure: unknown node");
    nodes_.insert(v);
  }

  bool empty() const { return links_.empty() && nodes_.empty(); }
  const std::set<LinkId>& failed_links() const { return links_; }
  const std::set<NodeId>& failed_nodes() const { return nodes_; }

  bool node_failed(NodeId v) const { return nodes_.contains(v); }

  bool link_failed(const Topology& t, LinkId l) const {
    if (links_.contains(l)) return true;
    const auto& lk = t.link(l);
    return node_failed(lk.low) || node_failed(lk.high);
  }

  bool edge_failed(const Topology& t, EdgeId e) const {
    return link_failed(t, link_of(e));
  }

  std::string label(const Topology& t) const {
    if (empty()) return "none";
    std::string out;
    for (LinkId l : links_) {
      if (!out.empty()) out += '+';
      out += t.link_label(l);
    }
    for (NodeId v : nodes_) {
      if (!out.empty()) out += '+';
      out += "node:" + t.name(v);
    }
    return out;
  }

  bool operator==(const FailureSet&) const = default;

 private:
  std::set<LinkId> links_;
  std::set<NodeId> nodes_;
};

// Global edge connectivity: min over v of the unit max-flow between node 0 and
// v. Zero for disconnected or single-node graphs.
inline int edge_connectivity(const Topology& t) {
  if (t.node_count() < 2) return 0;
  FlowNetwork net(t.node_count());
  for (std::size_t l = 0; l < t.link_count(); ++l) {
    const auto& lk = t.link(link_id(l));
    net.add_arc(index(lk.low), index(lk.high), 1);
    net.add_arc(index(lk.high), index(lk.low), 1);
  }
  int best = static_cast<int>(t.link_count());
  for (std::size_t v = 1; v < t.node_count(); ++v) {
    net.reset();
    best = std::min(best, net.max_flow(0, v, best));
    if (best == 0) break;
  }
  return best;
}

// BFS hop distances to `target` in the residual graph; kUnreachable where
// partitioned or failed.
inline std::vector<int> distances_to(const Topology& t, const FailureSet& failures,
                                     NodeId target) {
  std::vector<int> dist(t.node_count(), kUnreachable);
  if (failures.node_failed(target)) return dist;
  std::queue<NodeId> frontier;
  dist[index(target)] = 0;
  frontier.push(target);
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (EdgeId e : t.out_edges(u)) {
      const NodeId w = t.head(e);
      if (dist[index(w)] != kUnreachable || failures.edge_failed(t, e)) continue;
      dist[index(w)] = dist[index(u)] + 1;
      frontier.push(w);
    }
  }
  return dist;
}

inline std::optional<int> shortest_path_length(const Topology& t,
                                               const FailureSet& failures, NodeId a,
                                               NodeId b) {
  if (failures.node_failed(a) || failures.node_failed(b)) {
    throw Error("shortest_path_length: endpoint is a failed node");
  }
  const int d = distances_to(t, failures, b)[index(a)];
  if (d == kUnreachable) return std::nullopt;
  return d;
}

// Lexicographically smallest (by node index) among the shortest residual paths.
inline std::optional<std::vector<NodeId>> shortest_path(const Topology& t,
                                                        const FailureSet& failures,
                                                        NodeId a, NodeId b) {
  const auto dist = distances_to(t, failures, b);
  if (failures.node_failed(a) || dist[index(a)] == kUnreachable) return std::nullopt;
  std::vector<NodeId> path{a};
  while (path.back() != b) {
    const NodeId u = path.back();
    for (EdgeId e : t.out_edges(u)) {
      const NodeId w = t.head(e);
      if (!failures.edge_failed(t, e) && dist[index(w)] == dist[index(u)] - 1) {
        path.push_back(w);
        break;
      }
    }
  }
  return path;
}

inline bool is_connected(const Topology& t) {
  if (t.node_count() == 0) return true;
  const auto dist = distances_to(t, FailureSet{}, node_id(0));
  return std::none_of(dist.begin(), dist.end(), [](int d) { return d == kUnreachable; });
}

}  // namespace frrsim
