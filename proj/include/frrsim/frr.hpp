#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "frrsim/forwarding.hpp"
#include "frrsim/max_flow.hpp"
#include "frrsim/topology.hpp"

namespace frrsim {

// Directed tree oriented towards `root`: parent_edge[v] is the edge v->parent.
struct Arborescence {
  NodeId root{};
  std::vector<std::optional<EdgeId>> parent_edge;

  bool operator==(const Arborescence&) const = default;
};

// Throws unless every arborescence spans all nodes, is acyclic, is rooted at
// `root`, and no directed edge is shared between two of them.
inline void validate_arborescences(const Topology& t, NodeId root,
                                   std::span<const Arborescence> arbs) {
  std::set<EdgeId> used;
  for (std::size_t i = 0; i < arbs.size(); ++i) {
    const auto& arb = arbs[i];
    const std::string which = "arborescence " + std::to_string(i + 1);
    if (arb.root != root) throw Error(which + ": wrong root");
    if (arb.parent_edge.size() != t.node_count()) throw Error(which + ": wrong size");
    if (arb.parent_edge[index(root)]) throw Error(which + ": root has a parent");
    for (std::size_t v = 0; v < t.node_count(); ++v) {
      if (node_id(v) == root) continue;
      const auto& e = arb.parent_edge[v];
      if (!e) throw Error(which + ": node " + t.name(node_id(v)) + " not spanned");
      if (index(*e) >= t.edge_count() || t.tail(*e) != node_id(v)) {
        throw Error(which + ": parent edge of " + t.name(node_id(v)) + " is not outgoing");
      }
      if (!used.insert(*e).second) {
        throw Error(which + ": edge " + t.edge_label(*e) + " shared with another arborescence");
      }
      NodeId u = node_id(v);
      for (std::size_t steps = 0; u != root; ++steps) {
        if (steps > t.node_count()) throw Error(which + ": cycle through " + t.name(u));
        u = t.head(*arb.parent_edge[index(u)]);
      }
    }
  }
}

namespace detail {

// Edmonds' branching theorem, in-tree form: partial arborescences T_1..T_k
// (arc-disjoint, all containing the root) extend to k arc-disjoint spanning
// arborescences iff every node set X has at least #{i : X misses T_i} unused
// arcs leaving it. Equivalently, in the network below every node sends k
// units to the super sink: unused arcs have capacity 1, tree members feed an
// aux node per tree with capacity k, and each aux node drains 1 unit.
class PackingOracle {
 public:
  PackingOracle(const Topology& t, std::size_t k) : topo_(t), k_(k) {}

  bool completable(const std::vector<std::vector<bool>>& in_tree,
                   const std::vector<bool>& edge_used) const {
    const std::size_t n = topo_.node_count();
    const std::size_t sink = n + k_;
    FlowNetwork net(n + k_ + 1);
    for (std::size_t e = 0; e < topo_.edge_count(); ++e) {
      if (edge_used[e]) continue;
      net.add_arc(index(topo_.tail(edge_id(e))), index(topo_.head(edge_id(e))), 1);
    }
    for (std::size_t i = 0; i < k_; ++i) {
      for (std::size_t v = 0; v < n; ++v) {
        if (in_tree[i][v]) net.add_arc(v, n + i, static_cast<int>(k_));
      }
      net.add_arc(n + i, sink, 1);
    }
    const int need = static_cast<int>(k_);
    for (std::size_t v = 0; v < n; ++v) {
      bool everywhere = true;
      for (std::size_t i = 0; i < k_; ++i) everywhere = everywhere && in_tree[i][v];
      if (everywhere) continue;
      net.reset();
      if (net.max_flow(v, sink, need) < need) return false;
    }
    return true;
  }

 private:
  const Topology& topo_;
  std::size_t k_;
};

}  // namespace detail

// k pairwise arc-disjoint spanning arborescences rooted at `root`, grown one
// arc at a time. Tree i is completed before tree i+1 starts; candidate arcs
// are tried nearest-to-root first so the first tree is a shortest-path tree
// whenever the packing allows it. An arc is accepted only if the oracle says
// the remaining packing is still completable, so the loop never dead-ends
// when k <= edge_connectivity.
inline std::vector<Arborescence> decompose_arborescences(const Topology& t, NodeId root,
                                                         std::size_t k) {
  if (index(root) >= t.node_count()) throw Error("decompose: unknown root");
  if (k == 0) throw Error("decompose: k must be positive");
  const int lambda = edge_connectivity(t);
  if (static_cast<int>(k) > lambda) {
    throw Error("decompose: k=" + std::to_string(k) + " exceeds edge connectivity " +
                std::to_string(lambda));
  }
  const std::size_t n = t.node_count();
  const auto dist = distances_to(t, FailureSet{}, root);

  std::vector<Arborescence> arbs(k, Arborescence{root, std::vector<std::optional<EdgeId>>(n)});
  std::vector<std::vector<bool>> in_tree(k, std::vector<bool>(n, false));
  std::vector<bool> edge_used(t.edge_count(), false);
  for (auto& row : in_tree) row[index(root)] = true;

  // (dist(v), v, u) order over edges v->u.
  std::vector<EdgeId> order;
  for (std::size_t e = 0; e < t.edge_count(); ++e) order.push_back(edge_id(e));
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) {
    auto key = [&](EdgeId e) {
      return std::tuple(dist[index(t.tail(e))], index(t.tail(e)), index(t.head(e)));
    };
    return key(a) < key(b);
  });

  const detail::PackingOracle oracle(t, k);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t added = 1; added < n; ++added) {
      bool extended = false;
      for (EdgeId e : order) {
        const NodeId v = t.tail(e);
        const NodeId u = t.head(e);
        if (edge_used[index(e)] || in_tree[i][index(v)] || !in_tree[i][index(u)]) continue;
        edge_used[index(e)] = true;
        in_tree[i][index(v)] = true;
        if (oracle.completable(in_tree, edge_used)) {
          arbs[i].parent_edge[index(v)] = e;
          extended = true;
          break;
        }
        edge_used[index(e)] = false;
        in_tree[i][index(v)] = false;
      }
      if (!extended) {
        throw Error("decompose: packing of " + std::to_string(k) +
                    " arborescences could not be completed");
      }
    }
  }
  validate_arborescences(t, root, arbs);
  return arbs;
}

// Outport i of every node is its parent edge in arborescence i; an inport that
// is an edge of arborescence i starts its suffix there, all other inports
// (including injection) start at the top.
inline ForwardingState compile_arborescence_frr(const Topology& t,
                                                std::span<const Arborescence> arbs,
                                                const Flow& f) {
  if (arbs.empty()) throw Error("compile_arborescence_frr: no arborescences");
  for (const auto& a : arbs) {
    if (a.root != f.destination) {
      throw Error("compile_arborescence_frr: arborescence not rooted at destination");
    }
  }
  ForwardingState state(t, f, ForwardingMode::kSuffix);
  std::map<EdgeId, std::size_t> owner;
  for (std::size_t i = 0; i < arbs.size(); ++i) {
    for (const auto& e : arbs[i].parent_edge) {
      if (e) owner.emplace(*e, i);
    }
  }
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    const NodeId node = node_id(v);
    if (node == f.destination) continue;
    NodeTable& tab = state.table(node);
    for (const auto& a : arbs) {
      if (!a.parent_edge.at(v)) {
        throw Error("compile_arborescence_frr: node " + t.name(node) + " not spanned");
      }
      tab.priority.push_back(*a.parent_edge[v]);
    }
    for (EdgeId in : t.in_edges(node)) {
      auto it = owner.find(in);
      tab.inport_start[in] = it == owner.end() ? 0 : it->second;
    }
    if (node == f.source) tab.inport_start[kInjectionPort] = 0;
  }
  return state;
}

// ---------------------------------------------------------------------------
// Partition FRR: ordered source->destination paths P_1..P_k.

struct PartitionScheme {
  std::vector<std::vector<NodeId>> paths;

  bool operator==(const PartitionScheme&) const = default;
};

namespace detail {

inline std::vector<EdgeId> path_edges(const Topology& t, const std::vector<NodeId>& path) {
  std::vector<EdgeId> edges;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    auto e = t.edge_between(path[i], path[i + 1]);
    if (!e) {
      throw Error("partition: " + t.name(path[i]) + " and " + t.name(path[i + 1]) +
                  " are not adjacent");
    }
    edges.push_back(*e);
  }
  return edges;
}

inline std::size_t common_prefix(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
  std::size_t c = 0;
  while (c < a.size() && c < b.size() && a[c] == b[c]) ++c;
  return c;
}

inline std::size_t common_suffix(const std::vector<EdgeId>& a, const std::vector<EdgeId>& b) {
  std::size_t c = 0;
  while (c < a.size() && c < b.size() && a[a.size() - 1 - c] == b[b.size() - 1 - c]) ++c;
  return c;
}

}  // namespace detail

// Paths must be simple s->t paths. Two paths may share links only inside
// their common leading or trailing segment (needed for topologies where the
// source or destination has a single uplink); elsewhere they are
// link-disjoint.
inline void validate_partition_scheme(const Topology& t, const PartitionScheme& ps,
                                      const Flow& f) {
  if (ps.paths.empty()) throw Error("partition: no paths");
  std::vector<std::vector<EdgeId>> edges;
  for (const auto& p : ps.paths) {
    if (p.size() < 2 || p.front() != f.source || p.back() != f.destination) {
      throw Error("partition: path must run from the flow source to its destination");
    }
    std::set<NodeId> distinct(p.begin(), p.end());
    if (distinct.size() != p.size()) throw Error("partition: path is not simple");
    edges.push_back(detail::path_edges(t, p));
  }
  for (std::size_t a = 0; a < edges.size(); ++a) {
    for (std::size_t b = a + 1; b < edges.size(); ++b) {
      if (edges[a] == edges[b]) {
        throw Error("partition: paths " + std::to_string(a + 1) + " and " +
                    std::to_string(b + 1) + " are identical");
      }
      const std::size_t pre = detail::common_prefix(edges[a], edges[b]);
      const std::size_t suf = detail::common_suffix(edges[a], edges[b]);
      std::set<LinkId> inner_a;
      for (std::size_t i = pre; i + suf < edges[a].size(); ++i) inner_a.insert(link_of(edges[a][i]));
      for (std::size_t i = pre; i + suf < edges[b].size(); ++i) {
        if (inner_a.contains(link_of(edges[b][i]))) {
          throw Error("partition: paths " + std::to_string(a + 1) + " and " +
                      std::to_string(b + 1) + " share link " + t.link_label(link_of(edges[b][i])));
        }
      }
    }
  }
}

// k link-disjoint s->t paths from a unit max-flow, cancelled and decomposed;
// sorted by (length, node-index sequence) so P_1 is a shortest one.
inline PartitionScheme compute_disjoint_paths(const Topology& t, const Flow& f, std::size_t k) {
  if (k == 0) throw Error("compute_disjoint_paths: k must be positive");
  FlowNetwork net(t.node_count());
  std::vector<std::size_t> arc_of(t.edge_count());
  for (std::size_t e = 0; e < t.edge_count(); ++e) {
    arc_of[e] = net.add_arc(index(t.tail(edge_id(e))), index(t.head(edge_id(e))), 1);
  }
  const int value = net.max_flow(index(f.source), index(f.destination), static_cast<int>(k));
  if (value < static_cast<int>(k)) {
    throw Error("compute_disjoint_paths: k=" + std::to_string(k) + " exceeds max-flow " +
                std::to_string(value));
  }
  // Net flow per directed edge after cancelling opposite units on a link.
  std::vector<int> carry(t.edge_count(), 0);
  for (std::size_t l = 0; l < t.link_count(); ++l) {
    const int fwd = net.flow(arc_of[2 * l]);
    const int bwd = net.flow(arc_of[2 * l + 1]);
    if (fwd > bwd) carry[2 * l] = fwd - bwd;
    if (bwd > fwd) carry[2 * l + 1] = bwd - fwd;
  }
  PartitionScheme ps;
  for (std::size_t p = 0; p < k; ++p) {
    std::vector<NodeId> path{f.source};
    while (path.back() != f.destination) {
      std::optional<EdgeId> next;
      for (EdgeId e : t.out_edges(path.back())) {
        if (carry[index(e)] > 0) {
          next = e;
          break;
        }
      }
      if (!next) throw Error("compute_disjoint_paths: flow decomposition failed");
      carry[index(*next)] -= 1;
      const NodeId w = t.head(*next);
      // Drop any cycle the walk closes; its edges are already consumed.
      auto seen = std::find(path.begin(), path.end(), w);
      if (seen != path.end()) {
        path.erase(seen + 1, path.end());
      } else {
        path.push_back(w);
      }
    }
    ps.paths.push_back(std::move(path));
  }
  std::sort(ps.paths.begin(), ps.paths.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(),
                                        [](NodeId x, NodeId y) { return index(x) < index(y); });
  });
  validate_partition_scheme(t, ps, f);
  return ps;
}

// Walk P_i forward; a node whose forward edge on P_i is down sends the packet
// back along P_i. Backtracking ends at the node where P_{i+1} branches off P_i
// (the source for link-disjoint paths), which continues on P_{i+1}. Every
// entry carries its partition index (1-based) for partition-scoped ShortCut.
inline ForwardingState compile_partition_frr(const Topology& t, const PartitionScheme& ps,
                                             const Flow& f) {
  validate_partition_scheme(t, ps, f);
  const std::size_t k = ps.paths.size();
  std::vector<std::vector<EdgeId>> edges;
  for (const auto& p : ps.paths) edges.push_back(detail::path_edges(t, p));
  // Position (in nodes) of the branch node where P_{i+1} leaves P_i.
  std::vector<std::size_t> branch(k, 0);
  for (std::size_t i = 0; i + 1 < k; ++i) branch[i] = detail::common_prefix(edges[i], edges[i + 1]);

  ForwardingState state(t, f, ForwardingMode::kSuffix);
  auto slot = [&](NodeTable& tab, EdgeId e, int tag) {
    auto it = std::find(tab.priority.begin(), tab.priority.end(), e);
    if (it != tab.priority.end()) return static_cast<std::size_t>(it - tab.priority.begin());
    tab.priority.push_back(e);
    tab.partition_tag.push_back(tag);
    return tab.priority.size() - 1;
  };
  auto position = [&](std::size_t i, NodeId v) -> std::optional<std::size_t> {
    const auto& p = ps.paths[i];
    auto it = std::find(p.begin(), p.end(), v);
    if (it == p.end() || v == f.destination) return std::nullopt;
    return static_cast<std::size_t>(it - p.begin());
  };

  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t pos = 0; pos + 1 < ps.paths[i].size(); ++pos) {
      NodeTable& tab = state.table(ps.paths[i][pos]);
      slot(tab, edges[i][pos], static_cast<int>(i + 1));
      if (pos > branch[i]) slot(tab, reverse(edges[i][pos - 1]), static_cast<int>(i + 1));
    }
  }

  // Where a packet continues after the forward edge of P_i at `v` is
  // unusable: back along P_i, or onto P_{i+1} at the branch node.
  auto fallback_start = [&](std::size_t i, NodeId v, std::size_t pos) -> std::size_t {
    NodeTable& tab = state.table(v);
    if (pos > branch[i]) {
      auto it = std::find(tab.priority.begin(), tab.priority.end(), reverse(edges[i][pos - 1]));
      return static_cast<std::size_t>(it - tab.priority.begin());
    }
    if (i + 1 < k) {
      if (auto next = position(i + 1, v)) {
        auto it = std::find(tab.priority.begin(), tab.priority.end(), edges[i + 1][*next]);
        return static_cast<std::size_t>(it - tab.priority.begin());
      }
    }
    return tab.priority.size();
  };

  for (std::size_t i = 0; i < k; ++i) {
    const auto& p = ps.paths[i];
    for (std::size_t pos = 0; pos + 1 < p.size(); ++pos) {
      const NodeId v = p[pos];
      NodeTable& tab = state.table(v);
      if (pos > 0) {
        const EdgeId forward_in = edges[i][pos - 1];
        auto it = std::find(tab.priority.begin(), tab.priority.end(), edges[i][pos]);
        tab.inport_start.emplace(forward_in, static_cast<std::size_t>(it - tab.priority.begin()));
      }
      const EdgeId backward_in = reverse(edges[i][pos]);
      tab.inport_start.emplace(backward_in, fallback_start(i, v, pos));
    }
  }
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    const NodeId node = node_id(v);
    if (node == f.destination) continue;
    NodeTable& tab = state.table(node);
    for (EdgeId in : t.in_edges(node)) tab.inport_start.emplace(in, 0);
  }
  state.table(f.source).inport_start[kInjectionPort] = 0;
  return state;
}

// ---------------------------------------------------------------------------
// Greedy FRR.

struct GreedyDag {
  NodeId destination{};
  std::vector<int> distance;
  // Per node: neighbors no farther from the destination, by (distance, index).
  std::vector<std::vector<EdgeId>> next_hops;
};

inline GreedyDag build_greedy_dag(const Topology& t, NodeId destination) {
  GreedyDag dag{destination, distances_to(t, FailureSet{}, destination), {}};
  dag.next_hops.resize(t.node_count());
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    if (node_id(v) == destination) continue;
    auto& hops = dag.next_hops[v];
    for (EdgeId e : t.out_edges(node_id(v))) {
      if (dag.distance[index(t.head(e))] <= dag.distance[v]) hops.push_back(e);
    }
    std::stable_sort(hops.begin(), hops.end(), [&](EdgeId a, EdgeId b) {
      return dag.distance[index(t.head(a))] < dag.distance[index(t.head(b))];
    });
  }
  return dag;
}

// Each node's list: closer neighbors first, then equal-distance side-steps.
// The edge back through the arrival inport is always tried last.
inline ForwardingState compile_greedy_frr(const Topology& t, const Flow& f) {
  if (!is_connected(t)) throw Error("compile_greedy_frr: topology not connected");
  const GreedyDag dag = build_greedy_dag(t, f.destination);
  ForwardingState state(t, f, ForwardingMode::kGreedy);
  for (std::size_t v = 0; v < t.node_count(); ++v) {
    const NodeId node = node_id(v);
    if (node == f.destination) continue;
    NodeTable& tab = state.table(node);
    tab.priority = dag.next_hops[v];
    for (EdgeId in : t.in_edges(node)) tab.inport_start[in] = 0;
    if (node == f.source) tab.inport_start[kInjectionPort] = 0;
  }
  return state;
}

}  // namespace frrsim
