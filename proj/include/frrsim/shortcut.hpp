#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "frrsim/forwarding.hpp"
#include "frrsim/topology.hpp"

namespace frrsim {

struct ObservedPort {
  EdgeId outport;
  // Position in the node's priority list; empty for a greedy return edge.
  std::optional<std::size_t> priority_index;
};

// Outports a flow was seen leaving each node through, in order of use.
struct Observation {
  std::map<NodeId, std::vector<ObservedPort>> used;
};

inline Observation observe(const ForwardingState& state, const Trace& tr) {
  Observation obs;
  for (const Hop& h : tr.hops) {
    if (index(h.node) >= state.node_count()) throw Error("observe: trace references unknown node");
    const auto& prio = state.table(h.node).priority;
    auto it = std::find(prio.begin(), prio.end(), h.outport);
    std::optional<std::size_t> pos;
    if (it != prio.end()) {
      pos = static_cast<std::size_t>(it - prio.begin());
    } else if (state.mode() == ForwardingMode::kSuffix) {
      throw Error("observe: outport outside the node's priority list");
    }
    obs.used[h.node].push_back({h.outport, pos});
  }
  return obs;
}

struct RuleChange {
  NodeId node;
  EdgeId inport;
  std::size_t old_start;
  std::size_t new_start;
  std::optional<EdgeId> pinned;  // set for greedy pins
};

struct TruncationResult {
  std::size_t change_count = 0;
  std::vector<RuleChange> changes;
};

namespace detail {

// True if some entry of `order` in [from, to) is still usable.
inline bool live_between(const Topology& t, const FailureSet& failures,
                         const std::vector<EdgeId>& order, std::size_t from, std::size_t to) {
  for (std::size_t i = from; i < to && i < order.size(); ++i) {
    if (!failures.edge_failed(t, order[i])) return true;
  }
  return false;
}

// Moves an inport's suffix start to `target` unless only failed (hence
// already pruned) entries lie in between.
inline void advance(NodeTable& tab, NodeId v, EdgeId inport, std::size_t target,
                    const std::vector<EdgeId>& order, const Topology& t,
                    const FailureSet& failures, TruncationResult& out) {
  std::size_t& j = tab.inport_start[inport];
  if (target <= j || !live_between(t, failures, order, j, target)) return;
  out.changes.push_back({v, inport, j, target, std::nullopt});
  ++out.change_count;
  j = target;
}

inline void require_flow_trace(const ForwardingState& state, const Trace& tr) {
  for (const Hop& h : tr.hops) {
    if (index(h.node) >= state.node_count()) throw Error("shortcut: trace references unknown node");
  }
  if (tr.outcome == Outcome::kDelivered && tr.end_node != state.flow().destination) {
    throw Error("shortcut: trace was delivered to another flow's destination");
  }
}

}  // namespace detail

// Single observation: every inport of v whose suffix contains `outport`
// below its top makes `outport` its new top.
inline TruncationResult truncate_to(ForwardingState& state, const Topology& t,
                                    const FailureSet& failures, NodeId v, EdgeId outport) {
  TruncationResult out;
  NodeTable& tab = state.table(v);
  auto it = std::find(tab.priority.begin(), tab.priority.end(), outport);
  if (it == tab.priority.end()) throw Error("truncate_to: outport not in priority list");
  const auto h = static_cast<std::size_t>(it - tab.priority.begin());
  for (auto& [inport, j] : tab.inport_start) {
    detail::advance(tab, v, inport, h, tab.priority, t, failures, out);
  }
  return out;
}

// Batch rule: for every node on the trace and every one of its inports, the
// suffix start jumps to the largest observed priority index inside the
// current suffix.
inline TruncationResult observe_and_truncate(ForwardingState& state, const Topology& t,
                                             const FailureSet& failures, const Trace& tr) {
  if (state.mode() != ForwardingMode::kSuffix) {
    throw Error("observe_and_truncate: requires suffix forwarding state");
  }
  detail::require_flow_trace(state, tr);
  TruncationResult out;
  for (const auto& [v, ports] : observe(state, tr).used) {
    NodeTable& tab = state.table(v);
    for (auto& [inport, j] : tab.inport_start) {
      std::optional<std::size_t> best;
      for (const auto& p : ports) {
        if (*p.priority_index >= j && (!best || *p.priority_index > *best)) best = p.priority_index;
      }
      if (best) detail::advance(tab, v, inport, *best, tab.priority, t, failures, out);
    }
  }
  return out;
}

// Truncation scoped by partition tag: an inport whose top belongs to
// partition i reacts to observed outports of partition i, and jumps directly
// to outports of any later partition.
inline TruncationResult partition_shortcut(ForwardingState& state, const Topology& t,
                                           const FailureSet& failures, const Trace& tr) {
  if (!state.partitioned()) throw Error("partition_shortcut: state has no partition tags");
  if (state.mode() != ForwardingMode::kSuffix) {
    throw Error("partition_shortcut: requires suffix forwarding state");
  }
  detail::require_flow_trace(state, tr);
  TruncationResult out;
  for (const auto& [v, ports] : observe(state, tr).used) {
    NodeTable& tab = state.table(v);
    for (auto& [inport, j] : tab.inport_start) {
      if (j >= tab.priority.size()) continue;
      const int own = tab.partition_tag.at(j);
      std::optional<std::size_t> best;
      for (const auto& p : ports) {
        const std::size_t h = *p.priority_index;
        if (h < j || tab.partition_tag.at(h) < own) continue;
        if (!best || h > *best) best = h;
      }
      if (best) detail::advance(tab, v, inport, *best, tab.priority, t, failures, out);
    }
  }
  return out;
}

// Greedy states have no single priority order, so two rules apply:
//  - bounce-back v1->v2->v1: v2 pins the edge back to v1 for that inport;
//  - every inport of a node whose order still ranks a live outport above the
//    one taken on the node's final visit moves that outport to its top,
//    except where it is the inport's own return edge.
inline TruncationResult greedy_shortcut(ForwardingState& state, const Topology& t,
                                        const FailureSet& failures, const Trace& tr) {
  if (state.mode() != ForwardingMode::kGreedy) {
    throw Error("greedy_shortcut: requires greedy forwarding state");
  }
  detail::require_flow_trace(state, tr);
  TruncationResult out;
  for (std::size_t i = 0; i + 1 < tr.hops.size(); ++i) {
    const Hop& there = tr.hops[i];
    const Hop& back = tr.hops[i + 1];
    if (back.outport != reverse(there.outport)) continue;
    auto& pins = state.table(back.node).pinned;
    auto it = pins.find(back.inport);
    if (it != pins.end() && it->second == back.outport) continue;
    pins[back.inport] = back.outport;
    out.changes.push_back({back.node, back.inport, state.start(back.node, back.inport),
                           state.start(back.node, back.inport), back.outport});
    ++out.change_count;
  }
  std::map<NodeId, EdgeId> last_exit;
  for (const Hop& h : tr.hops) last_exit[h.node] = h.outport;
  for (const auto& [v, target] : last_exit) {
    NodeTable& tab = state.table(v);
    std::vector<std::pair<EdgeId, std::vector<EdgeId>>> orders;
    for (const auto& [inport, j] : tab.inport_start) {
      if (tab.pinned.contains(inport)) continue;
      if (inport != kInjectionPort && target == reverse(inport)) continue;
      orders.emplace_back(inport, state.base_order(v, inport));
    }
    for (const auto& [inport, order] : orders) {
      auto it = std::find(order.begin(), order.end(), target);
      if (it == order.end()) continue;
      detail::advance(tab, v, inport, static_cast<std::size_t>(it - order.begin()), order, t,
                      failures, out);
    }
  }
  return out;
}

// Picks the rule matching how the state was compiled.
inline TruncationResult apply_shortcut(ForwardingState& state, const Topology& t,
                                       const FailureSet& failures, const Trace& tr) {
  if (state.mode() == ForwardingMode::kGreedy) return greedy_shortcut(state, t, failures, tr);
  if (state.partitioned()) return partition_shortcut(state, t, failures, tr);
  return observe_and_truncate(state, t, failures, tr);
}

struct AuditedChange {
  std::size_t pass;
  RuleChange change;
};

struct FixpointResult {
  ForwardingState final_state;
  std::vector<Trace> traces;  // traces[0] is the plain FRR walk
  // Passes after which the flow's walk changed.
  int rounds = 0;
  // Passes that modified any rule.
  int truncation_passes = 0;
  std::vector<AuditedChange> audit;

  const Trace& initial() const { return traces.front(); }
  const Trace& final_trace() const { return traces.back(); }
};

// Route, observe, truncate, repeat until a pass changes nothing. Stops early
// (without truncating) on a walk that is not delivered; the caller reads the
// verdict off the traces.
inline FixpointResult shortcut_fixpoint(ForwardingState state, const Topology& t,
                                        const FailureSet& failures) {
  std::size_t budget = 2;
  for (std::size_t v = 0; v < state.node_count(); ++v) {
    const auto& tab = state.table(node_id(v));
    budget += tab.inport_start.size() * (tab.priority.size() + 2);
  }
  FixpointResult r{state, {route(state, t, failures)}, 0, 0, {}};
  for (std::size_t pass = 1; pass <= budget; ++pass) {
    const Trace current = r.traces.back();
    if (!current.delivered()) break;
    TruncationResult res = apply_shortcut(r.final_state, t, failures, current);
    for (const auto& c : res.changes) r.audit.push_back({pass, c});
    if (res.change_count == 0) break;
    ++r.truncation_passes;
    Trace next = route(r.final_state, t, failures);
    if (next != current) ++r.rounds;
    r.traces.push_back(std::move(next));
  }
  return r;
}

}  // namespace frrsim
