#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "frrsim/topology.hpp"

namespace frrsim {

enum class ForwardingMode {
  kSuffix,  // each inport forwards along a contiguous tail of the priority list
  kGreedy,  // inport-dependent order: the edge back through the inport goes last
};

// Forwarding rules of one node for one flow.
struct NodeTable {
  std::vector<EdgeId> priority;
  // Partition index per priority entry; empty unless compiled from a
  // partition scheme.
  std::vector<int> partition_tag;
  // 0-based start of each inport's suffix; priority.size() means empty.
  std::map<EdgeId, std::size_t> inport_start;
  // Greedy only: inports whose top choice was pinned by ShortCut.
  std::map<EdgeId, EdgeId> pinned;

  bool operator==(const NodeTable&) const = default;
};

class ForwardingState {
 public:
  ForwardingState(const Topology& t, Flow flow, ForwardingMode mode)
      : flow_(std::move(flow)), mode_(mode), tables_(t.node_count()) {}

  const Flow& flow() const { return flow_; }
  ForwardingMode mode() const { return mode_; }
  std::size_t node_count() const { return tables_.size(); }

  NodeTable& table(NodeId v) { return tables_.at(index(v)); }
  const NodeTable& table(NodeId v) const { return tables_.at(index(v)); }

  bool partitioned() const {
    return std::any_of(tables_.begin(), tables_.end(),
                       [](const NodeTable& t) { return !t.partition_tag.empty(); });
  }

  // Inports absent from the table start at the top of the list.
  std::size_t start(NodeId v, EdgeId inport) const {
    const auto& starts = table(v).inport_start;
    auto it = starts.find(inport);
    return it == starts.end() ? 0 : it->second;
  }

  // Full ordered candidate list of an inport before its suffix is applied. In
  // suffix mode this is the node's priority list; in greedy mode the edge
  // leading back through the inport is moved to the end.
  std::vector<EdgeId> base_order(NodeId v, EdgeId inport) const {
    const NodeTable& tab = table(v);
    if (mode_ == ForwardingMode::kSuffix || inport == kInjectionPort) return tab.priority;
    const EdgeId back = reverse(inport);
    std::vector<EdgeId> order;
    for (EdgeId e : tab.priority) {
      if (e != back) order.push_back(e);
    }
    order.push_back(back);
    return order;
  }

  // The outports an inport may use, in the order they are tried.
  std::vector<EdgeId> candidates(NodeId v, EdgeId inport) const {
    auto order = base_order(v, inport);
    const std::size_t j = std::min(start(v, inport), order.size());
    std::vector<EdgeId> out(order.begin() + static_cast<std::ptrdiff_t>(j), order.end());
    const auto& pins = table(v).pinned;
    if (auto it = pins.find(inport); it != pins.end()) {
      std::erase(out, it->second);
      out.insert(out.begin(), it->second);
    }
    return out;
  }

  bool operator==(const ForwardingState&) const = default;

 private:
  Flow flow_;
  ForwardingMode mode_;
  std::vector<NodeTable> tables_;
};

struct Hop {
  NodeId node;
  EdgeId inport;
  EdgeId outport;

  bool operator==(const Hop&) const = default;
};

enum class Outcome { kDelivered, kDropped, kLoopDetected };

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::kDelivered: return "delivered";
    case Outcome::kDropped: return "dropped";
    case Outcome::kLoopDetected: return "loop";
  }
  return "?";
}

// The walk of one probe packet. For Dropped, (end_node, end_inport) is where
// no viable outport was left; for LoopDetected it is the repeated arrival.
struct Trace {
  std::vector<Hop> hops;
  Outcome outcome = Outcome::kDropped;
  NodeId end_node{};
  EdgeId end_inport = kInjectionPort;

  bool delivered() const { return outcome == Outcome::kDelivered; }

  std::vector<NodeId> nodes() const {
    std::vector<NodeId> out;
    for (const Hop& h : hops) out.push_back(h.node);
    out.push_back(end_node);
    return out;
  }

  std::vector<EdgeId> edges() const {
    std::vector<EdgeId> out;
    for (const Hop& h : hops) out.push_back(h.outport);
    return out;
  }

  bool operator==(const Trace&) const = default;
};

inline std::string path_string(const Topology& t, const Trace& tr) {
  std::string s;
  for (NodeId v : tr.nodes()) {
    if (!s.empty()) s += '-';
    s += t.name(v);
  }
  return s;
}

// Walks a packet of state.flow() from `start` (default: the flow source),
// arriving on `start_inport` (default: injection). Only failures incident to
// the current node influence its decision, which is automatic here because
// every candidate is an outgoing edge of that node.
inline Trace route(const ForwardingState& state, const Topology& t,
                   const FailureSet& failures, std::optional<NodeId> start = std::nullopt,
                   EdgeId start_inport = kInjectionPort) {
  const NodeId origin = start.value_or(state.flow().source);
  if (index(origin) >= t.node_count()) throw Error("route: unknown start node");
  if (failures.node_failed(origin)) throw Error("route: start node has failed");
  const NodeId target = state.flow().destination;

  Trace tr;
  std::vector<bool> arrived(t.edge_count(), false);
  NodeId v = origin;
  EdgeId in = start_inport;
  const std::size_t cap = t.edge_count() + 1;
  while (true) {
    if (v == target) {
      tr.outcome = Outcome::kDelivered;
      break;
    }
    if (in != kInjectionPort) {
      if (arrived[index(in)]) {
        tr.outcome = Outcome::kLoopDetected;
        break;
      }
      arrived[index(in)] = true;
    }
    std::optional<EdgeId> out;
    for (EdgeId e : state.candidates(v, in)) {
      if (!failures.edge_failed(t, e)) {
        out = e;
        break;
      }
    }
    if (!out) {
      tr.outcome = Outcome::kDropped;
      break;
    }
    if (tr.hops.size() >= cap) {
      tr.outcome = Outcome::kLoopDetected;
      break;
    }
    tr.hops.push_back({v, in, *out});
    in = *out;
    v = t.head(*out);
  }
  tr.end_node = v;
  tr.end_inport = in;
  return tr;
}

struct TraceStats {
  std::size_t hop_count = 0;
  std::map<NodeId, int> visits_per_node;
  std::set<NodeId> looped_nodes;
  std::set<EdgeId> directed_edges_used;
};

inline TraceStats trace_stats(const Trace& tr) {
  TraceStats s;
  s.hop_count = tr.hops.size();
  for (NodeId v : tr.nodes()) {
    if (++s.visits_per_node[v] >= 2) s.looped_nodes.insert(v);
  }
  for (const Hop& h : tr.hops) s.directed_edges_used.insert(h.outport);
  return s;
}

inline bool is_simple_path(const Trace& tr) {
  return tr.delivered() && trace_stats(tr).looped_nodes.empty();
}

}  // namespace frrsim
