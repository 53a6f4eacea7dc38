#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace frrsim {

// Integer-capacity flow network solved with shortest augmenting paths
// (Edmonds-Karp). Every graph in this project is small and unit-capacity, so
// the simple algorithm is plenty; max_flow() additionally stops as soon as a
// caller-provided limit is reached.
class FlowNetwork {
 public:
  struct Arc {
    std::size_t to;
    int capacity;
    int flow;
  };

  explicit FlowNetwork(std::size_t node_count) : adjacency_(node_count) {}

  std::size_t node_count() const { return adjacency_.size(); }

  // Adds arc u->v plus its residual twin; returns the index of the forward
  // arc. The twin lives at index ^ 1.
  std::size_t add_arc(std::size_t u, std::size_t v, int capacity) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({v, capacity, 0});
    arcs_.push_back({u, 0, 0});
    adjacency_[u].push_back(id);
    adjacency_[v].push_back(id + 1);
    return id;
  }

  const Arc& arc(std::size_t id) const { return arcs_[id]; }
  int flow(std::size_t id) const { return arcs_[id].flow; }

  void reset() {
    for (auto& a : arcs_) a.flow = 0;
  }

  int max_flow(std::size_t source, std::size_t sink,
               int limit = std::numeric_limits<int>::max()) {
    if (source == sink) return limit;
    int total = 0;
    std::vector<std::size_t> via(adjacency_.size());
    std::vector<bool> seen(adjacency_.size());
    while (total < limit) {
      std::fill(seen.begin(), seen.end(), false);
      std::queue<std::size_t> frontier;
      frontier.push(source);
      seen[source] = true;
      while (!frontier.empty() && !seen[sink]) {
        const std::size_t u = frontier.front();
        frontier.pop();
        for (std::size_t id : adjacency_[u]) {
          const Arc& a = arcs_[id];
          if (!seen[a.to] && a.capacity - a.flow > 0) {
            seen[a.to] = true;
            via[a.to] = id;
            frontier.push(a.to);
          }
        }
      }
      if (!seen[sink]) break;
      int bottleneck = limit - total;
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1U].to) {
        const Arc& a = arcs_[via[v]];
        bottleneck = std::min(bottleneck, a.capacity - a.flow);
      }
      for (std::size_t v = sink; v != source; v = arcs_[via[v] ^ 1U].to) {
        arcs_[via[v]].flow += bottleneck;
        arcs_[via[v] ^ 1U].flow -= bottleneck;
      }
      total += bottleneck;
    }
    return total;
  }

 private:
  std::vector<Arc> arcs_;
  std::vector<std::vector<std::size_t>> adjacency_;
};

}  // namespace frrsim
