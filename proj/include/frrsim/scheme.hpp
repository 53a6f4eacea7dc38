#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "frrsim/frr.hpp"

namespace frrsim {

enum class SchemeKind { kArborescence, kPartition, kGreedy };

NLOHMANN_JSON_SERIALIZE_ENUM(SchemeKind, {
                                             {SchemeKind::kArborescence, "arborescence"},
                                             {SchemeKind::kPartition, "partition"},
                                             {SchemeKind::kGreedy, "greedy"},
                                         })

struct SchemeSpec {
  SchemeKind kind = SchemeKind::kArborescence;
  // Arborescence count (default: edge connectivity) or number of partition
  // paths (default: s-t max-flow). Unused by greedy.
  std::optional<int> k;
  // Partition only: explicit paths per flow id, as node names.
  std::map<std::string, std::vector<std::vector<std::string>>> paths;

  bool operator==(const SchemeSpec&) const = default;
};

// Compiles per-flow forwarding state for one topology, caching the
// arborescence packing per destination.
class SchemeCompiler {
 public:
  SchemeCompiler(const Topology& t, SchemeSpec spec) : topo_(t), spec_(std::move(spec)) {
    if (spec_.k && *spec_.k < 1) throw Error("scheme: k must be positive");
  }

  const SchemeSpec& spec() const { return spec_; }

  std::size_t arborescence_count() const {
    if (!lambda_) lambda_ = edge_connectivity(topo_);
    return static_cast<std::size_t>(spec_.k.value_or(*lambda_));
  }

  const std::vector<Arborescence>& arborescences(NodeId root) {
    auto it = packings_.find(root);
    if (it == packings_.end()) {
      it = packings_.emplace(root, decompose_arborescences(topo_, root, arborescence_count())).first;
    }
    return it->second;
  }

  PartitionScheme partition(const Flow& f) const {
    if (auto it = spec_.paths.find(f.id); it != spec_.paths.end()) {
      PartitionScheme ps;
      for (const auto& names : it->second) {
        std::vector<NodeId> path;
        for (const auto& n : names) path.push_back(topo_.node(n));
        ps.paths.push_back(std::move(path));
      }
      validate_partition_scheme(topo_, ps, f);
      return ps;
    }
    int k = 0;
    if (spec_.k) {
      k = *spec_.k;
    } else {
      FlowNetwork net(topo_.node_count());
      for (std::size_t e = 0; e < topo_.edge_count(); ++e) {
        net.add_arc(index(topo_.tail(edge_id(e))), index(topo_.head(edge_id(e))), 1);
      }
      k = net.max_flow(index(f.source), index(f.destination));
    }
    return compute_disjoint_paths(topo_, f, static_cast<std::size_t>(k));
  }

  ForwardingState compile(const Flow& f) {
    switch (spec_.kind) {
      case SchemeKind::kArborescence:
        return compile_arborescence_frr(topo_, arborescences(f.destination), f);
      case SchemeKind::kPartition: return compile_partition_frr(topo_, partition(f), f);
      case SchemeKind::kGreedy: return compile_greedy_frr(topo_, f);
    }
    throw Error("scheme: unknown kind");
  }

 private:
  const Topology& topo_;
  SchemeSpec spec_;
  mutable std::optional<int> lambda_;
  std::map<NodeId, std::vector<Arborescence>> packings_;
};

// The two routes printed in the motivating example: the default route via S2
// and the alternative via S3, sharing the S-S1 and S4-D segments.
inline PartitionScheme figure1_partition_scheme(const Topology& t) {
  auto path = [&t](std::initializer_list<const char*> names) {
    std::vector<NodeId> p;
    for (const char* n : names) p.push_back(t.node(n));
    return p;
  };
  return {{path({"S", "S1", "S2", "S4", "D"}), path({"S", "S1", "S3", "S4", "D"})}};
}

}  // namespace frrsim
