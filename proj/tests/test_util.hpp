#pragma once

#include <string>
#include <vector>

#include "frrsim/frrsim.hpp"

namespace testutil {

inline frrsim::FailureSet fail(const frrsim::Topology& t, const std::string& a,
                               const std::string& b) {
  return frrsim::FailureSet::link(*t.link_between(t.node(a), t.node(b)));
}

inline frrsim::EdgeId edge(const frrsim::Topology& t, const std::string& a, const std::string& b) {
  return *t.edge_between(t.node(a), t.node(b));
}

inline std::vector<frrsim::NodeId> path(const frrsim::Topology& t,
                                        std::initializer_list<const char*> names) {
  std::vector<frrsim::NodeId> p;
  for (const char* n : names) p.push_back(t.node(n));
  return p;
}

inline frrsim::Topology triangle() {
  return frrsim::Topology({"a", "b", "c"}, {{"a", "b"}, {"b", "c"}, {"a", "c"}});
}

inline frrsim::Topology square() {
  return frrsim::Topology({"a", "b", "c", "d"}, {{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
}

inline frrsim::Topology line(int n) {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> links;
  for (int i = 0; i < n; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  for (int i = 0; i + 1 < n; ++i) links.emplace_back(names[i], names[i + 1]);
  return frrsim::Topology(names, links);
}

// The families the loop-freedom suites quantify over.
struct Family {
  std::string name;
  frrsim::Topology topo;
};

inline std::vector<Family> small_families() {
  return {{"complete4", frrsim::complete_graph(4)},
          {"complete5", frrsim::complete_graph(5)},
          {"hypercube3", frrsim::hypercube(3)},
          {"torus3x3", frrsim::torus(3, 3)}};
}

}  // namespace testutil
