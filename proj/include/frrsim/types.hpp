#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace frrsim {

// Dense identifiers. Nodes are numbered in declaration order, links likewise;
// directed edge 2*l runs from the lower to the higher node index of link l,
// 2*l+1 the other way.
enum class NodeId : std::uint32_t {};
enum class LinkId : std::uint32_t {};
enum class EdgeId : std::uint32_t {};

constexpr std::size_t index(NodeId v) { return static_cast<std::size_t>(v); }
constexpr std::size_t index(LinkId l) { return static_cast<std::size_t>(l); }
constexpr std::size_t index(EdgeId e) { return static_cast<std::size_t>(e); }

constexpr NodeId node_id(std::size_t i) { return static_cast<NodeId>(i); }
constexpr LinkId link_id(std::size_t i) { return static_cast<LinkId>(i); }
constexpr EdgeId edge_id(std::size_t i) { return static_cast<EdgeId>(i); }

constexpr LinkId link_of(EdgeId e) { return link_id(index(e) / 2); }
constexpr EdgeId reverse(EdgeId e) { return edge_id(index(e) ^ 1U); }

// The virtual port a packet "arrives" on when it is injected at a node.
inline constexpr EdgeId kInjectionPort =
    static_cast<EdgeId>(std::numeric_limits<std::uint32_t>::max());

inline constexpr int kUnreachable = -1;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace frrsim
