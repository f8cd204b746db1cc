#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mnc/types.hpp"

namespace mnc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by load_topology; carries the 1-based line number of the offending line.
class TopologyParseError : public TopologyError {
 public:
  TopologyParseError(std::size_t line, const std::string& what)
      : TopologyError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Static undirected graph over dense node ids 0..n-1.
///
/// Adjacency is symmetric and irreflexive. When the topology was built from
/// positions, edge (a,b) exists iff the euclidean distance is at most the
/// radio range. Immutable after construction.
class Topology {
 public:
  using Edge = std::pair<NodeId, NodeId>;

  /// Throws TopologyError on self-loops or out-of-range ids. Duplicate and
  /// reversed edges collapse.
  static Topology from_edges(std::size_t node_count, std::span<const Edge> edges,
                             std::vector<Point> positions = {});

  /// Unit-disk graph over the given positions.
  static Topology from_positions(std::vector<Point> positions, double radio_range);

  std::size_t node_count() const noexcept { return adjacency_.size(); }
  std::size_t edge_count() const noexcept { return edge_count_; }

  /// Open neighbourhood of v, ascending.
  const std::vector<NodeId>& adjacency(NodeId v) const;
  bool adjacent(NodeId a, NodeId b) const;
  bool contains(NodeId v) const noexcept { return v < node_count(); }

  bool has_positions() const noexcept { return !positions_.empty(); }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  std::optional<double> radio_range() const noexcept { return radio_range_; }

  std::vector<Edge> edges() const;

  friend bool operator==(const Topology&, const Topology&) = default;

 private:
  std::vector<std::vector<NodeId>> adjacency_;
  std::vector<Point> positions_;
  std::optional<double> radio_range_;
  std::size_t edge_count_ = 0;
};

/// Closed one-hop set N(v) and two-hop set N(N(v)) of a node.
struct NeighborView {
  NodeId owner = 0;
  NodeSet one_hop;
  NodeSet two_hop;
};

/// n nodes placed uniformly in [0, area]^2, unit-disk adjacency. Pure function
/// of its arguments.
Topology generate_random_topology(std::size_t n, double area, double radio_range,
                                  std::uint64_t seed);

/// Keeps drawing placements from the seeded stream until one is connected.
/// Throws TopologyError after max_attempts placements.
Topology generate_connected_topology(std::size_t n, double area, double radio_range,
                                     std::uint64_t seed, std::size_t max_attempts = 100000);

/// Parses the edge-list format:
///   nodes <n>          (optional, must precede edges; otherwise n = max id + 1)
///   <a> <b>            (one undirected edge)
///   pos <v> <x> <y>    (optional; all nodes or none)
/// '#' starts a comment.
Topology load_topology(std::string_view text);

/// Inverse of load_topology.
std::string save_topology(const Topology& topology);

NeighborView neighbor_view(const Topology& topology, NodeId v);

bool is_connected(const Topology& topology);

/// Precomputed neighbour views for every node.
class NeighborTable {
 public:
  explicit NeighborTable(const Topology& topology);

  const NeighborView& operator[](NodeId v) const;
  const NodeSet& one_hop(NodeId v) const { return (*this)[v].one_hop; }
  const NodeSet& two_hop(NodeId v) const { return (*this)[v].two_hop; }
  std::size_t size() const noexcept { return views_.size(); }

 private:
  std::vector<NeighborView> views_;
};

/// 40-node connected demo network (area 100, range 30); node 31 is the
/// conventional broadcast source.
inline constexpr std::size_t kDemoNodeCount = 40;
inline constexpr double kDemoArea = 100.0;
inline constexpr double kDemoRange = 30.0;
inline constexpr NodeId kDemoSource = 31;
Topology demo_topology();

}  // namespace mnc
