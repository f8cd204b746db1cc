#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>

#include "mnc/topology.hpp"
#include "mnc/types.hpp"

namespace mnc {

enum class Protocol { Flood, DP, TDP, PDP };

std::string_view to_string(Protocol protocol);
std::optional<Protocol> parse_protocol(std::string_view name);

/// B(u,v) and U(u,v): who may forward, and which nodes must be covered.
struct CoverageSets {
  NodeSet candidates;
  NodeSet coverage;
};

struct ForwardDecision {
  NodeSet candidate_set;
  NodeSet coverage_set;
  /// Selection order is significant; it is what gets piggybacked.
  NodeList forward_list;
  /// Nodes of coverage_set that no candidate reaches.
  NodeSet uncovered;
};

/// Closed one-hop set lookup used by the set-cover routines.
using OneHopLookup = std::function<const NodeSet&(NodeId)>;

OneHopLookup one_hop_lookup(const NeighborTable& table);

/// Throws std::invalid_argument for FLOOD or when sender is given but not
/// adjacent to relay.
CoverageSets coverage_sets(Protocol protocol, const NeighborTable& table,
                           std::optional<NodeId> sender, NodeId relay);
CoverageSets coverage_sets(Protocol protocol, const Topology& topology,
                           std::optional<NodeId> sender, NodeId relay);

/// Greedy set cover: repeatedly takes the candidate covering the most
/// still-uncovered nodes (smallest id on ties) until nothing reachable remains.
ForwardDecision greedy_forward_set(const NodeSet& candidates, const NodeSet& coverage,
                                   const OneHopLookup& one_hop);

inline constexpr std::size_t kBruteForceCandidateLimit = 20;

/// Exhaustive minimum cover of the reachable part of `coverage`; ties go to
/// the lexicographically smallest sorted id list. Test oracle only.
/// Throws std::invalid_argument when |candidates| exceeds the limit.
ForwardDecision brute_force_min_forward_set(const NodeSet& candidates, const NodeSet& coverage,
                                            const OneHopLookup& one_hop);

ForwardDecision select_forwarders(Protocol protocol, const NeighborTable& table,
                                  std::optional<NodeId> sender, NodeId relay);
ForwardDecision select_forwarders(Protocol protocol, const Topology& topology,
                                  std::optional<NodeId> sender, NodeId relay);

}  // namespace mnc
