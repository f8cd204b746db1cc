#include "mnc/pruning.hpp"

#include <algorithm>
#include <iterator>
#include <stdexcept>
#include <string>

namespace mnc {

std::string_view to_string(Protocol protocol) {
  switch (protocol) {
    case Protocol::Flood: return "flood";
    case Protocol::DP: return "dp";
    case Protocol::TDP: return "tdp";
    case Protocol::PDP: return "pdp";
  }
  return "?";
}

std::optional<Protocol> parse_protocol(std::string_view name) {
  for (Protocol p : {Protocol::Flood, Protocol::DP, Protocol::TDP, Protocol::PDP}) {
    if (to_string(p) == name) return p;
  }
  return std::nullopt;
}

OneHopLookup one_hop_lookup(const NeighborTable& table) {
  return [&table](NodeId v) -> const NodeSet& { return table.one_hop(v); };
}

namespace {

NodeSet minus(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

NodeSet intersect(const NodeSet& a, const NodeSet& b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::size_t overlap(const NodeSet& a, const NodeSet& b) {
  std::size_t count = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++count;
      ++ia;
      ++ib;
    }
  }
  return count;
}

NodeSet reachable(const NodeSet& candidates, const OneHopLookup& one_hop) {
  NodeSet out;
  for (NodeId b : candidates) {
    const NodeSet& n = one_hop(b);
    out.insert(n.begin(), n.end());
  }
  return out;
}

}  // namespace

CoverageSets coverage_sets(Protocol protocol, const NeighborTable& table,
                           std::optional<NodeId> sender, NodeId relay) {
  if (protocol == Protocol::Flood) {
    throw std::invalid_argument("flooding has no coverage sets");
  }
  const NeighborView& v = table[relay];
  CoverageSets out;
  if (!sender) {
    out.candidates = minus(v.one_hop, NodeSet{relay});
    out.coverage = minus(v.two_hop, v.one_hop);
    return out;
  }
  const NeighborView& u = table[*sender];
  if (*sender == relay || !v.one_hop.contains(*sender)) {
    throw std::invalid_argument("sender " + std::to_string(*sender) + " is not a neighbour of " +
                                std::to_string(relay));
  }
  out.candidates = minus(v.one_hop, u.one_hop);
  switch (protocol) {
    case Protocol::DP:
      out.coverage = minus(minus(v.two_hop, u.one_hop), v.one_hop);
      break;
    case Protocol::TDP:
      out.coverage = minus(v.two_hop, u.two_hop);
      break;
    case Protocol::PDP: {
      NodeSet shared_reach;
      for (NodeId w : intersect(u.one_hop, v.one_hop)) {
        const NodeSet& n = table.one_hop(w);
        shared_reach.insert(n.begin(), n.end());
      }
      out.coverage = minus(minus(minus(v.two_hop, u.one_hop), v.one_hop), shared_reach);
      break;
    }
    case Protocol::Flood:
      break;
  }
  return out;
}

CoverageSets coverage_sets(Protocol protocol, const Topology& topology,
                           std::optional<NodeId> sender, NodeId relay) {
  return coverage_sets(protocol, NeighborTable(topology), sender, relay);
}

ForwardDecision greedy_forward_set(const NodeSet& candidates, const NodeSet& coverage,
                                   const OneHopLookup& one_hop) {
  ForwardDecision d;
  d.candidate_set = candidates;
  d.coverage_set = coverage;
  const NodeSet reach = reachable(candidates, one_hop);
  d.uncovered = minus(coverage, reach);
  NodeSet remaining = intersect(coverage, reach);
  NodeSet pool = candidates;
  while (!remaining.empty()) {
    std::size_t best_gain = 0;
    NodeId best = 0;
    // Ascending scan with strict '>' keeps the smallest id on ties.
    for (NodeId b : pool) {
      const std::size_t gain = overlap(one_hop(b), remaining);
      if (gain > best_gain) {
        best_gain = gain;
        best = b;
      }
    }
    if (best_gain == 0) break;
    d.forward_list.push_back(best);
    pool.erase(best);
    remaining = minus(remaining, one_hop(best));
  }
  return d;
}

ForwardDecision brute_force_min_forward_set(const NodeSet& candidates, const NodeSet& coverage,
                                            const OneHopLookup& one_hop) {
  if (candidates.size() > kBruteForceCandidateLimit) {
    throw std::invalid_argument("brute force limited to " +
                                std::to_string(kBruteForceCandidateLimit) + " candidates");
  }
  ForwardDecision d;
  d.candidate_set = candidates;
  d.coverage_set = coverage;
  const NodeSet reach = reachable(candidates, one_hop);
  d.uncovered = minus(coverage, reach);
  const NodeSet target = intersect(coverage, reach);
  if (target.empty()) return d;

  const std::vector<NodeId> pool(candidates.begin(), candidates.end());
  const std::size_t n = pool.size();
  // Combinations of each size in lexicographic order; the first cover found
  // at the smallest size is the answer.
  for (std::size_t k = 1; k <= n; ++k) {
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      NodeSet covered;
      for (std::size_t i : idx) {
        const NodeSet& s = one_hop(pool[i]);
        covered.insert(s.begin(), s.end());
      }
      if (std::includes(covered.begin(), covered.end(), target.begin(), target.end())) {
        for (std::size_t i : idx) d.forward_list.push_back(pool[i]);
        return d;
      }
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return d;
}

ForwardDecision select_forwarders(Protocol protocol, const NeighborTable& table,
                                  std::optional<NodeId> sender, NodeId relay) {
  if (protocol == Protocol::Flood) {
    ForwardDecision d;
    const NeighborView& v = table[relay];
    d.candidate_set = v.one_hop;
    d.candidate_set.erase(relay);
    d.forward_list.assign(d.candidate_set.begin(), d.candidate_set.end());
    return d;
  }
  const CoverageSets sets = coverage_sets(protocol, table, sender, relay);
  return greedy_forward_set(sets.candidates, sets.coverage, one_hop_lookup(table));
}

ForwardDecision select_forwarders(Protocol protocol, const Topology& topology,
                                  std::optional<NodeId> sender, NodeId relay) {
  return select_forwarders(protocol, NeighborTable(topology), sender, relay);
}

}  // namespace mnc
