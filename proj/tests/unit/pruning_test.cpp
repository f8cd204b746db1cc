#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "graphs.hpp"
#include "mnc/pruning.hpp"
#include "mnc/topology.hpp"

namespace mnc {
namespace {

using testing::complete_graph;
using testing::path_graph;
using testing::star_graph;

OneHopLookup lookup_from(const std::map<NodeId, NodeSet>& m) {
  return [&m](NodeId v) -> const NodeSet& { return m.at(v); };
}

bool subset(const NodeSet& a, const NodeSet& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

TEST(Protocol, NamesRoundTrip) {
  for (Protocol p : {Protocol::Flood, Protocol::DP, Protocol::TDP, Protocol::PDP}) {
    EXPECT_EQ(parse_protocol(to_string(p)), p);
  }
  EXPECT_FALSE(parse_protocol("mpr").has_value());
}

TEST(CoverageSets, PathDpExample) {
  const auto c = coverage_sets(Protocol::DP, path_graph(5), NodeId{1}, 2);
  EXPECT_EQ(c.candidates, NodeSet{3});
  EXPECT_EQ(c.coverage, NodeSet{4});
}

TEST(CoverageSets, PathTdpEqualsDpHere) {
  const auto c = coverage_sets(Protocol::TDP, path_graph(5), NodeId{1}, 2);
  EXPECT_EQ(c.candidates, NodeSet{3});
  EXPECT_EQ(c.coverage, NodeSet{4});
}

TEST(CoverageSets, CompleteGraphRelayHasNothingToCover) {
  const Topology k5 = complete_graph(5);
  for (Protocol p : {Protocol::DP, Protocol::TDP, Protocol::PDP}) {
    for (NodeId u = 0; u < 5; ++u) {
      for (NodeId v = 0; v < 5; ++v) {
        if (u == v) continue;
        EXPECT_TRUE(coverage_sets(p, k5, u, v).coverage.empty());
      }
    }
  }
}

TEST(CoverageSets, SourceCase) {
  const auto c = coverage_sets(Protocol::DP, path_graph(5), std::nullopt, 2);
  EXPECT_EQ(c.candidates, (NodeSet{1, 3}));
  EXPECT_EQ(c.coverage, (NodeSet{0, 4}));
}

TEST(CoverageSets, Errors) {
  EXPECT_THROW(coverage_sets(Protocol::DP, path_graph(5), NodeId{0}, 2), std::invalid_argument);
  EXPECT_THROW(coverage_sets(Protocol::Flood, path_graph(5), NodeId{1}, 2), std::invalid_argument);
}

TEST(CoverageSets, SubsetRelationsOnRandomGraphs) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Topology t = generate_random_topology(25, 100.0, 30.0, seed);
    const NeighborTable table(t);
    for (NodeId v = 0; v < t.node_count(); ++v) {
      for (NodeId u : t.adjacency(v)) {
        const auto dp = coverage_sets(Protocol::DP, table, u, v);
        const auto tdp = coverage_sets(Protocol::TDP, table, u, v);
        const auto pdp = coverage_sets(Protocol::PDP, table, u, v);
        EXPECT_TRUE(subset(tdp.coverage, dp.coverage));
        EXPECT_TRUE(subset(pdp.coverage, dp.coverage));
        EXPECT_EQ(dp.candidates, tdp.candidates);
        EXPECT_EQ(dp.candidates, pdp.candidates);
      }
    }
  }
}

TEST(GreedyForwardSet, EmptyCoverage) {
  const std::map<NodeId, NodeSet> m{{1, {0, 1}}};
  EXPECT_TRUE(greedy_forward_set({1}, {}, lookup_from(m)).forward_list.empty());
}

TEST(GreedyForwardSet, PathExample) {
  const std::map<NodeId, NodeSet> m{{3, {2, 3, 4}}};
  const auto d = greedy_forward_set({3}, {4}, lookup_from(m));
  EXPECT_EQ(d.forward_list, NodeList{3});
  EXPECT_TRUE(d.uncovered.empty());
}

TEST(GreedyForwardSet, OrderByMarginalGain) {
  // Node 7 covers three targets, node 2 covers one disjoint target.
  const std::map<NodeId, NodeSet> m{{2, {2, 13}}, {7, {7, 10, 11, 12}}};
  const auto d = greedy_forward_set({2, 7}, {10, 11, 12, 13}, lookup_from(m));
  EXPECT_EQ(d.forward_list, (NodeList{7, 2}));
}

TEST(GreedyForwardSet, TieBreaksOnSmallestId) {
  const std::map<NodeId, NodeSet> m{{4, {4, 10}}, {5, {5, 10}}};
  EXPECT_EQ(greedy_forward_set({4, 5}, {10}, lookup_from(m)).forward_list, NodeList{4});
}

TEST(GreedyForwardSet, ReportsUncoverableResidue) {
  const std::map<NodeId, NodeSet> m{{1, {1, 10}}};
  const auto d = greedy_forward_set({1}, {10, 20}, lookup_from(m));
  EXPECT_EQ(d.forward_list, NodeList{1});
  EXPECT_EQ(d.uncovered, NodeSet{20});
}

TEST(BruteForce, Examples) {
  const std::map<NodeId, NodeSet> m{{3, {2, 3, 4}}};
  EXPECT_TRUE(brute_force_min_forward_set({3}, {}, lookup_from(m)).forward_list.empty());
  EXPECT_EQ(brute_force_min_forward_set({3}, {4}, lookup_from(m)).forward_list, NodeList{3});
}

TEST(BruteForce, BeatsGreedyOnClassicTrap) {
  // Greedy picks 9 (covers 4) and then needs both 1 and 2; optimum is {1, 2}.
  const std::map<NodeId, NodeSet> m{
      {1, {1, 10, 11, 12}}, {2, {2, 13, 14, 15}}, {9, {9, 11, 12, 14, 15}}};
  const NodeSet u{10, 11, 12, 13, 14, 15};
  const auto greedy = greedy_forward_set({1, 2, 9}, u, lookup_from(m));
  const auto brute = brute_force_min_forward_set({1, 2, 9}, u, lookup_from(m));
  EXPECT_EQ(greedy.forward_list.size(), 3u);
  EXPECT_EQ(brute.forward_list, (NodeList{1, 2}));
}

TEST(BruteForce, LexicographicTieBreak) {
  const std::map<NodeId, NodeSet> m{{1, {1, 10}}, {2, {2, 10}}, {3, {3, 10}}};
  EXPECT_EQ(brute_force_min_forward_set({3, 2, 1}, {10}, lookup_from(m)).forward_list,
            NodeList{1});
}

TEST(BruteForce, RejectsTooManyCandidates) {
  std::map<NodeId, NodeSet> m;
  NodeSet b;
  for (NodeId v = 0; v < kBruteForceCandidateLimit + 1; ++v) {
    m[v] = {v};
    b.insert(v);
  }
  EXPECT_THROW(brute_force_min_forward_set(b, {0}, lookup_from(m)), std::invalid_argument);
}

TEST(SelectForwarders, FloodReturnsAllNeighbours) {
  const auto d = select_forwarders(Protocol::Flood, path_graph(5), NodeId{1}, 2);
  EXPECT_EQ(d.forward_list, (NodeList{1, 3}));
  EXPECT_TRUE(d.coverage_set.empty());
}

TEST(SelectForwarders, DenseGraphsNeedNoForwarders) {
  for (Protocol p : {Protocol::DP, Protocol::TDP, Protocol::PDP}) {
    EXPECT_TRUE(select_forwarders(p, complete_graph(5), std::nullopt, 0).forward_list.empty());
    EXPECT_TRUE(select_forwarders(p, star_graph(6), std::nullopt, 0).forward_list.empty());
  }
}

TEST(SelectForwarders, CoverCompletenessAndDeterminism) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Topology t = generate_random_topology(30, 100.0, 28.0, seed);
    const NeighborTable table(t);
    for (Protocol p : {Protocol::DP, Protocol::TDP, Protocol::PDP}) {
      for (NodeId v = 0; v < t.node_count(); ++v) {
        std::vector<std::optional<NodeId>> senders{std::nullopt};
        for (NodeId u : t.adjacency(v)) senders.emplace_back(u);
        for (const auto& u : senders) {
          const auto d = select_forwarders(p, table, u, v);
          EXPECT_EQ(d.forward_list, select_forwarders(p, table, u, v).forward_list);
          for (NodeId w : d.coverage_set) {
            const bool reachable = std::any_of(
                d.candidate_set.begin(), d.candidate_set.end(),
                [&](NodeId b) { return table.one_hop(b).contains(w); });
            const bool covered = std::any_of(
                d.forward_list.begin(), d.forward_list.end(),
                [&](NodeId f) { return table.one_hop(f).contains(w); });
            EXPECT_EQ(reachable, covered);
            EXPECT_EQ(!reachable, d.uncovered.contains(w));
          }
        }
      }
    }
  }
}

}  // namespace
}  // namespace mnc
