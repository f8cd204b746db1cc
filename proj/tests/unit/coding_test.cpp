#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <random>

#include "mnc/coding.hpp"

namespace mnc {
namespace {

Bytes pattern(std::size_t n, std::uint8_t seed) {
  Bytes b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = static_cast<std::uint8_t>(seed + 7 * i);
  return b;
}

Packet native(PacketId id, std::size_t length, double dt = 1.0, NodeId origin = 0) {
  return Packet::make_native(id, origin, pattern(length, static_cast<std::uint8_t>(id)), dt);
}

PacketLookup lookup_from(const std::map<PacketId, Packet>& pool) {
  return [&pool](PacketId id) -> const Packet& { return pool.at(id); };
}

TEST(Classify, ThresholdIsStrict) {
  EXPECT_EQ(classify(50), SizeClass::Small);
  EXPECT_EQ(classify(99), SizeClass::Small);
  EXPECT_EQ(classify(100), SizeClass::Large);
  EXPECT_EQ(classify(100, 200), SizeClass::Small);
}

TEST(Enqueue, SmallAndLargeVirtualQueues) {
  NodeState s(0);
  EXPECT_TRUE(enqueue(s, native(1, 50)));
  EXPECT_TRUE(enqueue(s, native(2, 100)));
  EXPECT_EQ(s.virtual_queue(SizeClass::Small), std::vector<PacketId>{1});
  EXPECT_EQ(s.virtual_queue(SizeClass::Large), std::vector<PacketId>{2});
  EXPECT_TRUE(s.has(1));
  EXPECT_TRUE(s.has(2));
}

TEST(Enqueue, DuplicateIsNoOp) {
  NodeState s(0);
  EXPECT_TRUE(enqueue(s, native(1, 50)));
  EXPECT_FALSE(enqueue(s, native(1, 50)));
  EXPECT_EQ(s.output_queue().size(), 1u);
}

TEST(Enqueue, RequeueMovesToTail) {
  NodeState s(0);
  enqueue(s, native(1, 50));
  enqueue(s, native(2, 50));
  s.requeue(1);
  EXPECT_EQ(s.output_queue(), (std::deque<PacketId>{2, 1}));
}

TEST(UpdateNbrRecvTable, NativeConfirmsSenderAndPools) {
  NodeState s(5);
  update_nbr_recv_table(s, native(1, 40), 3);
  EXPECT_EQ(s.possession(3, 1), 1.0);
  EXPECT_TRUE(s.has(1));
}

TEST(UpdateNbrRecvTable, ReceptionReportConfirms) {
  NodeState s(5);
  Packet p = native(1, 40);
  p.reception_report = {7, 8};
  update_nbr_recv_table(s, p, 3);
  EXPECT_EQ(s.possession(3, 7), 1.0);
  EXPECT_EQ(s.possession(3, 8), 1.0);
  EXPECT_TRUE(s.find(1)->reception_report.empty());
}

TEST(UpdateNbrRecvTable, CodedConfirmsEveryConstituent) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}, {2, native(2, 40)}};
  const std::vector<PacketId> members{1, 2};
  const Packet coded = encode(lookup_from(pool), members);
  NodeState s(5);
  update_nbr_recv_table(s, coded, 3);
  EXPECT_EQ(s.possession(3, 1), 1.0);
  EXPECT_EQ(s.possession(3, 2), 1.0);
  EXPECT_FALSE(s.has(1));
}

TEST(UpdateNbrRecvTable, CommonNeighboursGetLinkEstimate) {
  NodeState s(5);
  const std::vector<LinkEstimate> links{{4, 0.9}, {5, 0.7}};
  update_nbr_recv_table(s, native(1, 40), 3, links);
  EXPECT_DOUBLE_EQ(s.possession(4, 1), 0.9);
  EXPECT_EQ(s.possession(5, 1), 0.0);  // own entry untouched
}

TEST(Possession, IsMonotone) {
  NodeState s(0);
  s.raise_possession(1, 9, 0.6);
  s.raise_possession(1, 9, 0.3);
  EXPECT_DOUBLE_EQ(s.possession(1, 9), 0.6);
  s.confirm(1, 9);
  s.raise_possession(1, 9, 0.1);
  EXPECT_EQ(s.possession(1, 9), 1.0);
}

TEST(AllNbrsHave, Examples) {
  NodeState s(0);
  EXPECT_TRUE(all_nbrs_have(s, 1, {}));
  s.raise_possession(1, 1, 0.9);
  EXPECT_FALSE(all_nbrs_have(s, 1, {1}));
  s.confirm(1, 1);
  s.confirm(2, 1);
  EXPECT_TRUE(all_nbrs_have(s, 1, {1, 2}));
}

TEST(GuessPossession, Examples) {
  static_assert(guess_possession(0.8, 0.8));
  EXPECT_FALSE(guess_possession(0.0, 0.8));
  EXPECT_TRUE(guess_possession(1.0, 1.0));
  EXPECT_TRUE(guess_possession(1.0, 0.0));
}

TEST(CanDecode, Examples) {
  EXPECT_TRUE(can_decode({1}, {1, 2}));
  EXPECT_FALSE(can_decode({}, {1, 2}));
  EXPECT_TRUE(can_decode({1, 2, 3}, {1, 2, 3}));
}

TEST(ObtainCodeSet, SinglePacketIsNotCoded) {
  NodeState s(0);
  enqueue(s, native(1, 40));
  const auto c = obtain_code_set(s, {0, 1, 2}, 0.8);
  EXPECT_EQ(c.members, std::vector<PacketId>{1});
  EXPECT_EQ(c.encoded, s.packet(1).payload);
}

TEST(ObtainCodeSet, AliceAndBobRelay) {
  // Relay R=1 between A=0 and B=2; A knows its own p_A=10, B knows p_B=20.
  NodeState relay(1);
  enqueue(relay, native(10, 40));
  enqueue(relay, native(20, 40));
  relay.confirm(0, 10);
  relay.confirm(2, 20);
  const auto c = obtain_code_set(relay, {0, 1, 2}, 0.8);
  EXPECT_EQ(c.members, (std::vector<PacketId>{10, 20}));
}

TEST(ObtainCodeSet, ThrowsOnEmptyQueue) {
  NodeState s(0);
  EXPECT_THROW(obtain_code_set(s, {}, 0.8), std::invalid_argument);
}

TEST(ObtainCodeSet, PrefersSameSizeClassThenMixes) {
  NodeState s(0);
  enqueue(s, native(1, 40));
  enqueue(s, native(2, 300));
  enqueue(s, native(3, 40));
  // One neighbour knows everything except the head.
  for (PacketId id : {2u, 3u}) s.confirm(9, id);
  const auto c = obtain_code_set(s, {9}, 0.8);
  EXPECT_EQ(c.members, (std::vector<PacketId>{1, 3, 2}));
}

// Independent soundness oracle: every neighbour that lacks any member must be
// missing exactly one of them.
bool sound(const NodeState& s, const NodeSet& nbrs, const std::vector<PacketId>& members,
           double guess) {
  for (NodeId v : nbrs) {
    std::size_t unknown = 0;
    for (PacketId id : members) unknown += s.possession(v, id) >= guess ? 0 : 1;
    if (unknown > 1) return false;
  }
  return true;
}

TEST(ObtainCodeSet, NeverMergesThreeWhenANeighbourKnowsNeitherPartner) {
  // Exhaustive over knowledge of {p,q,r} by three neighbours, with neighbour 1
  // knowing neither q nor r.
  const std::vector<PacketId> ids{1, 2, 3};
  for (unsigned mask = 0; mask < (1u << 9); ++mask) {
    if ((mask >> 1) & 1u || (mask >> 2) & 1u) continue;
    NodeState s(0);
    for (PacketId id : ids) enqueue(s, native(id, 40));
    for (NodeId v = 1; v <= 3; ++v) {
      for (std::size_t k = 0; k < 3; ++k) {
        if ((mask >> ((v - 1) * 3 + k)) & 1u) s.confirm(v, ids[k]);
      }
    }
    const auto c = obtain_code_set(s, {0, 1, 2, 3}, 0.8);
    EXPECT_LT(c.members.size(), 3u) << "mask " << mask;
    EXPECT_EQ(c.members.front(), 1u);
    if (c.members.size() > 1) EXPECT_TRUE(sound(s, {1, 2, 3}, c.members, 0.8));
  }
}

TEST(ObtainCodeSet, RandomisedSoundness) {
  std::mt19937_64 rng(11);
  const std::vector<double> levels{0.0, 0.5, 0.79, 0.8, 0.95, 1.0};
  for (int trial = 0; trial < 500; ++trial) {
    NodeState s(0);
    const int n = 2 + static_cast<int>(rng() % 6);
    for (int i = 1; i <= n; ++i) enqueue(s, native(i, 20 + rng() % 200));
    NodeSet nbrs{0};
    for (NodeId v = 1; v <= 4; ++v) {
      nbrs.insert(v);
      for (int i = 1; i <= n; ++i) s.raise_possession(v, i, levels[rng() % levels.size()]);
    }
    const auto c = obtain_code_set(s, nbrs, 0.8);
    if (c.members.size() > 1) {
      EXPECT_TRUE(sound(s, {1, 2, 3, 4}, c.members, 0.8));
    }
  }
}

TEST(Encode, SingleMemberIsNative) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}};
  const std::vector<PacketId> members{1};
  const Packet p = encode(lookup_from(pool), members);
  EXPECT_TRUE(p.is_native());
  EXPECT_EQ(p.payload, pool.at(1).payload);
}

TEST(Encode, SelfXorIsZero) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}};
  const std::vector<PacketId> members{1, 1};
  const Packet p = encode(lookup_from(pool), members);
  EXPECT_EQ(p.payload, Bytes(40, 0));
}

TEST(Encode, MixedLengthsArePadded) {
  std::map<PacketId, Packet> pool{{1, native(1, 40, 0.9)}, {2, native(2, 200, 0.5)}};
  const std::vector<PacketId> members{1, 2};
  const Packet c = encode(lookup_from(pool), members);
  ASSERT_EQ(c.payload.size(), 200u);
  for (std::size_t i = 0; i < 40; ++i) {
    EXPECT_EQ(c.payload[i], pool.at(1).payload[i] ^ pool.at(2).payload[i]);
  }
  for (std::size_t i = 40; i < 200; ++i) EXPECT_EQ(c.payload[i], pool.at(2).payload[i]);
  EXPECT_EQ(c.size_class, SizeClass::Large);
  EXPECT_DOUBLE_EQ(c.delay_tolerance, 0.5);
  EXPECT_EQ(c.carried_ids(), members);
}

TEST(Encode, EmptyMembersIsError) {
  std::map<PacketId, Packet> pool;
  EXPECT_THROW(encode(lookup_from(pool), {}), std::invalid_argument);
}

TEST(Decode, RecoversMissingConstituent) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}, {2, native(2, 200)}};
  const std::vector<PacketId> members{1, 2};
  const Packet c = encode(lookup_from(pool), members);

  NodeState has_small(0);
  has_small.store(pool.at(1));
  const auto big = decode(has_small, c);
  ASSERT_TRUE(big.has_value());
  EXPECT_EQ(big->payload, pool.at(2).payload);

  NodeState has_big(0);
  has_big.store(pool.at(2));
  const auto small = decode(has_big, c);
  ASSERT_TRUE(small.has_value());
  EXPECT_EQ(small->payload, pool.at(1).payload);  // truncated to 40 bytes
  EXPECT_TRUE(has_big.has(1));
}

TEST(Decode, RedundantReturnsNothing) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}, {2, native(2, 40)}};
  const std::vector<PacketId> members{1, 2};
  NodeState s(0);
  s.store(pool.at(1));
  s.store(pool.at(2));
  EXPECT_FALSE(decode(s, encode(lookup_from(pool), members)).has_value());
  EXPECT_TRUE(s.deferred().empty());
}

TEST(Decode, DeferredUntilPartnerArrives) {
  std::map<PacketId, Packet> pool{{1, native(1, 40)}, {2, native(2, 60)}};
  const std::vector<PacketId> members{1, 2};
  NodeState s(0);
  EXPECT_FALSE(decode(s, encode(lookup_from(pool), members), 4).has_value());
  ASSERT_EQ(s.deferred().size(), 1u);
  EXPECT_TRUE(retry_deferred(s).empty());
  s.store(pool.at(1));
  const auto out = retry_deferred(s);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].first.id, 2u);
  EXPECT_EQ(out[0].second, 4u);
  EXPECT_EQ(out[0].first.payload, pool.at(2).payload);
  EXPECT_TRUE(s.deferred().empty());
}

TEST(Decode, RandomRoundTrips) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    std::map<PacketId, Packet> pool;
    const std::size_t n = 2 + rng() % 5;
    std::vector<PacketId> members;
    for (PacketId id = 1; id <= n; ++id) {
      Bytes b(1 + rng() % 300);
      for (auto& x : b) x = static_cast<std::uint8_t>(rng());
      pool.emplace(id, Packet::make_native(id, 0, std::move(b), 1.0));
      members.push_back(id);
    }
    const Packet c = encode(lookup_from(pool), members);
    const PacketId missing = members[rng() % n];
    NodeState s(0);
    for (PacketId id : members) {
      if (id != missing) s.store(pool.at(id));
    }
    const auto got = decode(s, c);
    ASSERT_TRUE(got.has_value());
    EXPECT_EQ(got->payload, pool.at(missing).payload);
    EXPECT_EQ(got->length, pool.at(missing).length);
  }
}

}  // namespace
}  // namespace mnc
