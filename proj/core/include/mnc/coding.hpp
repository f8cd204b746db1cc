#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "mnc/types.hpp"

namespace mnc {

enum class PacketKind { Native, Coded };
enum class SizeClass { Small, Large };

inline constexpr std::uint32_t kDefaultSmallThreshold = 100;
inline constexpr double kDefaultGuessThreshold = 0.8;

constexpr SizeClass classify(std::uint32_t length,
                             std::uint32_t small_threshold = kDefaultSmallThreshold) noexcept {
  return length < small_threshold ? SizeClass::Small : SizeClass::Large;
}

/// Per-native annotation. A coded packet carries one per constituent so that
/// receivers can restore the exact length and pick up the forward list.
struct NativeHeader {
  PacketId id = 0;
  NodeId origin = 0;
  std::uint32_t length = 0;
  double delay_tolerance = 0.0;
  NodeList forward_list;

  friend bool operator==(const NativeHeader&, const NativeHeader&) = default;
};

struct Packet {
  PacketId id = 0;
  NodeId origin = 0;
  PacketKind kind = PacketKind::Native;
  SizeClass size_class = SizeClass::Small;
  std::uint32_t length = 0;
  Bytes payload;
  /// Empty for natives; >= 2 entries for coded packets.
  std::vector<NativeHeader> constituents;
  double delay_tolerance = 0.0;
  NodeList forward_list;
  /// N(N(sender)); attached under TDP.
  std::optional<NodeSet> sender_two_hop;
  std::set<PacketId> reception_report;

  bool is_native() const noexcept { return kind == PacketKind::Native; }
  /// Native ids this transmission carries (the packet itself for a native).
  std::vector<PacketId> carried_ids() const;
  NativeHeader header() const;

  static Packet make_native(PacketId id, NodeId origin, Bytes payload, double delay_tolerance,
                            std::uint32_t small_threshold = kDefaultSmallThreshold);
};

/// Per-node COPE state: output FIFO with size-class views, packet pool,
/// neighbour possession table, timers and coded packets awaiting a decode.
class NodeState {
 public:
  explicit NodeState(NodeId node, std::uint32_t small_threshold = kDefaultSmallThreshold)
      : node_(node), small_threshold_(small_threshold) {}

  NodeId node() const noexcept { return node_; }
  std::uint32_t small_threshold() const noexcept { return small_threshold_; }

  // Output queue.
  bool enqueue(const Packet& packet);
  const std::deque<PacketId>& output_queue() const noexcept { return queue_; }
  /// FIFO view of the output queue restricted to one size class.
  std::vector<PacketId> virtual_queue(SizeClass size_class) const;
  bool queued(PacketId id) const;
  bool remove_from_queue(PacketId id);
  /// Moves a queued id to the tail.
  void requeue(PacketId id);

  // Packet pool (natives only).
  bool has(PacketId id) const { return pool_.contains(id); }
  const Packet& packet(PacketId id) const;
  const Packet* find(PacketId id) const;
  /// Returns false if the id was already pooled.
  bool store(Packet packet);
  std::set<PacketId> pool_ids() const;
  const std::map<PacketId, Packet>& pool() const noexcept { return pool_; }

  // Possession table, values in [0,1], monotone non-decreasing.
  double possession(NodeId neighbor, PacketId id) const;
  void raise_possession(NodeId neighbor, PacketId id, double probability);
  void confirm(NodeId neighbor, PacketId id) { raise_possession(neighbor, id, 1.0); }

  // Timers keyed by packet id.
  void set_timer(PacketId id, Tick expiry) { timers_.emplace(id, expiry); }
  std::optional<Tick> timer(PacketId id) const;
  void clear_timer(PacketId id) {
    timers_.erase(id);
    expired_.erase(id);
  }
  bool expired(PacketId id) const { return expired_.contains(id); }
  void mark_expired(PacketId id) { expired_.insert(id); }
  const std::map<PacketId, Tick>& timers() const noexcept { return timers_; }

  // Coded packets with two or more unknown constituents.
  void defer_coded(Packet coded, NodeId sender) { deferred_.emplace_back(std::move(coded), sender); }
  std::vector<std::pair<Packet, NodeId>>& deferred() noexcept { return deferred_; }
  const std::vector<std::pair<Packet, NodeId>>& deferred() const noexcept { return deferred_; }

 private:
  NodeId node_;
  std::uint32_t small_threshold_;
  std::deque<PacketId> queue_;
  std::map<PacketId, Packet> pool_;
  std::map<std::pair<NodeId, PacketId>, double> possession_;
  std::map<PacketId, Tick> timers_;
  std::set<PacketId> expired_;
  std::vector<std::pair<Packet, NodeId>> deferred_;
};

/// Appends a native to the output queue and pools it. A duplicate id is a no-op
/// returning false.
bool enqueue(NodeState& state, const Packet& packet);

/// Delivery estimate of the link from the observed sender to a neighbour that
/// both the sender and this node can hear.
struct LinkEstimate {
  NodeId neighbor = 0;
  double delivery = 0.0;
};

/// Learns neighbour state from an observed transmission: the sender holds
/// everything it reports and everything it carried; each common neighbour
/// holds the carried natives with the sender's link delivery probability.
/// Natives are also pooled (opportunistic listening).
void update_nbr_recv_table(NodeState& state, const Packet& observed, NodeId sender,
                           std::span<const LinkEstimate> common_neighbors = {});

/// True iff every listed neighbour is confirmed (probability exactly 1).
bool all_nbrs_have(const NodeState& state, PacketId id, const NodeSet& neighbors);

constexpr bool guess_possession(double probability, double guess_threshold) noexcept {
  return probability >= guess_threshold;
}

/// A neighbour can decode when it misses at most one constituent.
bool can_decode(const std::set<PacketId>& known, const std::set<PacketId>& coded_ids);

struct CodeSet {
  std::vector<PacketId> members;
  Bytes encoded;
};

/// Greedy COPE code-set search starting from the head of the output queue.
/// Scans the head's own size class first, then the other. Size 1 means no
/// coding opportunity. Requires a non-empty queue.
CodeSet obtain_code_set(const NodeState& state, const NodeSet& neighbors, double guess_threshold);

using PacketLookup = std::function<const Packet&(PacketId)>;

/// XOR of the zero-padded member payloads. A single member yields the native
/// itself. Throws std::invalid_argument on an empty member list.
Packet encode(const PacketLookup& pool, std::span<const PacketId> members,
              std::uint32_t small_threshold = kDefaultSmallThreshold);

/// Pool-side decode. Returns the recovered native (already pooled) when
/// exactly one constituent is unknown; nothing when redundant; defers the
/// coded packet when two or more are unknown.
std::optional<Packet> decode(NodeState& state, const Packet& coded, NodeId sender = 0);

/// Retries deferred coded packets until no more progress; returns every
/// native recovered together with the sender of the coded packet.
std::vector<std::pair<Packet, NodeId>> retry_deferred(NodeState& state);

/// Bytewise XOR of b into a, growing a with zeros if b is longer.
void xor_into(Bytes& a, std::span<const std::uint8_t> b);

}  // namespace mnc
