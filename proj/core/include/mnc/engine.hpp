#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mnc/coding.hpp"
#include "mnc/event_log.hpp"
#include "mnc/metrics.hpp"
#include "mnc/pruning.hpp"
#include "mnc/topology.hpp"

namespace mnc {

struct Thresholds {
  /// Coding is attempted only when Prob(p) exceeds this.
  double prob_gate = 0.4;
  /// ... and the packet's delay tolerance exceeds this.
  double dt_gate = 0.8;
  /// Possession probability at which a neighbour is assumed to hold a packet.
  double guess = kDefaultGuessThreshold;
};

inline constexpr Tick kDefaultTimeout = 3;
/// Waiting multiplier applied to the timeout when packets are not delay tolerant.
inline constexpr Tick kPatientTimeoutFactor = 10;
inline constexpr Tick kDefaultTickCap = 100000;
inline constexpr std::size_t kDefaultPacketCount = 9;

struct WorkloadPacket {
  PacketId id = 0;
  NodeId origin = 0;
  Bytes payload;
  double delay_tolerance = 0.0;
};

struct Scenario {
  Topology topology;
  Protocol protocol = Protocol::DP;
  bool coding_enabled = true;
  NodeId source = 0;
  std::vector<WorkloadPacket> workload;
  Thresholds thresholds;
  Tick timeout_ticks = kDefaultTimeout;
  std::uint64_t possession_seed = 0;
  LoadScenario label = LoadScenario::Low;
  std::uint32_t small_threshold = kDefaultSmallThreshold;
  Tick tick_cap = kDefaultTickCap;
  /// Natives some nodes hold before the run; their neighbours know it.
  std::vector<Preload> preloaded;

  /// Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

struct WorkloadSpec {
  std::size_t packets = kDefaultPacketCount;
  LoadScenario load = LoadScenario::Low;
  DelayMode dt_mode = DelayMode::With;
  std::uint32_t small_threshold = kDefaultSmallThreshold;
};

/// Natives originated at `source`: sizes by load (low: all small, high: all
/// large, mixed: alternating), random payload bytes, delay tolerance uniform in
/// [0,1] (with) or fixed at 1.0 (without). Ids are 1..packets.
std::vector<WorkloadPacket> make_workload(const WorkloadSpec& spec, NodeId source,
                                          std::uint64_t seed);

/// Timeout used for a delay mode given the configured base timeout.
Tick timeout_for(DelayMode mode, Tick base_timeout);

/// Which natives each node transmits and with which forward list, as decided
/// by the pruning protocol when no coding delays anything.
struct ForwardingPlan {
  std::vector<std::map<PacketId, NodeList>> transmits;

  bool contains(NodeId node, PacketId id) const {
    return node < transmits.size() && transmits[node].contains(id);
  }
};

struct RunResult {
  EventLog log;
  RunMetrics metrics;
  bool quiescent = false;
  Tick ticks = 0;
  /// Coverage-set nodes no candidate could reach, summed over all forward decisions.
  std::size_t uncovered_residue = 0;
};

/// Synchronous-tick broadcast simulator. A transmission at tick t reaches
/// every one-hop neighbour at t+1; within a tick all receptions are handled
/// first (receivers ascending), then expired timers, then each node (ascending)
/// gets one transmit opportunity.
class BroadcastSimulator {
 public:
  explicit BroadcastSimulator(Scenario scenario);

  /// With coding enabled the forwarding plan is taken from the uncoded run of
  /// the same scenario; coding then only merges or delays those transmissions.
  /// Applies preloads, originates the workload and runs tick 0's transmit phase.
  void start();
  /// Advances one tick. Returns false once quiescent.
  bool step();
  RunResult run();

  /// Native transmissions made so far, per node.
  ForwardingPlan transmitted_plan() const;

  void on_receive(NodeId receiver, const Packet& packet, NodeId sender);
  void on_transmit_opportunity(NodeId node);
  void on_timeout(NodeId node, PacketId id);

  bool quiescent() const;
  Tick now() const noexcept { return now_; }
  const NodeState& state(NodeId v) const { return states_.at(v); }
  const EventLog& log() const noexcept { return log_; }
  const Scenario& scenario() const noexcept { return sc_; }
  /// Incremental metrics with gains and delivery filled in.
  RunMetrics metrics() const;
  /// Mean possession of `id` over the node's one-hop neighbours.
  double prob(NodeId node, PacketId id) const;
  /// Delivery probability the possession guesses use for link a->b.
  double link_delivery(NodeId a, NodeId b) const;

 private:
  struct Transmission {
    NodeId sender;
    Packet packet;
  };

  bool accept_designation(NodeId node, const NativeHeader& header, NodeId sender);
  void send_native(NodeId node, PacketId id);
  void send_coded(NodeId node, const CodeSet& code);
  void account_send(NodeId node, const Packet& packet);
  void note_own_send(NodeId node, const std::vector<PacketId>& ids);
  Packet outgoing_native(NodeId node, PacketId id) const;
  const NodeSet& neighbors(NodeId node) const { return open_nbrs_[node]; }

  Scenario sc_;
  NeighborTable table_;
  std::vector<NodeSet> open_nbrs_;
  std::map<std::pair<NodeId, NodeId>, double> link_q_;
  std::vector<NodeState> states_;
  std::vector<std::set<PacketId>> decided_;
  std::vector<std::map<PacketId, NodeList>> out_fwd_;
  std::optional<ForwardingPlan> plan_;
  std::vector<Transmission> in_flight_;
  std::set<NodeId> forwarders_;
  EventLog log_;
  RunMetrics counts_;
  std::size_t residue_ = 0;
  PacketId next_coded_id_ = 0x80000000u;
  Tick now_ = 0;
  bool started_ = false;
};

RunResult run_broadcast(const Scenario& scenario);

}  // namespace mnc
