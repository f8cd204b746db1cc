#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "graphs.hpp"
#include "mnc/engine.hpp"
#include "mnc/event_log.hpp"

namespace mnc::testing {

inline WorkloadPacket workload_packet(PacketId id, NodeId origin, std::size_t length, double dt) {
  Bytes payload(length);
  for (std::size_t i = 0; i < length; ++i) payload[i] = static_cast<std::uint8_t>(id * 31 + i);
  return WorkloadPacket{id, origin, std::move(payload), dt};
}

/// Path A(0) - R(1) - B(2); A and B each originate one small packet.
inline Scenario alice_bob(bool coding) {
  Scenario sc;
  sc.topology = path_graph(3);
  sc.protocol = Protocol::DP;
  sc.coding_enabled = coding;
  sc.source = 0;
  sc.workload = {workload_packet(1, 0, 40, 1.0), workload_packet(2, 2, 40, 1.0)};
  sc.possession_seed = 1;
  return sc;
}

inline std::size_t send_count(const EventLog& log) {
  std::size_t n = 0;
  for (const auto& e : log.events) {
    n += e.kind == EventKind::SendNative || e.kind == EventKind::SendCoded;
  }
  return n;
}

/// Structural log checks: nondecreasing ticks, every send heard by each
/// neighbour on the next tick, and no node sending the same native twice.
/// Returns an empty string for a well-formed log.
inline std::string log_problem(const EventLog& log, const Topology& t) {
  Tick last = 0;
  std::map<std::pair<NodeId, PacketId>, int> sent;
  std::map<std::pair<Tick, NodeId>, std::vector<std::vector<PacketId>>> receives;
  for (const auto& e : log.events) {
    if (e.tick < last) return "tick went backwards";
    last = e.tick;
    if (e.kind == EventKind::Receive) receives[{e.tick, e.actor}].push_back(e.packets);
  }
  for (const auto& e : log.events) {
    if (e.kind != EventKind::SendNative && e.kind != EventKind::SendCoded) continue;
    for (PacketId id : e.packets) {
      if (++sent[{e.actor, id}] > 1) {
        return "node " + std::to_string(e.actor) + " sent " + std::to_string(id) + " twice";
      }
    }
    for (NodeId w : t.adjacency(e.actor)) {
      const auto it = receives.find({e.tick + 1, w});
      bool found = false;
      if (it != receives.end()) {
        for (const auto& ids : it->second) found = found || ids == e.packets;
      }
      if (!found) {
        return "send by " + std::to_string(e.actor) + " at " + std::to_string(e.tick) +
               " not received by " + std::to_string(w);
      }
    }
  }
  return {};
}

}  // namespace mnc::testing
