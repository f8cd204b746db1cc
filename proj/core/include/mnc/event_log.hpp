#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mnc/types.hpp"

namespace mnc {

enum class EventKind { SendNative, SendCoded, Receive, Decode, Defer, Timeout, DropRedundant };

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view name);

struct Event {
  Tick tick = 0;
  NodeId actor = 0;
  EventKind kind = EventKind::Receive;
  std::vector<PacketId> packets;
  NodeList forward_list;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Native packet described in a log header.
struct LoggedPacket {
  PacketId id = 0;
  NodeId origin = 0;
  std::uint32_t length = 0;
  double delay_tolerance = 0.0;

  friend bool operator==(const LoggedPacket&, const LoggedPacket&) = default;
};

/// A native already held by a node before the run starts.
struct Preload {
  NodeId node = 0;
  PacketId packet = 0;

  friend bool operator==(const Preload&, const Preload&) = default;
};

/// Everything a replay needs besides the events themselves.
struct LogHeader {
  std::size_t node_count = 0;
  std::uint32_t small_threshold = 100;
  std::vector<LoggedPacket> packets;
  std::vector<Preload> preloads;

  friend bool operator==(const LogHeader&, const LogHeader&) = default;
};

class LogParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented event log:
///   # nodes <n>
///   # small_threshold <bytes>
///   # packet <id> <origin> <length> <delay_tolerance>
///   # preload <node> <packet>
///   <tick> <actor> <KIND> <id,id,...|-> <fwd,fwd,...|->
class EventLog {
 public:
  LogHeader header;
  std::vector<Event> events;

  void add(Tick tick, NodeId actor, EventKind kind, std::vector<PacketId> packets,
           NodeList forward_list = {});

  std::string to_text() const;
  static EventLog parse(std::string_view text);

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

}  // namespace mnc
