#include "mnc/event_log.hpp"

#include <array>
#include <charconv>
#include <iomanip>
#include <sstream>

namespace mnc {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 7> kKindNames{{
    {EventKind::SendNative, "SEND_NATIVE"},
    {EventKind::SendCoded, "SEND_CODED"},
    {EventKind::Receive, "RECEIVE"},
    {EventKind::Decode, "DECODE"},
    {EventKind::Defer, "DEFER"},
    {EventKind::Timeout, "TIMEOUT"},
    {EventKind::DropRedundant, "DROP_REDUNDANT"},
}};

template <typename T>
void write_list(std::ostream& out, const std::vector<T>& items) {
  if (items.empty()) {
    out << '-';
    return;
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out << ',';
    out << items[i];
  }
}

template <typename T>
T parse_uint(std::string_view tok, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw LogParseError("line " + std::to_string(line) + ": bad integer '" + std::string(tok) +
                        "'");
  }
  return value;
}

template <typename T>
std::vector<T> parse_list(std::string_view tok, std::size_t line) {
  std::vector<T> out;
  if (tok == "-") return out;
  std::size_t start = 0;
  while (start <= tok.size()) {
    const std::size_t comma = std::min(tok.find(',', start), tok.size());
    out.push_back(parse_uint<T>(tok.substr(start, comma - start), line));
    start = comma + 1;
  }
  return out;
}

std::vector<std::string_view> fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

void EventLog::add(Tick tick, NodeId actor, EventKind kind, std::vector<PacketId> packets,
                   NodeList forward_list) {
  events.push_back(Event{tick, actor, kind, std::move(packets), std::move(forward_list)});
}

std::string EventLog::to_text() const {
  std::ostringstream out;
  out << "# nodes " << header.node_count << '\n';
  out << "# small_threshold " << header.small_threshold << '\n';
  out << std::setprecision(17);
  for (const auto& p : header.packets) {
    out << "# packet " << p.id << ' ' << p.origin << ' ' << p.length << ' ' << p.delay_tolerance
        << '\n';
  }
  for (const auto& p : header.preloads) out << "# preload " << p.node << ' ' << p.packet << '\n';
  for (const auto& e : events) {
    out << e.tick << ' ' << e.actor << ' ' << to_string(e.kind) << ' ';
    write_list(out, e.packets);
    out << ' ';
    write_list(out, e.forward_list);
    out << '\n';
  }
  return out.str();
}

EventLog EventLog::parse(std::string_view text) {
  EventLog log;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto f = fields(line);
    if (f.empty()) continue;
    if (f[0] == "#") {
      if (f.size() < 2) continue;
      const std::string_view key = f[1];
      if (key == "nodes" && f.size() == 3) {
        log.header.node_count = parse_uint<std::size_t>(f[2], line_no);
      } else if (key == "small_threshold" && f.size() == 3) {
        log.header.small_threshold = parse_uint<std::uint32_t>(f[2], line_no);
      } else if (key == "packet" && f.size() == 6) {
        LoggedPacket p;
        p.id = parse_uint<PacketId>(f[2], line_no);
        p.origin = parse_uint<NodeId>(f[3], line_no);
        p.length = parse_uint<std::uint32_t>(f[4], line_no);
        try {
          p.delay_tolerance = std::stod(std::string(f[5]));
        } catch (const std::exception&) {
          throw LogParseError("line " + std::to_string(line_no) + ": bad delay tolerance");
        }
        log.header.packets.push_back(p);
      } else if (key == "preload" && f.size() == 4) {
        log.header.preloads.push_back(
            Preload{parse_uint<NodeId>(f[2], line_no), parse_uint<PacketId>(f[3], line_no)});
      }
      // Any other comment line is free text.
      continue;
    }
    if (f.size() != 5) {
      throw LogParseError("line " + std::to_string(line_no) + ": expected 5 fields");
    }
    const auto kind = parse_event_kind(f[2]);
    if (!kind) {
      throw LogParseError("line " + std::to_string(line_no) + ": unknown event kind '" +
                          std::string(f[2]) + "'");
    }
    log.add(parse_uint<Tick>(f[0], line_no), parse_uint<NodeId>(f[1], line_no), *kind,
            parse_list<PacketId>(f[3], line_no), parse_list<NodeId>(f[4], line_no));
  }
  return log;
}

}  // namespace mnc
