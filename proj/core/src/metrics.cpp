#include "mnc/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mnc/event_log.hpp"

namespace mnc {

double class_gain(std::uint64_t t_p, std::uint64_t t_ncp, std::uint64_t coded_sends) {
  if (t_p == 0) return 1.0;
  const std::uint64_t with_coding = (t_p - t_ncp) + coded_sends;
  return static_cast<double>(t_p) / static_cast<double>(with_coding);
}

double overall_gain(double gain_big, double gain_small) { return (gain_big + gain_small) / 2.0; }

void finalize_gains(RunMetrics& m) {
  m.gain_big = class_gain(m.big.t_p, m.big.t_ncp, m.big.coded_sends);
  m.gain_small = class_gain(m.small.t_p, m.small.t_ncp, m.small.coded_sends);
  m.gain_overall = overall_gain(m.gain_big, m.gain_small);
}

RunMetrics gain_from_log(const EventLog& log) {
  const LogHeader& h = log.header;
  std::map<PacketId, LoggedPacket> packets;
  for (const auto& p : h.packets) packets[p.id] = p;
  const auto lookup = [&](PacketId id) -> const LoggedPacket& {
    const auto it = packets.find(id);
    if (it == packets.end()) {
      throw std::invalid_argument("log references unknown packet " + std::to_string(id));
    }
    return it->second;
  };

  std::vector<std::set<PacketId>> holds(h.node_count);
  const auto hold = [&](NodeId v, PacketId id) {
    if (v >= h.node_count) throw std::invalid_argument("log references unknown node");
    holds[v].insert(id);
  };
  for (const auto& p : h.packets) hold(p.origin, p.id);
  for (const auto& p : h.preloads) hold(p.node, p.packet);

  RunMetrics m;
  std::set<NodeId> forwarders;
  for (const Event& e : log.events) {
    switch (e.kind) {
      case EventKind::SendNative:
      case EventKind::SendCoded: {
        std::uint32_t length = 0;
        for (PacketId id : e.packets) {
          const LoggedPacket& p = lookup(id);
          length = std::max(length, p.length);
          if (p.origin != e.actor) forwarders.insert(e.actor);
        }
        ClassCounts& c = classify(length, h.small_threshold) == SizeClass::Small ? m.small : m.big;
        if (e.kind == EventKind::SendNative) {
          ++c.native_sends;
        } else {
          ++c.coded_sends;
          c.t_ncp += e.packets.size();
        }
        c.t_p += e.packets.size();
        ++m.total_sends;
        break;
      }
      case EventKind::Receive:
        if (e.packets.size() == 1) hold(e.actor, e.packets.front());
        break;
      case EventKind::Decode:
        for (PacketId id : e.packets) hold(e.actor, id);
        break;
      default:
        break;
    }
  }
  m.forwarder_count = forwarders.size();
  m.delivery_complete = std::all_of(holds.begin(), holds.end(), [&](const std::set<PacketId>& s) {
    return std::all_of(h.packets.begin(), h.packets.end(),
                       [&](const LoggedPacket& p) { return s.contains(p.id); });
  });
  finalize_gains(m);
  return m;
}

std::string_view to_string(LoadScenario load) {
  switch (load) {
    case LoadScenario::Low: return "low";
    case LoadScenario::High: return "high";
    case LoadScenario::Mixed: return "mixed";
  }
  return "?";
}

std::string_view to_string(DelayMode mode) {
  return mode == DelayMode::With ? "with" : "without";
}

double headline_gain(const RunMetrics& m, LoadScenario load) {
  switch (load) {
    case LoadScenario::Low: return m.gain_small;
    case LoadScenario::High: return m.gain_big;
    case LoadScenario::Mixed: return m.gain_overall;
  }
  return m.gain_overall;
}

namespace {

class StatAccumulator {
 public:
  void add(double x) {
    min_ = count_ ? std::min(min_, x) : x;
    max_ = count_ ? std::max(max_, x) : x;
    sum_ += x;
    ++count_;
  }
  Stat stat() const {
    return count_ ? Stat{sum_ / static_cast<double>(count_), min_, max_} : Stat{};
  }

 private:
  double sum_ = 0.0;
  double min_ = 0.0;
  double max_ = 0.0;
  std::size_t count_ = 0;
};

struct GroupAccumulator {
  std::size_t runs = 0;
  std::size_t delivered = 0;
  StatAccumulator sends, forwarders, gain_big, gain_small, gain_overall, headline;
};

}  // namespace

std::vector<GroupSummary> aggregate(const std::vector<RunRecord>& runs) {
  std::map<GroupKey, GroupAccumulator> groups;
  for (const auto& r : runs) {
    GroupAccumulator& g = groups[GroupKey{r.protocol, r.nodes, r.coding, r.load, r.dt_mode}];
    ++g.runs;
    g.delivered += r.metrics.delivery_complete ? 1 : 0;
    g.sends.add(static_cast<double>(r.metrics.total_sends));
    g.forwarders.add(static_cast<double>(r.metrics.forwarder_count));
    g.gain_big.add(r.metrics.gain_big);
    g.gain_small.add(r.metrics.gain_small);
    g.gain_overall.add(r.metrics.gain_overall);
    g.headline.add(headline_gain(r.metrics, r.load));
  }
  std::vector<GroupSummary> out;
  out.reserve(groups.size());
  for (const auto& [key, g] : groups) {
    GroupSummary s;
    s.key = key;
    s.runs = g.runs;
    s.sends = g.sends.stat();
    s.forwarders = g.forwarders.stat();
    s.gain_big = g.gain_big.stat();
    s.gain_small = g.gain_small.stat();
    s.gain_overall = g.gain_overall.stat();
    s.headline = g.headline.stat();
    s.delivered_fraction = static_cast<double>(g.delivered) / static_cast<double>(g.runs);
    out.push_back(s);
  }
  return out;
}

std::string summary_csv(const std::vector<GroupSummary>& groups) {
  std::ostringstream out;
  out << "protocol,nodes,coding,load,dt_mode,runs,"
         "sends_mean,sends_min,sends_max,forwarders_mean,forwarders_min,forwarders_max,"
         "gain_big_mean,gain_small_mean,gain_overall_mean,gain_overall_min,gain_overall_max,"
         "headline_gain_mean,delivered_fraction\n";
  out << std::setprecision(10);
  for (const auto& g : groups) {
    out << to_string(g.key.protocol) << ',' << g.key.nodes << ',' << (g.key.coding ? "on" : "off")
        << ',' << to_string(g.key.load) << ',' << to_string(g.key.dt_mode) << ',' << g.runs << ','
        << g.sends.mean << ',' << g.sends.min << ',' << g.sends.max << ',' << g.forwarders.mean
        << ',' << g.forwarders.min << ',' << g.forwarders.max << ',' << g.gain_big.mean << ','
        << g.gain_small.mean << ',' << g.gain_overall.mean << ',' << g.gain_overall.min << ','
        << g.gain_overall.max << ',' << g.headline.mean << ',' << g.delivered_fraction << '\n';
  }
  return out.str();
}

std::string summary_tables(const std::vector<GroupSummary>& groups) {
  using TableKey = std::tuple<bool, LoadScenario, DelayMode>;
  std::map<TableKey, std::map<std::size_t, std::map<Protocol, const GroupSummary*>>> tables;
  std::map<TableKey, std::set<Protocol>> columns;
  for (const auto& g : groups) {
    const TableKey k{g.key.coding, g.key.load, g.key.dt_mode};
    tables[k][g.key.nodes][g.key.protocol] = &g;
    columns[k].insert(g.key.protocol);
  }

  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  for (const auto& [k, rows] : tables) {
    const auto& [coding, load, mode] = k;
    out << "Coding gain, " << to_string(load) << " load, " << to_string(mode)
        << " delay tolerance, coding " << (coding ? "on" : "off") << '\n';
    out << std::setw(8) << "nodes";
    for (Protocol p : columns[k]) out << std::setw(10) << to_string(p);
    out << std::setw(12) << "fwd(mean)" << '\n';
    for (const auto& [nodes, cells] : rows) {
      out << std::setw(8) << nodes;
      for (Protocol p : columns[k]) {
        const auto it = cells.find(p);
        if (it == cells.end()) {
          out << std::setw(10) << "-";
        } else {
          out << std::setw(10) << it->second->headline.mean;
        }
      }
      out << "   ";
      for (Protocol p : columns[k]) {
        const auto it = cells.find(p);
        if (it != cells.end()) {
          out << ' ' << to_string(p) << '=' << std::setprecision(1) << it->second->forwarders.mean
              << std::setprecision(4);
        }
      }
      out << '\n';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mnc
