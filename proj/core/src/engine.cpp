#include "mnc/engine.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "mnc/random.hpp"

namespace mnc {

void Scenario::validate() const {
  const auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (topology.node_count() == 0) fail("topology has no nodes");
  if (!topology.contains(source)) fail("source " + std::to_string(source) + " is not a node");
  if (workload.empty()) fail("workload is empty");
  for (double t : {thresholds.prob_gate, thresholds.dt_gate, thresholds.guess}) {
    if (!(t >= 0.0 && t <= 1.0)) fail("thresholds must lie in [0,1]");
  }
  if (timeout_ticks == 0) fail("timeout must be positive");
  if (small_threshold == 0) fail("small threshold must be positive");
  std::set<PacketId> ids;
  for (const auto& w : workload) {
    if (!topology.contains(w.origin)) fail("packet origin outside topology");
    if (!(w.delay_tolerance >= 0.0 && w.delay_tolerance <= 1.0)) {
      fail("delay tolerance must lie in [0,1]");
    }
    if (w.id >= 0x80000000u) fail("native packet ids must be below 2^31");
    if (!ids.insert(w.id).second) fail("duplicate packet id " + std::to_string(w.id));
  }
  for (const auto& p : preloaded) {
    if (!topology.contains(p.node) || !ids.contains(p.packet)) fail("preload references unknown node or packet");
  }
}

std::vector<WorkloadPacket> make_workload(const WorkloadSpec& spec, NodeId source,
                                          std::uint64_t seed) {
  if (spec.small_threshold < 2) throw std::invalid_argument("small threshold must be >= 2");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    0x776b6cu};
  std::mt19937_64 rng(seq);
  const std::uint64_t small_lo = spec.small_threshold > 32 ? 32 : 1;
  const std::uint64_t small_hi = spec.small_threshold - 1;
  const std::uint64_t large_lo = spec.small_threshold;
  const std::uint64_t large_hi = spec.small_threshold + 1400;

  std::vector<WorkloadPacket> out;
  out.reserve(spec.packets);
  for (std::size_t i = 0; i < spec.packets; ++i) {
    bool small = true;
    switch (spec.load) {
      case LoadScenario::Low: small = true; break;
      case LoadScenario::High: small = false; break;
      case LoadScenario::Mixed: small = i % 2 == 0; break;
    }
    const auto len = small ? uniform_index(rng, small_lo, small_hi)
                           : uniform_index(rng, large_lo, large_hi);
    WorkloadPacket w;
    w.id = static_cast<PacketId>(i + 1);
    w.origin = source;
    w.payload.resize(len);
    for (auto& b : w.payload) b = static_cast<std::uint8_t>(rng() & 0xff);
    w.delay_tolerance = spec.dt_mode == DelayMode::With ? unit_real(rng) : 1.0;
    out.push_back(std::move(w));
  }
  return out;
}

Tick timeout_for(DelayMode mode, Tick base_timeout) {
  return mode == DelayMode::With ? base_timeout : base_timeout * kPatientTimeoutFactor;
}

BroadcastSimulator::BroadcastSimulator(Scenario scenario)
    : sc_(std::move(scenario)), table_(sc_.topology) {
  sc_.validate();
  const std::size_t n = sc_.topology.node_count();
  open_nbrs_.resize(n);
  states_.reserve(n);
  for (NodeId v = 0; v < n; ++v) {
    const auto& adj = sc_.topology.adjacency(v);
    open_nbrs_[v] = NodeSet(adj.begin(), adj.end());
    states_.emplace_back(v, sc_.small_threshold);
  }
  decided_.resize(n);
  out_fwd_.resize(n);

  std::mt19937_64 rng(sc_.possession_seed);
  for (NodeId a = 0; a < n; ++a) {
    for (NodeId b : sc_.topology.adjacency(a)) link_q_[{a, b}] = unit_real(rng);
  }

  log_.header.node_count = n;
  log_.header.small_threshold = sc_.small_threshold;
  for (const auto& w : sc_.workload) {
    log_.header.packets.push_back(LoggedPacket{w.id, w.origin,
                                               static_cast<std::uint32_t>(w.payload.size()),
                                               w.delay_tolerance});
  }
  log_.header.preloads = sc_.preloaded;

  if (sc_.coding_enabled) {
    Scenario uncoded = sc_;
    uncoded.coding_enabled = false;
    BroadcastSimulator reference(std::move(uncoded));
    const RunResult ref = reference.run();
    plan_ = reference.transmitted_plan();
    residue_ = ref.uncovered_residue;
  }
}

ForwardingPlan BroadcastSimulator::transmitted_plan() const {
  ForwardingPlan plan;
  plan.transmits.resize(states_.size());
  for (const Event& e : log_.events) {
    if (e.kind != EventKind::SendNative && e.kind != EventKind::SendCoded) continue;
    for (PacketId id : e.packets) plan.transmits[e.actor][id] = out_fwd_[e.actor].at(id);
  }
  return plan;
}

double BroadcastSimulator::link_delivery(NodeId a, NodeId b) const {
  const auto it = link_q_.find({a, b});
  return it == link_q_.end() ? 0.0 : it->second;
}

double BroadcastSimulator::prob(NodeId node, PacketId id) const {
  const NodeSet& nbrs = neighbors(node);
  if (nbrs.empty()) return 1.0;
  double sum = 0.0;
  for (NodeId w : nbrs) sum += states_[node].possession(w, id);
  return sum / static_cast<double>(nbrs.size());
}

void BroadcastSimulator::start() {
  if (started_) return;
  started_ = true;
  std::map<PacketId, const WorkloadPacket*> by_id;
  for (const auto& w : sc_.workload) by_id[w.id] = &w;

  for (const auto& pre : sc_.preloaded) {
    const WorkloadPacket& w = *by_id.at(pre.packet);
    states_[pre.node].store(Packet::make_native(w.id, w.origin, w.payload, w.delay_tolerance,
                                                sc_.small_threshold));
    for (NodeId nb : neighbors(pre.node)) states_[nb].confirm(pre.node, w.id);
  }

  for (const auto& w : sc_.workload) {
    Packet p = Packet::make_native(w.id, w.origin, w.payload, w.delay_tolerance,
                                   sc_.small_threshold);
    NodeState& s = states_[w.origin];
    if (!s.has(w.id)) s.store(p);
    decided_[w.origin].insert(w.id);
    const ForwardDecision d = select_forwarders(sc_.protocol, table_, std::nullopt, w.origin);
    if (plan_) {
      if (!plan_->contains(w.origin, w.id)) continue;
    } else {
      residue_ += d.uncovered.size();
    }
    out_fwd_[w.origin][w.id] = d.forward_list;
    s.enqueue(p);
  }
  if (plan_) {
    // Preloaded natives the plan forwards are ready immediately.
    for (const auto& pre : sc_.preloaded) {
      accept_designation(pre.node, states_[pre.node].packet(pre.packet).header(), pre.node);
    }
  }

  for (NodeId v = 0; v < states_.size(); ++v) on_transmit_opportunity(v);
}

bool BroadcastSimulator::quiescent() const {
  if (!in_flight_.empty()) return false;
  return std::all_of(states_.begin(), states_.end(),
                     [](const NodeState& s) { return s.output_queue().empty(); });
}

bool BroadcastSimulator::step() {
  if (!started_) start();
  if (quiescent()) return false;
  ++now_;

  std::vector<Transmission> arriving;
  arriving.swap(in_flight_);
  for (NodeId v = 0; v < states_.size(); ++v) {
    for (const auto& t : arriving) {
      if (open_nbrs_[t.sender].contains(v)) on_receive(v, t.packet, t.sender);
    }
  }

  for (NodeId v = 0; v < states_.size(); ++v) {
    std::vector<PacketId> due;
    for (const auto& [id, expiry] : states_[v].timers()) {
      if (expiry <= now_ && !states_[v].expired(id)) due.push_back(id);
    }
    for (PacketId id : due) on_timeout(v, id);
  }

  for (NodeId v = 0; v < states_.size(); ++v) on_transmit_opportunity(v);
  return !quiescent();
}

RunResult BroadcastSimulator::run() {
  start();
  while (!quiescent() && now_ < sc_.tick_cap) step();
  RunResult r;
  r.log = log_;
  r.metrics = metrics();
  r.quiescent = quiescent();
  r.ticks = now_;
  r.uncovered_residue = residue_;
  return r;
}

bool BroadcastSimulator::accept_designation(NodeId node, const NativeHeader& header,
                                            NodeId sender) {
  if (decided_[node].contains(header.id)) return false;
  if (plan_) {
    decided_[node].insert(header.id);
    if (!plan_->contains(node, header.id)) return false;
    out_fwd_[node][header.id] = plan_->transmits[node].at(header.id);
    NodeState& s = states_[node];
    s.enqueue(s.packet(header.id));
    return true;
  }
  if (std::find(header.forward_list.begin(), header.forward_list.end(), node) ==
      header.forward_list.end()) {
    return false;
  }
  decided_[node].insert(header.id);
  const ForwardDecision d = select_forwarders(sc_.protocol, table_, sender, node);
  residue_ += d.uncovered.size();
  out_fwd_[node][header.id] = d.forward_list;
  NodeState& s = states_[node];
  s.enqueue(s.packet(header.id));
  return true;
}

void BroadcastSimulator::on_receive(NodeId receiver, const Packet& packet, NodeId sender) {
  NodeState& s = states_[receiver];
  NodeList fwd;
  if (packet.is_native()) {
    fwd = packet.forward_list;
  } else {
    NodeSet all;
    for (const auto& h : packet.constituents) all.insert(h.forward_list.begin(), h.forward_list.end());
    fwd.assign(all.begin(), all.end());
  }
  log_.add(now_, receiver, EventKind::Receive, packet.carried_ids(), fwd);

  std::vector<LinkEstimate> common;
  for (NodeId w : neighbors(sender)) {
    if (w != receiver && neighbors(receiver).contains(w)) {
      common.push_back(LinkEstimate{w, link_delivery(sender, w)});
    }
  }

  bool useful = false;
  if (packet.is_native()) {
    const bool had = s.has(packet.id);
    update_nbr_recv_table(s, packet, sender, common);
    useful = !had;
    useful |= accept_designation(receiver, packet.header(), sender);
  } else {
    update_nbr_recv_table(s, packet, sender, common);
    std::size_t unknown = 0;
    for (const auto& h : packet.constituents) unknown += s.has(h.id) ? 0 : 1;
    if (auto native = decode(s, packet, sender)) {
      log_.add(now_, receiver, EventKind::Decode, {native->id}, native->forward_list);
      useful = true;
    } else if (unknown >= 2) {
      log_.add(now_, receiver, EventKind::Defer, packet.carried_ids(), fwd);
      useful = true;
    }
    for (const auto& h : packet.constituents) {
      if (s.has(h.id)) useful |= accept_designation(receiver, h, sender);
    }
  }

  for (auto& [native, from] : retry_deferred(s)) {
    log_.add(now_, receiver, EventKind::Decode, {native.id}, native.forward_list);
    accept_designation(receiver, native.header(), from);
    useful = true;
  }

  if (!useful) {
    log_.add(now_, receiver, EventKind::DropRedundant, packet.carried_ids(), fwd);
  }
}

void BroadcastSimulator::on_timeout(NodeId node, PacketId id) {
  NodeState& s = states_[node];
  if (!s.timer(id) || !s.queued(id) || s.expired(id)) return;
  s.mark_expired(id);
  log_.add(now_, node, EventKind::Timeout, {id});
}

void BroadcastSimulator::on_transmit_opportunity(NodeId node) {
  NodeState& s = states_[node];
  const NodeSet& nbrs = neighbors(node);
  std::size_t budget = s.output_queue().size();
  while (budget-- > 0 && !s.output_queue().empty()) {
    const PacketId head = s.output_queue().front();
    // Suppressing transmissions every neighbour already confirmed is part of the
    // coding machinery; the uncoded baseline forwards unconditionally.
    if (sc_.coding_enabled && all_nbrs_have(s, head, nbrs)) {
      s.remove_from_queue(head);
      s.clear_timer(head);
      log_.add(now_, node, EventKind::DropRedundant, {head});
      continue;
    }
    const Packet& p = s.packet(head);
    const bool gated = sc_.coding_enabled && prob(node, head) > sc_.thresholds.prob_gate &&
                       p.delay_tolerance > sc_.thresholds.dt_gate;
    if (!gated) {
      send_native(node, head);
      return;
    }
    const CodeSet code = obtain_code_set(s, nbrs, sc_.thresholds.guess);
    if (code.members.size() > 1) {
      send_coded(node, code);
      return;
    }
    if (s.expired(head)) {
      send_native(node, head);
      return;
    }
    if (!s.timer(head)) s.set_timer(head, now_ + sc_.timeout_ticks);
    log_.add(now_, node, EventKind::Defer, {head});
    s.requeue(head);
  }
}

Packet BroadcastSimulator::outgoing_native(NodeId node, PacketId id) const {
  Packet p = states_[node].packet(id);
  p.forward_list = out_fwd_[node].at(id);
  p.reception_report.clear();
  return p;
}

void BroadcastSimulator::note_own_send(NodeId node, const std::vector<PacketId>& ids) {
  NodeState& s = states_[node];
  for (PacketId id : ids) {
    s.remove_from_queue(id);
    s.clear_timer(id);
    for (NodeId w : neighbors(node)) s.raise_possession(w, id, link_delivery(node, w));
  }
}

void BroadcastSimulator::account_send(NodeId node, const Packet& packet) {
  const auto ids = packet.carried_ids();
  ClassCounts& c = packet.size_class == SizeClass::Small ? counts_.small : counts_.big;
  if (packet.is_native()) {
    ++c.native_sends;
  } else {
    ++c.coded_sends;
    c.t_ncp += ids.size();
  }
  c.t_p += ids.size();
  ++counts_.total_sends;
  for (PacketId id : ids) {
    const auto it = std::find_if(sc_.workload.begin(), sc_.workload.end(),
                                 [id](const WorkloadPacket& w) { return w.id == id; });
    if (it != sc_.workload.end() && it->origin != node) forwarders_.insert(node);
  }
}

void BroadcastSimulator::send_native(NodeId node, PacketId id) {
  Packet p = outgoing_native(node, id);
  p.reception_report = states_[node].pool_ids();
  if (sc_.protocol == Protocol::TDP) p.sender_two_hop = table_.two_hop(node);
  log_.add(now_, node, EventKind::SendNative, {id}, p.forward_list);
  account_send(node, p);
  note_own_send(node, {id});
  in_flight_.push_back(Transmission{node, std::move(p)});
}

void BroadcastSimulator::send_coded(NodeId node, const CodeSet& code) {
  const NodeState& s = states_[node];
  const PacketLookup lookup = [&](PacketId id) -> const Packet& { return s.packet(id); };
  Packet c = encode(lookup, code.members, sc_.small_threshold);
  c.id = next_coded_id_++;
  NodeSet fwd_union;
  for (auto& h : c.constituents) {
    h.forward_list = out_fwd_[node].at(h.id);
    fwd_union.insert(h.forward_list.begin(), h.forward_list.end());
  }
  c.forward_list.assign(fwd_union.begin(), fwd_union.end());
  c.reception_report = s.pool_ids();
  if (sc_.protocol == Protocol::TDP) c.sender_two_hop = table_.two_hop(node);
  log_.add(now_, node, EventKind::SendCoded, c.carried_ids(), c.forward_list);
  account_send(node, c);
  note_own_send(node, c.carried_ids());
  in_flight_.push_back(Transmission{node, std::move(c)});
}

RunMetrics BroadcastSimulator::metrics() const {
  RunMetrics m = counts_;
  m.forwarder_count = forwarders_.size();
  m.delivery_complete = std::all_of(states_.begin(), states_.end(), [&](const NodeState& s) {
    return std::all_of(sc_.workload.begin(), sc_.workload.end(),
                       [&](const WorkloadPacket& w) { return s.has(w.id); });
  });
  finalize_gains(m);
  return m;
}

RunResult run_broadcast(const Scenario& scenario) {
  BroadcastSimulator sim(scenario);
  return sim.run();
}

}  // namespace mnc
