#include "mnc/coding.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace mnc {

std::vector<PacketId> Packet::carried_ids() const {
  if (is_native()) return {id};
  std::vector<PacketId> ids;
  ids.reserve(constituents.size());
  for (const auto& h : constituents) ids.push_back(h.id);
  return ids;
}

NativeHeader Packet::header() const {
  return NativeHeader{id, origin, length, delay_tolerance, forward_list};
}

Packet Packet::make_native(PacketId id, NodeId origin, Bytes payload, double delay_tolerance,
                           std::uint32_t small_threshold) {
  Packet p;
  p.id = id;
  p.origin = origin;
  p.kind = PacketKind::Native;
  p.length = static_cast<std::uint32_t>(payload.size());
  p.size_class = classify(p.length, small_threshold);
  p.payload = std::move(payload);
  p.delay_tolerance = delay_tolerance;
  return p;
}

bool NodeState::enqueue(const Packet& packet) {
  if (!packet.is_native()) throw std::invalid_argument("only natives are queued");
  if (queued(packet.id)) return false;
  if (!pool_.contains(packet.id)) pool_.emplace(packet.id, packet);
  queue_.push_back(packet.id);
  return true;
}

std::vector<PacketId> NodeState::virtual_queue(SizeClass size_class) const {
  std::vector<PacketId> out;
  for (PacketId id : queue_) {
    if (pool_.at(id).size_class == size_class) out.push_back(id);
  }
  return out;
}

bool NodeState::queued(PacketId id) const {
  return std::find(queue_.begin(), queue_.end(), id) != queue_.end();
}

bool NodeState::remove_from_queue(PacketId id) {
  const auto it = std::find(queue_.begin(), queue_.end(), id);
  if (it == queue_.end()) return false;
  queue_.erase(it);
  return true;
}

void NodeState::requeue(PacketId id) {
  if (remove_from_queue(id)) queue_.push_back(id);
}

const Packet& NodeState::packet(PacketId id) const {
  const auto it = pool_.find(id);
  if (it == pool_.end()) {
    throw std::out_of_range("packet " + std::to_string(id) + " not in pool of node " +
                            std::to_string(node_));
  }
  return it->second;
}

const Packet* NodeState::find(PacketId id) const {
  const auto it = pool_.find(id);
  return it == pool_.end() ? nullptr : &it->second;
}

bool NodeState::store(Packet packet) {
  if (!packet.is_native()) throw std::invalid_argument("only natives are pooled");
  const PacketId id = packet.id;
  return pool_.emplace(id, std::move(packet)).second;
}

std::set<PacketId> NodeState::pool_ids() const {
  std::set<PacketId> ids;
  for (const auto& [id, _] : pool_) ids.insert(ids.end(), id);
  return ids;
}

double NodeState::possession(NodeId neighbor, PacketId id) const {
  const auto it = possession_.find({neighbor, id});
  return it == possession_.end() ? 0.0 : it->second;
}

void NodeState::raise_possession(NodeId neighbor, PacketId id, double probability) {
  double& slot = possession_[{neighbor, id}];
  slot = std::max(slot, std::clamp(probability, 0.0, 1.0));
}

std::optional<Tick> NodeState::timer(PacketId id) const {
  const auto it = timers_.find(id);
  if (it == timers_.end()) return std::nullopt;
  return it->second;
}

bool enqueue(NodeState& state, const Packet& packet) { return state.enqueue(packet); }

void update_nbr_recv_table(NodeState& state, const Packet& observed, NodeId sender,
                           std::span<const LinkEstimate> common_neighbors) {
  for (PacketId id : observed.reception_report) state.confirm(sender, id);
  const auto carried = observed.carried_ids();
  for (PacketId id : carried) {
    state.confirm(sender, id);
    for (const auto& link : common_neighbors) {
      if (link.neighbor != state.node()) state.raise_possession(link.neighbor, id, link.delivery);
    }
  }
  if (observed.is_native() && !state.has(observed.id)) {
    Packet copy = observed;
    copy.reception_report.clear();
    state.store(std::move(copy));
  }
}

bool all_nbrs_have(const NodeState& state, PacketId id, const NodeSet& neighbors) {
  return std::all_of(neighbors.begin(), neighbors.end(),
                     [&](NodeId v) { return state.possession(v, id) == 1.0; });
}

bool can_decode(const std::set<PacketId>& known, const std::set<PacketId>& coded_ids) {
  std::size_t unknown = 0;
  for (PacketId id : coded_ids) {
    if (!known.contains(id) && ++unknown > 1) return false;
  }
  return true;
}

void xor_into(Bytes& a, std::span<const std::uint8_t> b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] ^= b[i];
}

CodeSet obtain_code_set(const NodeState& state, const NodeSet& neighbors, double guess_threshold) {
  if (state.output_queue().empty()) throw std::invalid_argument("output queue is empty");
  const PacketId head = state.output_queue().front();
  const SizeClass head_class = state.packet(head).size_class;

  std::vector<PacketId> scan;
  const SizeClass other = head_class == SizeClass::Small ? SizeClass::Large : SizeClass::Small;
  for (PacketId id : state.virtual_queue(head_class)) {
    if (id != head) scan.push_back(id);
  }
  for (PacketId id : state.virtual_queue(other)) scan.push_back(id);

  const auto knows = [&](NodeId v, PacketId id) {
    return guess_possession(state.possession(v, id), guess_threshold);
  };

  CodeSet c;
  c.members.push_back(head);
  std::set<PacketId> ids{head};
  for (PacketId r : scan) {
    std::set<PacketId> trial = ids;
    trial.insert(r);
    bool ok = true;
    for (NodeId v : neighbors) {
      if (v == state.node()) continue;
      std::set<PacketId> known;
      for (PacketId id : trial) {
        if (knows(v, id)) known.insert(id);
      }
      if (known.size() == trial.size()) continue;  // needs nothing from this transmission
      if (!can_decode(known, trial)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      c.members.push_back(r);
      ids = std::move(trial);
    }
  }
  for (PacketId id : c.members) xor_into(c.encoded, state.packet(id).payload);
  return c;
}

Packet encode(const PacketLookup& pool, std::span<const PacketId> members,
              std::uint32_t small_threshold) {
  if (members.empty()) throw std::invalid_argument("cannot encode an empty member list");
  if (members.size() == 1) return pool(members.front());
  Packet coded;
  coded.kind = PacketKind::Coded;
  double dt = 1.0;
  for (PacketId id : members) {
    const Packet& p = pool(id);
    if (!p.is_native()) throw std::invalid_argument("only natives can be encoded");
    xor_into(coded.payload, p.payload);
    coded.constituents.push_back(p.header());
    dt = std::min(dt, p.delay_tolerance);
  }
  coded.origin = coded.constituents.front().origin;
  coded.length = static_cast<std::uint32_t>(coded.payload.size());
  coded.size_class = classify(coded.length, small_threshold);
  coded.delay_tolerance = dt;
  return coded;
}

namespace {

Packet recover(const NodeState& state, const Packet& coded, const NativeHeader& missing) {
  Bytes payload = coded.payload;
  for (const auto& h : coded.constituents) {
    if (h.id != missing.id) xor_into(payload, state.packet(h.id).payload);
  }
  payload.resize(missing.length);
  Packet p = Packet::make_native(missing.id, missing.origin, std::move(payload),
                                 missing.delay_tolerance, state.small_threshold());
  p.forward_list = missing.forward_list;
  return p;
}

const NativeHeader* single_unknown(const NodeState& state, const Packet& coded,
                                   std::size_t& unknown) {
  unknown = 0;
  const NativeHeader* missing = nullptr;
  for (const auto& h : coded.constituents) {
    if (!state.has(h.id)) {
      ++unknown;
      missing = &h;
    }
  }
  return unknown == 1 ? missing : nullptr;
}

}  // namespace

std::optional<Packet> decode(NodeState& state, const Packet& coded, NodeId sender) {
  if (coded.is_native()) throw std::invalid_argument("decode expects a coded packet");
  std::size_t unknown = 0;
  const NativeHeader* missing = single_unknown(state, coded, unknown);
  if (unknown == 0) return std::nullopt;
  if (missing == nullptr) {
    state.defer_coded(coded, sender);
    return std::nullopt;
  }
  Packet native = recover(state, coded, *missing);
  state.store(native);
  return native;
}

std::vector<std::pair<Packet, NodeId>> retry_deferred(NodeState& state) {
  std::vector<std::pair<Packet, NodeId>> recovered;
  auto& pending = state.deferred();
  bool progress = true;
  while (progress) {
    progress = false;
    for (auto it = pending.begin(); it != pending.end();) {
      std::size_t unknown = 0;
      const NativeHeader* missing = single_unknown(state, it->first, unknown);
      if (unknown == 0) {
        it = pending.erase(it);
      } else if (missing != nullptr) {
        Packet native = recover(state, it->first, *missing);
        state.store(native);
        recovered.emplace_back(std::move(native), it->second);
        it = pending.erase(it);
        progress = true;
      } else {
        ++it;
      }
    }
  }
  return recovered;
}

}  // namespace mnc
