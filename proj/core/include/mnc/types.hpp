#pragma once

#include <cstdint>
#include <set>
#include <vector>

namespace mnc {

using NodeId = std::uint32_t;
using PacketId = std::uint32_t;
using Tick = std::uint64_t;

/// Order-independent set of node ids.
using NodeSet = std::set<NodeId>;
/// Ordered node-id list (forward lists keep the greedy selection order).
using NodeList = std::vector<NodeId>;

using Bytes = std::vector<std::uint8_t>;

}  // namespace mnc
