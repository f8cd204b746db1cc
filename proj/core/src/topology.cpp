#include "mnc/topology.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <queue>
#include <sstream>

#include "mnc/random.hpp"

namespace mnc {

Topology Topology::from_edges(std::size_t node_count, std::span<const Edge> edges,
                              std::vector<Point> positions) {
  if (!positions.empty() && positions.size() != node_count) {
    throw TopologyError("position count does not match node count");
  }
  Topology t;
  t.adjacency_.resize(node_count);
  t.positions_ = std::move(positions);
  for (const auto& [a, b] : edges) {
    if (a >= node_count || b >= node_count) {
      throw TopologyError("edge " + std::to_string(a) + "-" + std::to_string(b) +
                          " references a node outside 0.." + std::to_string(node_count));
    }
    if (a == b) throw TopologyError("self-loop on node " + std::to_string(a));
    t.adjacency_[a].push_back(b);
    t.adjacency_[b].push_back(a);
  }
  std::size_t degree_sum = 0;
  for (auto& nbrs : t.adjacency_) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    degree_sum += nbrs.size();
  }
  t.edge_count_ = degree_sum / 2;
  return t;
}

Topology Topology::from_positions(std::vector<Point> positions, double radio_range) {
  if (!(radio_range > 0.0)) throw TopologyError("radio range must be positive");
  const double r2 = radio_range * radio_range;
  std::vector<Edge> edges;
  for (NodeId a = 0; a < positions.size(); ++a) {
    for (NodeId b = a + 1; b < positions.size(); ++b) {
      const double dx = positions[a].x - positions[b].x;
      const double dy = positions[a].y - positions[b].y;
      if (dx * dx + dy * dy <= r2) edges.emplace_back(a, b);
    }
  }
  const std::size_t n = positions.size();
  Topology t = from_edges(n, edges, std::move(positions));
  t.radio_range_ = radio_range;
  return t;
}

const std::vector<NodeId>& Topology::adjacency(NodeId v) const {
  if (!contains(v)) throw TopologyError("unknown node id " + std::to_string(v));
  return adjacency_[v];
}

bool Topology::adjacent(NodeId a, NodeId b) const {
  const auto& nbrs = adjacency(a);
  return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

std::vector<Topology::Edge> Topology::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count_);
  for (NodeId a = 0; a < adjacency_.size(); ++a) {
    for (NodeId b : adjacency_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

namespace {

void check_geometry(std::size_t n, double area, double radio_range) {
  if (n == 0) throw TopologyError("node count must be at least 1");
  if (!(area > 0.0)) throw TopologyError("area must be positive");
  if (!(radio_range > 0.0)) throw TopologyError("radio range must be positive");
}

std::vector<Point> draw_positions(std::mt19937_64& rng, std::size_t n, double area) {
  std::vector<Point> positions(n);
  for (auto& p : positions) {
    p.x = unit_real(rng) * area;
    p.y = unit_real(rng) * area;
  }
  return positions;
}

}  // namespace

Topology generate_random_topology(std::size_t n, double area, double radio_range,
                                  std::uint64_t seed) {
  check_geometry(n, area, radio_range);
  std::mt19937_64 rng(seed);
  return Topology::from_positions(draw_positions(rng, n, area), radio_range);
}

Topology generate_connected_topology(std::size_t n, double area, double radio_range,
                                     std::uint64_t seed, std::size_t max_attempts) {
  check_geometry(n, area, radio_range);
  std::mt19937_64 rng(seed);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    Topology t = Topology::from_positions(draw_positions(rng, n, area), radio_range);
    if (is_connected(t)) return t;
  }
  throw TopologyError("no connected placement of " + std::to_string(n) + " nodes after " +
                      std::to_string(max_attempts) + " attempts");
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

NodeId parse_id(std::string_view tok, std::size_t line) {
  NodeId value = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw TopologyParseError(line, "expected a node id, got '" + std::string(tok) + "'");
  }
  return value;
}

double parse_coord(std::string_view tok, std::size_t line) {
  // from_chars for double is not available on every toolchain we target.
  std::string s(tok);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || !std::isfinite(value)) {
    throw TopologyParseError(line, "expected a coordinate, got '" + s + "'");
  }
  return value;
}

}  // namespace

Topology load_topology(std::string_view text) {
  std::optional<std::size_t> declared;
  std::vector<Topology::Edge> edges;
  std::vector<std::pair<NodeId, Point>> pos_lines;
  std::vector<std::size_t> edge_lines;
  std::size_t max_id_plus_one = 0;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t end = std::min(text.find('\n', start), text.size());
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto toks = split_ws(line);
    if (toks.empty()) {
      if (end == text.size()) break;
      continue;
    }
    if (toks[0] == "nodes") {
      if (toks.size() != 2) throw TopologyParseError(line_no, "expected 'nodes <n>'");
      if (declared) throw TopologyParseError(line_no, "duplicate 'nodes' line");
      if (!edges.empty() || !pos_lines.empty()) {
        throw TopologyParseError(line_no, "'nodes' must precede edges and positions");
      }
      declared = parse_id(toks[1], line_no);
    } else if (toks[0] == "pos") {
      if (toks.size() != 4) throw TopologyParseError(line_no, "expected 'pos <v> <x> <y>'");
      const NodeId v = parse_id(toks[1], line_no);
      pos_lines.emplace_back(v, Point{parse_coord(toks[2], line_no), parse_coord(toks[3], line_no)});
      if (declared && v >= *declared) throw TopologyParseError(line_no, "node id out of range");
      max_id_plus_one = std::max<std::size_t>(max_id_plus_one, v + 1);
    } else {
      if (toks.size() != 2) throw TopologyParseError(line_no, "expected '<a> <b>'");
      const NodeId a = parse_id(toks[0], line_no);
      const NodeId b = parse_id(toks[1], line_no);
      if (a == b) throw TopologyParseError(line_no, "self-loop on node " + std::to_string(a));
      if (declared && (a >= *declared || b >= *declared)) {
        throw TopologyParseError(line_no, "node id out of range");
      }
      edges.emplace_back(a, b);
      edge_lines.push_back(line_no);
      max_id_plus_one = std::max<std::size_t>(max_id_plus_one, std::max(a, b) + std::size_t{1});
    }
    if (end == text.size()) break;
  }

  const std::size_t n = declared.value_or(max_id_plus_one);
  std::vector<Point> positions;
  if (!pos_lines.empty()) {
    positions.resize(n);
    std::vector<bool> seen(n, false);
    for (const auto& [v, p] : pos_lines) {
      positions[v] = p;
      seen[v] = true;
    }
    if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
      throw TopologyParseError(line_no, "positions given for some nodes but not all");
    }
  }
  return Topology::from_edges(n, edges, std::move(positions));
}

std::string save_topology(const Topology& topology) {
  std::ostringstream out;
  out << "nodes " << topology.node_count() << '\n';
  for (const auto& [a, b] : topology.edges()) out << a << ' ' << b << '\n';
  if (topology.has_positions()) {
    out << std::setprecision(17);
    for (NodeId v = 0; v < topology.node_count(); ++v) {
      out << "pos " << v << ' ' << topology.positions()[v].x << ' ' << topology.positions()[v].y
          << '\n';
    }
  }
  return out.str();
}

NeighborView neighbor_view(const Topology& topology, NodeId v) {
  NeighborView view;
  view.owner = v;
  view.one_hop.insert(v);
  for (NodeId w : topology.adjacency(v)) view.one_hop.insert(w);
  for (NodeId w : view.one_hop) {
    view.two_hop.insert(w);
    for (NodeId x : topology.adjacency(w)) view.two_hop.insert(x);
  }
  return view;
}

bool is_connected(const Topology& topology) {
  const std::size_t n = topology.node_count();
  if (n == 0) return true;
  std::vector<bool> seen(n, false);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = true;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId v = frontier.front();
    frontier.pop();
    for (NodeId w : topology.adjacency(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        frontier.push(w);
      }
    }
  }
  return reached == n;
}

NeighborTable::NeighborTable(const Topology& topology) {
  views_.reserve(topology.node_count());
  for (NodeId v = 0; v < topology.node_count(); ++v) views_.push_back(neighbor_view(topology, v));
}

const NeighborView& NeighborTable::operator[](NodeId v) const {
  if (v >= views_.size()) throw TopologyError("unknown node id " + std::to_string(v));
  return views_[v];
}

Topology demo_topology() {
  // Seed picked by scanning 1.. for the first connected placement.
  constexpr std::uint64_t kDemoSeed = 1;
  return generate_random_topology(kDemoNodeCount, kDemoArea, kDemoRange, kDemoSeed);
}

}  // namespace mnc
