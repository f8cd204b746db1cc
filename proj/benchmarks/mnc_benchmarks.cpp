#include <benchmark/benchmark.h>

#include <map>
#include <random>

#include "mnc/coding.hpp"
#include "mnc/engine.hpp"
#include "mnc/pruning.hpp"
#include "mnc/topology.hpp"

namespace {

using namespace mnc;

void BM_GenerateConnectedTopology(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(generate_connected_topology(n, kDemoArea, kDemoRange, seed++));
  }
}
BENCHMARK(BM_GenerateConnectedTopology)->Arg(10)->Arg(40);

void BM_SelectForwarders(benchmark::State& state) {
  const auto protocol = static_cast<Protocol>(state.range(0));
  const Topology t = demo_topology();
  const NeighborTable table(t);
  for (auto _ : state) {
    for (NodeId v = 0; v < t.node_count(); ++v) {
      for (NodeId u : t.adjacency(v)) {
        benchmark::DoNotOptimize(select_forwarders(protocol, table, u, v));
      }
    }
  }
  state.SetLabel(std::string(to_string(protocol)));
}
BENCHMARK(BM_SelectForwarders)
    ->Arg(static_cast<int>(Protocol::DP))
    ->Arg(static_cast<int>(Protocol::TDP))
    ->Arg(static_cast<int>(Protocol::PDP));

void BM_EncodeDecode(benchmark::State& state) {
  const auto members_count = static_cast<PacketId>(state.range(0));
  std::mt19937_64 rng(1);
  std::map<PacketId, Packet> pool;
  std::vector<PacketId> members;
  for (PacketId id = 1; id <= members_count; ++id) {
    Bytes b(200 + rng() % 1300);
    for (auto& x : b) x = static_cast<std::uint8_t>(rng());
    pool.emplace(id, Packet::make_native(id, 0, std::move(b), 1.0));
    members.push_back(id);
  }
  const PacketLookup lookup = [&](PacketId id) -> const Packet& { return pool.at(id); };
  for (auto _ : state) {
    const Packet coded = encode(lookup, members);
    NodeState s(1);
    for (PacketId id = 2; id <= members_count; ++id) s.store(pool.at(id));
    benchmark::DoNotOptimize(decode(s, coded));
  }
}
BENCHMARK(BM_EncodeDecode)->Arg(2)->Arg(4)->Arg(8);

void BM_RunBroadcast(benchmark::State& state) {
  Scenario sc;
  sc.topology = demo_topology();
  sc.protocol = static_cast<Protocol>(state.range(0));
  sc.coding_enabled = state.range(1) != 0;
  sc.source = kDemoSource;
  sc.workload = make_workload({}, kDemoSource, 1);
  sc.possession_seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_broadcast(sc));
  state.SetLabel(std::string(to_string(sc.protocol)) + (sc.coding_enabled ? "/coded" : ""));
}
BENCHMARK(BM_RunBroadcast)
    ->ArgsProduct({{static_cast<int>(Protocol::Flood), static_cast<int>(Protocol::DP),
                    static_cast<int>(Protocol::TDP), static_cast<int>(Protocol::PDP)},
                   {0, 1}})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
