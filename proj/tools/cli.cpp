#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "mnc/random.hpp"

namespace mnc::cli {

namespace {

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::uint64_t to_u64(const std::string& s, const std::string& flag) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || s.front() == '-') {
    throw CLI::ValidationError(flag, "'" + s + "' is not a non-negative integer");
  }
  return v;
}

}  // namespace

ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Broadcast pruning (flood/DP/TDP/PDP) with opportunistic XOR coding: batch simulator",
               "mnc_sim"};
  app.get_formatter()->column_width(34);

  std::string nodes_arg = "40";
  std::string seeds_arg = std::to_string(kDefaultSeedCount);
  std::string source_arg = "0";
  std::string protocol_arg = "all";
  std::string coding_arg = "on";
  std::string load_arg = "low";
  std::string dt_arg = "with";

  app.add_option("--nodes", nodes_arg, "Comma-separated node counts")->capture_default_str();
  app.add_option("--area", c.area, "Side of the square deployment area")->capture_default_str();
  app.add_option("--range", c.range, "Radio range (unit-disk model)")->capture_default_str();
  app.add_option("--seeds", seeds_arg,
                 "Seed count N (runs seeds 1..N) or an explicit comma-separated list")
      ->capture_default_str();
  app.add_option("--source", source_arg, "Source node id, or 'random' (drawn from the seed)")
      ->capture_default_str();
  app.add_option("--protocol", protocol_arg, "flood|dp|tdp|pdp|all, comma-separated")
      ->capture_default_str();
  app.add_option("--coding", coding_arg, "on|off|both")->capture_default_str();
  app.add_option("--load", load_arg, "low (small packets) | high (large) | mixed (alternating)")
      ->capture_default_str();
  app.add_option("--dt-mode", dt_arg,
                 "with: delay tolerance uniform in [0,1]; without: all packets wait (dt=1, "
                 "timeout x10)")
      ->capture_default_str();
  app.add_option("--prob-gate", c.thresholds.prob_gate,
                 "Code only when mean neighbour possession exceeds this")
      ->capture_default_str();
  app.add_option("--dt-gate", c.thresholds.dt_gate,
                 "Code only when delay tolerance exceeds this")
      ->capture_default_str();
  app.add_option("--guess", c.thresholds.guess,
                 "Possession probability treated as 'neighbour has it'")
      ->capture_default_str();
  app.add_option("--timeout", c.timeout, "Ticks a deferred packet waits for a coding partner")
      ->capture_default_str();
  app.add_option("--packets", c.packets, "Native packets originated at the source")
      ->capture_default_str();
  app.add_option("--small-threshold", c.small_threshold,
                 "Packets shorter than this many bytes are small")
      ->capture_default_str();
  app.add_option("--topology-file", c.topology_file, "Edge-list topology (overrides --nodes)");
  app.add_option("--out", c.out_dir, "Output directory for CSV and tables")->capture_default_str();
  app.add_option("--emit-log", c.emit_log, "Write every run's event log to this file");
  app.add_option("--replay", c.replay, "Recompute metrics from an --emit-log file and exit");
  app.add_option("--jobs", c.jobs, "Worker threads (0 = hardware concurrency)")
      ->capture_default_str();
  app.add_flag("--quiet", c.quiet, "Do not print summary tables");

  try {
    app.parse(argc, argv);

    c.nodes.clear();
    for (const auto& s : split_commas(nodes_arg)) {
      const auto n = to_u64(s, "--nodes");
      if (n == 0) throw CLI::ValidationError("--nodes", "node counts must be positive");
      c.nodes.push_back(n);
    }
    if (c.nodes.empty()) throw CLI::ValidationError("--nodes", "no node counts given");

    const auto seed_items = split_commas(seeds_arg);
    if (seed_items.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
    if (seeds_arg.find(',') == std::string::npos) {
      const auto count = to_u64(seed_items.front(), "--seeds");
      if (count == 0) throw CLI::ValidationError("--seeds", "seed count must be positive");
      for (std::uint64_t s = 1; s <= count; ++s) c.seeds.push_back(s);
    } else {
      for (const auto& s : seed_items) c.seeds.push_back(to_u64(s, "--seeds"));
    }

    if (source_arg == "random") {
      c.source_rule = SourceRule::Random;
    } else {
      c.source = static_cast<NodeId>(to_u64(source_arg, "--source"));
    }

    c.protocols.clear();
    for (const auto& s : split_commas(protocol_arg)) {
      if (s == "all") {
        c.protocols = {Protocol::Flood, Protocol::DP, Protocol::TDP, Protocol::PDP};
        break;
      }
      const auto p = parse_protocol(s);
      if (!p) throw CLI::ValidationError("--protocol", "unknown protocol '" + s + "'");
      if (std::find(c.protocols.begin(), c.protocols.end(), *p) == c.protocols.end()) {
        c.protocols.push_back(*p);
      }
    }
    if (c.protocols.empty()) throw CLI::ValidationError("--protocol", "no protocol given");

    if (coding_arg == "on") {
      c.coding = {true};
    } else if (coding_arg == "off") {
      c.coding = {false};
    } else if (coding_arg == "both") {
      c.coding = {false, true};
    } else {
      throw CLI::ValidationError("--coding", "expected on|off|both");
    }

    if (load_arg == "low") {
      c.load = LoadScenario::Low;
    } else if (load_arg == "high") {
      c.load = LoadScenario::High;
    } else if (load_arg == "mixed") {
      c.load = LoadScenario::Mixed;
    } else {
      throw CLI::ValidationError("--load", "expected low|high|mixed");
    }

    if (dt_arg == "with") {
      c.dt_mode = DelayMode::With;
    } else if (dt_arg == "without") {
      c.dt_mode = DelayMode::Without;
    } else {
      throw CLI::ValidationError("--dt-mode", "expected with|without");
    }

    const auto unit = [](double v, const char* flag) {
      if (!(v >= 0.0 && v <= 1.0)) throw CLI::ValidationError(flag, "must lie in [0,1]");
    };
    unit(c.thresholds.prob_gate, "--prob-gate");
    unit(c.thresholds.dt_gate, "--dt-gate");
    unit(c.thresholds.guess, "--guess");
    if (!(c.area > 0.0)) throw CLI::ValidationError("--area", "must be positive");
    if (!(c.range > 0.0)) throw CLI::ValidationError("--range", "must be positive");
    if (c.timeout == 0) throw CLI::ValidationError("--timeout", "must be positive");
    if (c.packets == 0) throw CLI::ValidationError("--packets", "must be positive");
    if (c.small_threshold < 2) throw CLI::ValidationError("--small-threshold", "must be >= 2");
    if (!c.topology_file && c.source_rule == SourceRule::Fixed) {
      const auto smallest = *std::min_element(c.nodes.begin(), c.nodes.end());
      if (c.source >= smallest) {
        throw CLI::ValidationError("--source", "source " + std::to_string(c.source) +
                                                   " does not exist in a " +
                                                   std::to_string(smallest) + "-node network");
      }
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return ParseResult{std::nullopt, code == 0 ? 0 : 2};
  }
  return ParseResult{std::move(c), 0};
}

Topology topology_for(const Config& config, std::size_t nodes, std::uint64_t seed) {
  if (config.topology_file) {
    std::ifstream in(*config.topology_file);
    if (!in) throw std::runtime_error("cannot open topology file " + *config.topology_file);
    std::stringstream buf;
    buf << in.rdbuf();
    return load_topology(buf.str());
  }
  return generate_connected_topology(nodes, config.area, config.range, seed);
}

Scenario make_scenario(const Config& config, const Topology& topology, std::uint64_t seed,
                       Protocol protocol, bool coding) {
  Scenario sc;
  sc.topology = topology;
  sc.protocol = protocol;
  sc.coding_enabled = coding;
  if (config.source_rule == SourceRule::Random) {
    std::mt19937_64 rng(seed ^ 0x5ca1ab1e5eedULL);
    sc.source = static_cast<NodeId>(uniform_index(rng, 0, topology.node_count() - 1));
  } else {
    sc.source = config.source;
  }
  sc.workload = make_workload(
      WorkloadSpec{config.packets, config.load, config.dt_mode, config.small_threshold}, sc.source,
      seed);
  sc.thresholds = config.thresholds;
  sc.timeout_ticks = timeout_for(config.dt_mode, config.timeout);
  sc.possession_seed = seed;
  sc.label = config.load;
  sc.small_threshold = config.small_threshold;
  return sc;
}

BatchResult execute_batch(const Config& config, bool keep_logs) {
  struct Job {
    std::size_t topo;
    std::uint64_t seed;
    Protocol protocol;
    bool coding;
  };
  std::vector<std::uint64_t> seeds = config.seeds;
  if (seeds.empty()) {
    for (std::uint64_t s = 1; s <= kDefaultSeedCount; ++s) seeds.push_back(s);
  }
  std::vector<std::size_t> node_counts = config.nodes;
  if (config.topology_file) node_counts.assign(1, 0);

  std::vector<std::pair<std::size_t, std::uint64_t>> topo_keys;
  for (std::size_t n : node_counts) {
    for (std::uint64_t s : seeds) topo_keys.emplace_back(n, s);
  }
  std::vector<Job> jobs;
  for (std::size_t t = 0; t < topo_keys.size(); ++t) {
    for (Protocol p : config.protocols) {
      for (bool coding : config.coding) jobs.push_back(Job{t, topo_keys[t].second, p, coding});
    }
  }

  std::vector<std::optional<Topology>> topologies(topo_keys.size());
  std::vector<std::once_flag> topo_once(topo_keys.size());
  std::vector<BatchItem> items(jobs.size());
  std::vector<bool> ok(jobs.size(), false);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr failure;
  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      try {
        const Job& j = jobs[i];
        std::call_once(topo_once[j.topo], [&] {
          topologies[j.topo] = topology_for(config, topo_keys[j.topo].first, j.seed);
        });
        const Topology& topo = *topologies[j.topo];
        const Scenario sc = make_scenario(config, topo, j.seed, j.protocol, j.coding);
        RunResult r = run_broadcast(sc);
        BatchItem& item = items[i];
        item.record = RunRecord{j.protocol, topo.node_count(), j.seed, j.coding, config.load,
                                config.dt_mode, r.metrics, r.quiescent};
        if (keep_logs) {
          std::ostringstream head;
          head << "# run protocol=" << to_string(j.protocol) << " nodes=" << topo.node_count()
               << " seed=" << j.seed << " coding=" << (j.coding ? "on" : "off")
               << " load=" << to_string(config.load) << " dt_mode=" << to_string(config.dt_mode)
               << '\n';
          item.log_text = head.str() + r.log.to_text();
        }
        ok[i] = r.quiescent && r.metrics.delivery_complete;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };

  unsigned threads = config.jobs ? config.jobs : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(jobs.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  BatchResult result;
  result.items = std::move(items);
  result.all_ok = std::all_of(ok.begin(), ok.end(), [](bool b) { return b; });
  return result;
}

std::string runs_csv(const std::vector<BatchItem>& items) {
  std::ostringstream out;
  out << "protocol,nodes,seed,coding,load,dt_mode,sends,forwarders,gain_big,gain_small,"
         "gain_overall,delivered\n";
  out << std::setprecision(10);
  for (const auto& item : items) {
    const RunRecord& r = item.record;
    out << to_string(r.protocol) << ',' << r.nodes << ',' << r.seed << ','
        << (r.coding ? "on" : "off") << ',' << to_string(r.load) << ',' << to_string(r.dt_mode)
        << ',' << r.metrics.total_sends << ',' << r.metrics.forwarder_count << ','
        << r.metrics.gain_big << ',' << r.metrics.gain_small << ',' << r.metrics.gain_overall
        << ',' << (r.metrics.delivery_complete ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

bool write_file(const std::filesystem::path& path, const std::string& text, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  if (f) f << text;
  if (!f) {
    err << "mnc_sim: cannot write " << path.string() << '\n';
    return false;
  }
  return true;
}

}  // namespace

int run_batch(const Config& config, std::ostream& out, std::ostream& err) {
  if (config.replay) return replay_logs(*config.replay, out, err);

  BatchResult batch;
  try {
    batch = execute_batch(config, config.emit_log.has_value());
  } catch (const std::exception& e) {
    err << "mnc_sim: " << e.what() << '\n';
    return 2;
  }

  std::vector<RunRecord> records;
  records.reserve(batch.items.size());
  for (const auto& item : batch.items) records.push_back(item.record);
  const auto groups = aggregate(records);
  const std::string tables = summary_tables(groups);

  bool io_ok = true;
  std::error_code ec;
  std::filesystem::create_directories(config.out_dir, ec);
  if (ec) {
    err << "mnc_sim: cannot create " << config.out_dir << ": " << ec.message() << '\n';
    io_ok = false;
  } else {
    const std::filesystem::path dir(config.out_dir);
    io_ok &= write_file(dir / "runs.csv", runs_csv(batch.items), err);
    io_ok &= write_file(dir / "aggregate.csv", summary_csv(groups), err);
    io_ok &= write_file(dir / "tables.txt", tables, err);
  }
  if (config.emit_log) {
    std::string all;
    for (const auto& item : batch.items) all += item.log_text;
    io_ok &= write_file(*config.emit_log, all, err);
  }

  if (!config.quiet) out << tables;
  std::size_t failed = 0;
  for (const auto& item : batch.items) {
    if (!item.record.quiescent || !item.record.metrics.delivery_complete) ++failed;
  }
  if (failed) {
    err << "mnc_sim: " << failed << " of " << batch.items.size()
        << " runs did not deliver every packet to every node\n";
  }
  if (!io_ok) return 3;
  return batch.all_ok ? 0 : 1;
}

int replay_logs(const std::string& path, std::ostream& out, std::ostream& err) {
  std::ifstream in(path);
  if (!in) {
    err << "mnc_sim: cannot open " << path << '\n';
    return 2;
  }
  std::vector<std::pair<std::string, std::string>> runs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# run", 0) == 0 || runs.empty()) {
      runs.emplace_back(line.rfind("# run", 0) == 0 ? line.substr(6) : std::string("run"),
                        std::string());
      if (line.rfind("# run", 0) == 0) continue;
    }
    runs.back().second += line;
    runs.back().second += '\n';
  }
  out << std::setprecision(10);
  try {
    for (const auto& [label, text] : runs) {
      const RunMetrics m = gain_from_log(EventLog::parse(text));
      out << label << " sends=" << m.total_sends << " forwarders=" << m.forwarder_count
          << " gain_big=" << m.gain_big << " gain_small=" << m.gain_small
          << " gain_overall=" << m.gain_overall << " delivered=" << (m.delivery_complete ? 1 : 0)
          << '\n';
    }
  } catch (const std::exception& e) {
    err << "mnc_sim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

}  // namespace mnc::cli
