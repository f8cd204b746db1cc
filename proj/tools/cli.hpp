#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mnc/engine.hpp"
#include "mnc/metrics.hpp"
#include "mnc/pruning.hpp"

namespace mnc::cli {

enum class SourceRule { Fixed, Random };

struct Config {
  std::vector<std::size_t> nodes{kDemoNodeCount};
  double area = kDemoArea;
  double range = kDemoRange;
  std::vector<std::uint64_t> seeds;  // filled with 1..100 when left empty
  SourceRule source_rule = SourceRule::Fixed;
  NodeId source = 0;
  std::vector<Protocol> protocols{Protocol::Flood, Protocol::DP, Protocol::TDP, Protocol::PDP};
  std::vector<bool> coding{true};
  LoadScenario load = LoadScenario::Low;
  DelayMode dt_mode = DelayMode::With;
  Thresholds thresholds;
  Tick timeout = kDefaultTimeout;
  std::size_t packets = kDefaultPacketCount;
  std::uint32_t small_threshold = kDefaultSmallThreshold;
  std::optional<std::string> topology_file;
  std::string out_dir = "results";
  std::optional<std::string> emit_log;
  std::optional<std::string> replay;
  unsigned jobs = 0;  // 0: hardware concurrency
  bool quiet = false;
};

inline constexpr std::size_t kDefaultSeedCount = 100;

struct ParseResult {
  std::optional<Config> config;
  int exit_code = 0;
};

/// CLI11-backed flag parsing plus range validation. `--help` and errors
/// produce no config; exit_code says how the process should exit.
ParseResult parse_args(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// One simulated run of the batch cross product.
struct BatchItem {
  RunRecord record;
  std::string log_text;  // only when logs are kept
};

struct BatchResult {
  std::vector<BatchItem> items;
  /// All runs quiescent with complete delivery.
  bool all_ok = true;
};

/// Topology for (node count, seed): loaded file or the first connected placement.
Topology topology_for(const Config& config, std::size_t nodes, std::uint64_t seed);

Scenario make_scenario(const Config& config, const Topology& topology, std::uint64_t seed,
                       Protocol protocol, bool coding);

/// Runs nodes x seeds x protocols x coding, in deterministic output order.
BatchResult execute_batch(const Config& config, bool keep_logs);

/// Per-run CSV with the fixed header.
std::string runs_csv(const std::vector<BatchItem>& items);

/// Executes the batch, writes runs.csv / aggregate.csv / tables.txt (and the
/// event log when requested). Returns the process exit code.
int run_batch(const Config& config, std::ostream& out, std::ostream& err);

/// Recomputes metrics for every run in a log file written by --emit-log.
int replay_logs(const std::string& path, std::ostream& out, std::ostream& err);

}  // namespace mnc::cli
