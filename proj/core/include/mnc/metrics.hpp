#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "mnc/coding.hpp"
#include "mnc/pruning.hpp"

namespace mnc {

class EventLog;

/// Per-class transmission accounting. t_p counts native-equivalent
/// transmissions (what the run would have sent without coding); t_ncp counts
/// natives that travelled inside coded transmissions.
struct ClassCounts {
  std::uint64_t t_p = 0;
  std::uint64_t t_ncp = 0;
  std::uint64_t native_sends = 0;
  std::uint64_t coded_sends = 0;

  friend bool operator==(const ClassCounts&, const ClassCounts&) = default;
};

struct RunMetrics {
  ClassCounts big;
  ClassCounts small;
  double gain_big = 1.0;
  double gain_small = 1.0;
  double gain_overall = 1.0;
  std::uint64_t total_sends = 0;
  std::size_t forwarder_count = 0;
  bool delivery_complete = false;

  friend bool operator==(const RunMetrics&, const RunMetrics&) = default;
};

/// Transmissions without coding over transmissions with coding:
/// t_p / ((t_p - t_ncp) + coded_sends). 1 for an empty class.
double class_gain(std::uint64_t t_p, std::uint64_t t_ncp, std::uint64_t coded_sends);

/// NC = (NC_b + NC_s) / 2.
double overall_gain(double gain_big, double gain_small);

/// Fills the gain fields from the class counts.
void finalize_gains(RunMetrics& m);

/// Recounts every metric from the log alone (header + events). Must agree
/// exactly with the engine's incremental metrics. Throws std::invalid_argument
/// on a log that references unknown packets or nodes.
RunMetrics gain_from_log(const EventLog& log);

enum class LoadScenario { Low, High, Mixed };
enum class DelayMode { With, Without };

std::string_view to_string(LoadScenario load);
std::string_view to_string(DelayMode mode);

/// Gain of the class a load scenario populates (small, big, or both averaged).
double headline_gain(const RunMetrics& m, LoadScenario load);

/// One finished run, labelled for grouping.
struct RunRecord {
  Protocol protocol = Protocol::DP;
  std::size_t nodes = 0;
  std::uint64_t seed = 0;
  bool coding = true;
  LoadScenario load = LoadScenario::Low;
  DelayMode dt_mode = DelayMode::With;
  RunMetrics metrics;
  bool quiescent = true;
};

struct Stat {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct GroupKey {
  Protocol protocol = Protocol::DP;
  std::size_t nodes = 0;
  bool coding = true;
  LoadScenario load = LoadScenario::Low;
  DelayMode dt_mode = DelayMode::With;

  auto operator<=>(const GroupKey&) const = default;
};

struct GroupSummary {
  GroupKey key;
  std::size_t runs = 0;
  Stat sends;
  Stat forwarders;
  Stat gain_big;
  Stat gain_small;
  Stat gain_overall;
  Stat headline;
  double delivered_fraction = 0.0;
};

/// Mean/min/max per (protocol, nodes, coding, load, dt_mode), in key order.
std::vector<GroupSummary> aggregate(const std::vector<RunRecord>& runs);

/// CSV, one group per line.
std::string summary_csv(const std::vector<GroupSummary>& groups);

/// Text tables laid out like the published ones: one table per
/// (coding, load, dt_mode), node counts as rows, protocols as columns, cells
/// holding the mean headline gain.
std::string summary_tables(const std::vector<GroupSummary>& groups);

}  // namespace mnc
