#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "prism/engine/db.h"

namespace prism::bench {

struct LatencySummary {
  uint64_t count = 0;
  double mean_us = 0;
  double p50_us = 0;
  double p95_us = 0;
  double p99_us = 0;
  double max_us = 0;
};

// Nearest-rank percentiles; sorts the samples in place.
LatencySummary Summarize(std::vector<float>* samples_us);

// Engine activity over an interval.
struct EngineDelta {
  uint64_t flushes = 0;
  uint64_t compactions = 0;
  uint64_t trivial_moves = 0;
  uint64_t compaction_bytes_read = 0;
  uint64_t compaction_bytes_written = 0;
  uint64_t pinned_records = 0;
  uint64_t up_moved_records = 0;
  uint64_t write_stalls = 0;
  uint64_t stall_micros = 0;
  uint64_t failed_jobs = 0;
};

EngineDelta Diff(const DbStats& later, const DbStats& earlier);

struct MetricsReport {
  std::string workload;
  std::string distribution;
  double theta = 0;
  uint64_t seed = 0;
  int clients = 0;
  uint64_t requests = 0;
  uint64_t warmup_requests = 0;
  uint64_t measured_requests = 0;
  double measured_seconds = 0;
  double total_seconds = 0;
  double throughput_ops = 0;
  uint64_t errors = 0;
  uint64_t not_found = 0;

  LatencySummary read;
  LatencySummary update;
  LatencySummary insert;
  LatencySummary scan;
  LatencySummary rmw;

  EngineDelta total;     // whole run including warm-up
  EngineDelta measured;  // after warm-up only

  // Reads over the measured window. Index 0 is the memtable, l + 1 is level l.
  std::vector<uint64_t> reads_by_level;
  std::array<uint64_t, 4> reads_by_source{};
  // Same buckets restricted to the hottest keys of the distribution.
  size_t hot_keys = 0;
  std::vector<uint64_t> hot_reads_by_level;
  std::array<uint64_t, 4> hot_reads_by_source{};
  // Share of hot-key reads answered by levels on the fastest tier.
  double hot_fast_tier_fraction = 0;

  BlockCacheStats cache;
  std::vector<TierIoRow> io;
  std::vector<std::string> tier_names;
  std::vector<int> level_tiers;
  std::vector<uint64_t> level_files;
  std::vector<uint64_t> level_bytes;

  size_t tracker_size = 0;
  std::array<uint64_t, 4> clock_histogram{};
  int policy_boundary = PinPolicy::kPinNone;
  double policy_prob = 0;
  bool pinning = false;
  double pin_threshold = 0;
};

nlohmann::json ToJson(const MetricsReport& r);
std::string HeatmapCsv(const MetricsReport& r);
std::string IostatCsv(const MetricsReport& r);

// Writes the JSON report to json_path and heatmap.csv / iostat.csv next to it.
Status WriteReport(const MetricsReport& r, const std::string& json_path);

// Ratios b / a for the headline numbers of two runs.
nlohmann::json CompareJson(const MetricsReport& a, const MetricsReport& b);

}  // namespace prism::bench
