#include "prism/bench/report.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

namespace prism::bench {

using nlohmann::json;

LatencySummary Summarize(std::vector<float>* samples) {
  LatencySummary s;
  s.count = samples->size();
  if (samples->empty()) return s;
  std::sort(samples->begin(), samples->end());
  const double sum = std::accumulate(samples->begin(), samples->end(), 0.0);
  s.mean_us = sum / static_cast<double>(samples->size());
  auto rank = [&](double p) {
    size_t idx = static_cast<size_t>(std::ceil(p * static_cast<double>(samples->size())));
    idx = std::clamp<size_t>(idx, 1, samples->size());
    return static_cast<double>((*samples)[idx - 1]);
  };
  s.p50_us = rank(0.50);
  s.p95_us = rank(0.95);
  s.p99_us = rank(0.99);
  s.max_us = samples->back();
  return s;
}

EngineDelta Diff(const DbStats& a, const DbStats& b) {
  EngineDelta d;
  d.flushes = a.flushes - b.flushes;
  d.compactions = a.compactions - b.compactions;
  d.trivial_moves = a.trivial_moves - b.trivial_moves;
  d.compaction_bytes_read = a.compaction_bytes_read - b.compaction_bytes_read;
  d.compaction_bytes_written = a.compaction_bytes_written - b.compaction_bytes_written;
  d.pinned_records = a.pinned_records - b.pinned_records;
  d.up_moved_records = a.up_moved_records - b.up_moved_records;
  d.write_stalls = a.write_stalls - b.write_stalls;
  d.stall_micros = a.stall_micros - b.stall_micros;
  d.failed_jobs = a.failed_jobs - b.failed_jobs;
  return d;
}

namespace {

json LatencyJson(const LatencySummary& s) {
  return json{{"count", s.count}, {"mean_us", s.mean_us}, {"p50_us", s.p50_us},
              {"p95_us", s.p95_us}, {"p99_us", s.p99_us}, {"max_us", s.max_us}};
}

json DeltaJson(const EngineDelta& d) {
  return json{{"flushes", d.flushes},
              {"compactions", d.compactions},
              {"trivial_moves", d.trivial_moves},
              {"compaction_bytes_read", d.compaction_bytes_read},
              {"compaction_bytes_written", d.compaction_bytes_written},
              {"pinned_records", d.pinned_records},
              {"up_moved_records", d.up_moved_records},
              {"write_stalls", d.write_stalls},
              {"stall_micros", d.stall_micros},
              {"failed_jobs", d.failed_jobs}};
}

std::string LevelName(size_t bucket) {
  return bucket == 0 ? std::string("memtable") : "L" + std::to_string(bucket - 1);
}

}  // namespace

json ToJson(const MetricsReport& r) {
  json j;
  j["workload"] = r.workload;
  j["distribution"] = r.distribution;
  j["theta"] = r.theta;
  j["seed"] = r.seed;
  j["clients"] = r.clients;
  j["requests"] = r.requests;
  j["warmup_requests"] = r.warmup_requests;
  j["measured_requests"] = r.measured_requests;
  j["measured_seconds"] = r.measured_seconds;
  j["total_seconds"] = r.total_seconds;
  j["throughput_ops"] = r.throughput_ops;
  j["errors"] = r.errors;
  j["not_found"] = r.not_found;
  j["pinning"] = r.pinning;
  j["pin_threshold"] = r.pin_threshold;
  j["latency"] = {{"read", LatencyJson(r.read)},     {"update", LatencyJson(r.update)},
                  {"insert", LatencyJson(r.insert)}, {"scan", LatencyJson(r.scan)},
                  {"rmw", LatencyJson(r.rmw)}};
  j["engine_total"] = DeltaJson(r.total);
  j["engine_measured"] = DeltaJson(r.measured);

  json levels = json::object();
  for (size_t i = 0; i < r.reads_by_level.size(); ++i) levels[LevelName(i)] = r.reads_by_level[i];
  j["reads_by_level"] = levels;
  json hot = json::object();
  for (size_t i = 0; i < r.hot_reads_by_level.size(); ++i) {
    hot[LevelName(i)] = r.hot_reads_by_level[i];
  }
  j["hot_keys"] = r.hot_keys;
  j["hot_reads_by_level"] = hot;
  j["hot_fast_tier_fraction"] = r.hot_fast_tier_fraction;
  json src = json::object();
  json hot_src = json::object();
  for (size_t i = 0; i < r.reads_by_source.size(); ++i) {
    src[ReadSourceName(static_cast<ReadSource>(i))] = r.reads_by_source[i];
    hot_src[ReadSourceName(static_cast<ReadSource>(i))] = r.hot_reads_by_source[i];
  }
  j["reads_by_source"] = src;
  j["hot_reads_by_source"] = hot_src;

  json cache = json::object();
  for (size_t k = 0; k < kNumBlockKinds; ++k) {
    const auto& s = r.cache.by_kind[k];
    const uint64_t total = s.hits + s.misses;
    cache[BlockKindName(static_cast<BlockKind>(k))] = {
        {"hits", s.hits},
        {"misses", s.misses},
        {"hit_rate", total == 0 ? 0.0 : static_cast<double>(s.hits) / static_cast<double>(total)}};
  }
  j["block_cache"] = cache;

  json tree = json::array();
  for (size_t l = 0; l < r.level_files.size(); ++l) {
    json row{{"level", l}, {"files", r.level_files[l]}, {"bytes", r.level_bytes[l]}};
    if (l < r.level_tiers.size()) {
      row["tier"] = r.tier_names.at(static_cast<size_t>(r.level_tiers[l]));
    }
    tree.push_back(row);
  }
  j["levels"] = tree;
  j["tracker"] = {{"size", r.tracker_size},
                  {"clock_histogram", r.clock_histogram},
                  {"policy_boundary", r.policy_boundary},
                  {"policy_prob", r.policy_prob}};
  return j;
}

std::string HeatmapCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "bucket,tier,reads,hot_reads\n";
  for (size_t i = 0; i < r.reads_by_level.size(); ++i) {
    std::string tier = "dram";
    if (i > 0 && i - 1 < r.level_tiers.size()) {
      tier = r.tier_names.at(static_cast<size_t>(r.level_tiers[i - 1]));
    }
    const uint64_t hot = i < r.hot_reads_by_level.size() ? r.hot_reads_by_level[i] : 0;
    os << LevelName(i) << ',' << tier << ',' << r.reads_by_level[i] << ',' << hot << '\n';
  }
  return os.str();
}

std::string IostatCsv(const MetricsReport& r) {
  std::ostringstream os;
  os << "level,tier,block_reads,read_bytes,write_bytes\n";
  for (const auto& row : r.io) {
    os << row.level << ',' << r.tier_names.at(static_cast<size_t>(row.tier)) << ','
       << row.block_reads << ',' << row.read_bytes << ',' << row.write_bytes << '\n';
  }
  return os.str();
}

Status WriteReport(const MetricsReport& r, const std::string& json_path) {
  namespace fs = std::filesystem;
  const fs::path p(json_path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
  auto write = [](const fs::path& path, const std::string& text) -> Status {
    std::ofstream out(path, std::ios::trunc);
    out << text;
    if (!out) return Status::IOError("cannot write " + path.string());
    return Status::OK();
  };
  Status s = write(p, ToJson(r).dump(2) + "\n");
  if (s.ok()) s = write(dir / "heatmap.csv", HeatmapCsv(r));
  if (s.ok()) s = write(dir / "iostat.csv", IostatCsv(r));
  return s;
}

json CompareJson(const MetricsReport& a, const MetricsReport& b) {
  auto ratio = [](double num, double den) -> json {
    if (den == 0) return nullptr;
    return num / den;
  };
  json j;
  j["a"] = {{"throughput_ops", a.throughput_ops},
            {"compactions", a.total.compactions},
            {"compaction_bytes", a.total.compaction_bytes_written},
            {"hot_fast_tier_fraction", a.hot_fast_tier_fraction},
            {"read_p99_us", a.read.p99_us}};
  j["b"] = {{"throughput_ops", b.throughput_ops},
            {"compactions", b.total.compactions},
            {"compaction_bytes", b.total.compaction_bytes_written},
            {"hot_fast_tier_fraction", b.hot_fast_tier_fraction},
            {"read_p99_us", b.read.p99_us}};
  j["ratio_b_over_a"] = {
      {"throughput", ratio(b.throughput_ops, a.throughput_ops)},
      {"compactions", ratio(static_cast<double>(b.total.compactions),
                            static_cast<double>(a.total.compactions))},
      {"compaction_bytes", ratio(static_cast<double>(b.total.compaction_bytes_written),
                                 static_cast<double>(a.total.compaction_bytes_written))},
      {"read_p99", ratio(b.read.p99_us, a.read.p99_us)}};
  j["hot_fast_tier_shift"] = b.hot_fast_tier_fraction - a.hot_fast_tier_fraction;
  return j;
}

}  // namespace prism::bench
