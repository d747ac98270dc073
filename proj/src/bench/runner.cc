#include "prism/bench/runner.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <mutex>
#include <thread>

#include "prism/bench/generators.h"
#include "prism/hash.h"

namespace prism::bench {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double>(b - a).count();
}

enum OpType { kRead, kUpdate, kInsert, kScan, kRmw, kNumOps };

// Random bytes reused as value material; each write takes a random window.
std::string ValuePool(uint64_t seed, size_t value_size) {
  Rng rng(seed);
  std::string pool(value_size * 2 + 64, '\0');
  for (size_t i = 0; i + 8 <= pool.size(); i += 8) {
    const uint64_t w = rng();
    std::memcpy(&pool[i], &w, 8);
  }
  return pool;
}

struct ClientState {
  std::array<std::vector<float>, kNumOps> lat;
  std::vector<uint64_t> reads_by_level;
  std::vector<uint64_t> hot_by_level;
  std::array<uint64_t, 4> by_source{};
  std::array<uint64_t, 4> hot_by_source{};
  uint64_t errors = 0;
  uint64_t not_found = 0;
};

}  // namespace

Options DeskOptions() {
  Options o;
  o.num_levels = 5;
  o.write_buffer_size = 250ull << 10;
  o.level0_compaction_trigger = 4;
  o.level0_stop_writes_trigger = 20;
  o.max_bytes_for_level_base = 1ull << 20;
  o.level_size_multiplier = 10;
  o.target_file_size = 256ull << 10;
  o.block_cache_bytes = 20ull << 20;
  o.tracker_capacity = 100000;
  o.compaction_threads = 8;
  o.tier_mapping = "NNNTQ";
  return o;
}

Status LoadDatabase(DB* db, const WorkloadSpec& spec, uint64_t seed, LoadResult* out) {
  const auto v = db->CurrentVersion();
  if (db->last_sequence() != 0 || v->NumFiles() != 0) {
    return Status::InvalidArgument("store already holds data");
  }
  const auto start = Clock::now();
  const std::string pool = ValuePool(seed, spec.value_size);
  Rng rng(seed);
  std::uniform_int_distribution<size_t> offset(0, pool.size() - spec.value_size);
  for (uint64_t i = 0; i < spec.record_count; ++i) {
    const std::string key = FormatKey(i, spec.key_width);
    Status s = db->Put(key, std::string_view(pool).substr(offset(rng), spec.value_size));
    if (!s.ok()) return s;
  }
  Status s = db->FlushMemTable();
  if (s.ok()) s = db->CompactUntilIdle();
  if (!s.ok()) return s;
  if (out != nullptr) {
    out->records = spec.record_count;
    out->seconds = Seconds(start, Clock::now());
  }
  return Status::OK();
}

Status RunWorkload(DB* db, const WorkloadSpec& spec, const RunOptions& opts, MetricsReport* out) {
  Status s = spec.Validate();
  if (!s.ok()) return s;
  const KeyChooser chooser(spec);
  std::vector<uint8_t> hot(spec.record_count, 0);
  for (uint64_t k : chooser.HotKeys(opts.hot_keys)) hot[k] = 1;

  const int levels = db->options().num_levels;
  const uint64_t warmup_ops =
      static_cast<uint64_t>(spec.warmup * static_cast<double>(spec.request_count));
  const std::array<double, kNumOps> mix = {spec.read, spec.update, spec.insert, spec.scan,
                                           spec.rmw};

  db->ResetStats();
  const DbStats start_stats = db->GetStats();
  DbStats warm_stats = start_stats;
  std::once_flag warm_once;
  Clock::time_point warm_time = Clock::now();
  std::atomic<uint64_t> ticket{0};
  std::atomic<uint64_t> next_key{spec.record_count};

  std::vector<ClientState> states(static_cast<size_t>(spec.clients));
  std::vector<std::thread> threads;
  const auto start = Clock::now();
  if (warmup_ops == 0) warm_time = start;

  for (int c = 0; c < spec.clients; ++c) {
    const uint64_t quota = spec.request_count / static_cast<uint64_t>(spec.clients) +
                           (static_cast<uint64_t>(c) < spec.request_count % spec.clients ? 1 : 0);
    threads.emplace_back([&, c, quota] {
      ClientState& st = states[static_cast<size_t>(c)];
      st.reads_by_level.assign(static_cast<size_t>(levels + 1), 0);
      st.hot_by_level.assign(static_cast<size_t>(levels + 1), 0);
      Rng rng(Mix64(opts.seed * 0x9e3779b97f4a7c15ULL + static_cast<uint64_t>(c)));
      const std::string pool = ValuePool(rng(), spec.value_size);
      std::uniform_int_distribution<size_t> offset(0, pool.size() - spec.value_size);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      std::string value;
      std::vector<std::pair<std::string, std::string>> scan_out;

      for (uint64_t n = 0; n < quota; ++n) {
        double u = unit(rng);
        int op = 0;
        while (op < kNumOps - 1 && u >= mix[static_cast<size_t>(op)]) {
          u -= mix[static_cast<size_t>(op)];
          ++op;
        }
        uint64_t key_index = 0;
        if (op == kInsert) {
          key_index = next_key.fetch_add(1);
        } else {
          key_index = chooser.Next(rng, next_key.load(std::memory_order_relaxed));
        }
        const std::string key = FormatKey(key_index, spec.key_width);
        const std::string_view new_value =
            std::string_view(pool).substr(offset(rng), spec.value_size);

        const uint64_t t = ticket.fetch_add(1);
        if (t == warmup_ops && warmup_ops > 0) {
          std::call_once(warm_once, [&] {
            warm_stats = db->GetStats();
            warm_time = Clock::now();
          });
        }
        const bool measured = t >= warmup_ops;
        const auto t0 = Clock::now();
        Status os;
        ReadInfo info;
        bool read_done = false;
        switch (op) {
          case kRead:
            os = db->Get(key, &value, &info);
            read_done = true;
            break;
          case kUpdate:
          case kInsert:
            os = db->Put(key, new_value);
            break;
          case kScan:
            os = db->Scan(key, static_cast<size_t>(spec.scan_length), &scan_out);
            break;
          case kRmw:
            os = db->Get(key, &value, &info);
            read_done = true;
            if (os.ok() || os.IsNotFound()) os = db->Put(key, new_value);
            break;
          default:
            break;
        }
        const auto t1 = Clock::now();
        if (!measured) continue;
        st.lat[static_cast<size_t>(op)].push_back(
            static_cast<float>(std::chrono::duration<double, std::micro>(t1 - t0).count()));
        if (os.IsNotFound()) {
          ++st.not_found;
        } else if (!os.ok()) {
          ++st.errors;
        }
        if (read_done && info.source != ReadSource::kNone) {
          const size_t bucket = static_cast<size_t>(info.level + 1);
          ++st.reads_by_level[bucket];
          ++st.by_source[static_cast<size_t>(info.source)];
          if (key_index < hot.size() && hot[key_index] != 0) {
            ++st.hot_by_level[bucket];
            ++st.hot_by_source[static_cast<size_t>(info.source)];
          }
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  const auto end = Clock::now();
  const DbStats end_stats = db->GetStats();

  MetricsReport r;
  r.workload = spec.name;
  r.distribution = KeyDistributionName(spec.distribution);
  r.theta = spec.theta;
  r.seed = opts.seed;
  r.clients = spec.clients;
  r.requests = spec.request_count;
  r.warmup_requests = warmup_ops;
  r.measured_requests = spec.request_count - warmup_ops;
  r.measured_seconds = Seconds(warm_time, end);
  r.total_seconds = Seconds(start, end);
  r.throughput_ops =
      r.measured_seconds > 0 ? static_cast<double>(r.measured_requests) / r.measured_seconds : 0;
  r.total = Diff(end_stats, start_stats);
  r.measured = Diff(end_stats, warm_stats);

  std::array<std::vector<float>, kNumOps> lat;
  r.reads_by_level.assign(static_cast<size_t>(levels + 1), 0);
  r.hot_reads_by_level.assign(static_cast<size_t>(levels + 1), 0);
  for (auto& st : states) {
    for (size_t o = 0; o < kNumOps; ++o) {
      lat[o].insert(lat[o].end(), st.lat[o].begin(), st.lat[o].end());
      st.lat[o] = {};
    }
    for (size_t b = 0; b < r.reads_by_level.size(); ++b) {
      r.reads_by_level[b] += st.reads_by_level[b];
      r.hot_reads_by_level[b] += st.hot_by_level[b];
    }
    for (size_t i = 0; i < 4; ++i) {
      r.reads_by_source[i] += st.by_source[i];
      r.hot_reads_by_source[i] += st.hot_by_source[i];
    }
    r.errors += st.errors;
    r.not_found += st.not_found;
  }
  r.read = Summarize(&lat[kRead]);
  r.update = Summarize(&lat[kUpdate]);
  r.insert = Summarize(&lat[kInsert]);
  r.scan = Summarize(&lat[kScan]);
  r.rmw = Summarize(&lat[kRmw]);

  TierEnv* env = db->env();
  for (const auto& t : env->tiers()) r.tier_names.push_back(t.name);
  for (int l = 0; l < levels; ++l) r.level_tiers.push_back(env->TierForLevel(l));
  int fastest = 0;
  for (size_t t = 1; t < env->tiers().size(); ++t) {
    if (env->tiers()[t].read_latency_us <
        env->tiers()[static_cast<size_t>(fastest)].read_latency_us) {
      fastest = static_cast<int>(t);
    }
  }
  r.hot_keys = opts.hot_keys;
  uint64_t hot_total = 0;
  uint64_t hot_fast = 0;
  for (size_t b = 0; b < r.hot_reads_by_level.size(); ++b) {
    hot_total += r.hot_reads_by_level[b];
    if (b > 0 && r.level_tiers[b - 1] == fastest) hot_fast += r.hot_reads_by_level[b];
  }
  r.hot_fast_tier_fraction =
      hot_total == 0 ? 0 : static_cast<double>(hot_fast) / static_cast<double>(hot_total);

  r.cache = end_stats.cache;
  r.io = env->IoRows();
  r.level_files = end_stats.level_files;
  r.level_bytes = end_stats.level_bytes;
  r.tracker_size = db->tracker()->size();
  r.clock_histogram = db->mapper()->histogram().Snapshot();
  const PinPolicy policy = db->mapper()->CurrentPolicy();
  r.policy_boundary = policy.boundary;
  r.policy_prob = policy.boundary_prob;
  r.pinning = db->options().pinning_enabled;
  r.pin_threshold = db->options().pin_threshold;
  *out = std::move(r);
  return Status::OK();
}

Status CopyStore(const std::string& from, const std::string& to) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::remove_all(to, ec);
  fs::create_directories(fs::path(to).parent_path(), ec);
  fs::copy(from, to, fs::copy_options::recursive, ec);
  if (ec) return Status::IOError("copy " + from + " -> " + to + ": " + ec.message());
  return Status::OK();
}

}  // namespace prism::bench
