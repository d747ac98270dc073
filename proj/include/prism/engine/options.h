#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "prism/config.h"
#include "prism/status.h"
#include "prism/tiers.h"

namespace prism {

struct Options {
  // Tree geometry.
  int num_levels = 5;
  uint64_t write_buffer_size = 64ull << 20;
  int level0_compaction_trigger = 4;
  int level0_stop_writes_trigger = 20;
  int max_immutable_memtables = 2;
  uint64_t max_bytes_for_level_base = 256ull << 20;  // L1 target
  double level_size_multiplier = 10.0;
  uint64_t target_file_size = 64ull << 20;
  // Cap on the inputs of one job when extra upper files are pulled in.
  // 0 means 25 x target_file_size.
  uint64_t max_compaction_bytes = 0;
  // Pinned retention stops this many target files short of a level's target.
  double pin_headroom_files = 0.5;
  size_t block_size = 4096;
  int bloom_bits_per_key = 10;
  uint64_t block_cache_bytes = 8ull << 20;
  size_t block_cache_shards = 16;
  size_t max_key_size = 4096;

  // Storage tiers.
  std::string tier_mapping = "NNNTQ";
  std::vector<TierSpec> tiers = DefaultTiers();
  bool inject_latency = true;
  double spin_margin_us = 12.0;
  // Compaction input reads pay the tier read latency over the whole file.
  bool inject_compaction_reads = true;

  // Read-aware placement.
  bool pinning_enabled = true;
  double pin_threshold = 0.10;
  uint64_t tracker_capacity = 100000;
  int score_weight = 3;
  bool track_scans = false;

  // Background work.
  int compaction_threads = 8;
  // Flushes and compactions run synchronously in the writing thread.
  bool inline_compaction = false;
  bool trivial_move = true;
  uint64_t seed = 1;

  bool create_if_missing = true;
  bool error_if_exists = false;

  uint64_t LevelTarget(int level) const;
  Status Validate() const;
};

// Applies key=value settings on top of *opts. Unknown keys are an error.
Status ApplyOptions(const KeyValues& kv, Options* opts);
Status LoadOptionsFile(const std::string& path, Options* opts);

}  // namespace prism
