#pragma once

#include <cstdint>
#include <string>

#include "prism/bench/report.h"
#include "prism/bench/workload.h"
#include "prism/engine/db.h"

namespace prism::bench {

// 1M x 1 KB store: level targets 1/10/100 MB over a ~900 MB bottom level,
// so NNNTQ splits the bytes roughly 1:9:90. Cache 20 MB.
Options DeskOptions();

struct LoadResult {
  uint64_t records = 0;
  double seconds = 0;
};

// Inserts record_count keys in key order. Rejects a store that already
// holds data.
Status LoadDatabase(DB* db, const WorkloadSpec& spec, uint64_t seed, LoadResult* out);

struct RunOptions {
  uint64_t seed = 1;
  size_t hot_keys = 1000;
};

Status RunWorkload(DB* db, const WorkloadSpec& spec, const RunOptions& opts, MetricsReport* out);

// Copies a closed store directory (used to reuse one load across runs).
Status CopyStore(const std::string& from, const std::string& to);

}  // namespace prism::bench
