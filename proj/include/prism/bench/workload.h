#pragma once

// YCSB-style workload description, read from plain key=value files.

#include <cstdint>
#include <string>

#include "prism/config.h"
#include "prism/status.h"

namespace prism::bench {

enum class KeyDistribution { kZipfian, kLatest, kUniform };

const char* KeyDistributionName(KeyDistribution d);

struct WorkloadSpec {
  std::string name = "B";
  double read = 0.95;
  double update = 0.05;
  double insert = 0;
  double scan = 0;
  double rmw = 0;  // read-modify-write
  KeyDistribution distribution = KeyDistribution::kZipfian;
  double theta = 0.99;
  uint64_t record_count = 1000000;
  uint64_t value_size = 1024;
  uint64_t request_count = 5000000;
  int clients = 24;
  double warmup = 0.30;
  int scan_length = 100;
  int key_width = 16;
  // Seeds the permutation that spreads popular ranks over the key space.
  // Kept apart from the run seed so paired runs share one hot set.
  uint64_t scramble_seed = 0x5eed;

  Status Validate() const;
};

// Standard mixes A..F; every other field keeps its default.
Status PresetWorkload(const std::string& name, WorkloadSpec* out);

// Keys: name (preset applied first), read, update, insert, scan, rmw,
// distribution, theta, records, value_size, requests, clients, warmup,
// scan_length, key_width, scramble_seed.
Status ApplyWorkload(const KeyValues& kv, WorkloadSpec* out);
Status LoadWorkloadFile(const std::string& path, WorkloadSpec* out);

// Fixed-width zero-padded decimal.
std::string FormatKey(uint64_t index, int width);

}  // namespace prism::bench
