#pragma once

// Multi-bit clock popularity tracker over recently read keys.
//
// Each tracked key maps to one byte: the top two bits hold the clock value,
// the bottom six bits a fingerprint of the version that was read. Reads
// insert or refresh entries without doing any eviction work; a background
// task sweeps a clock hand over the table, decrementing clocks and removing
// keys whose clock is already zero.

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <vector>

#include "prism/hash.h"

namespace prism {

class ClockHistogram;

namespace clock_entry {
inline constexpr uint8_t kMaxClock = 3;
inline constexpr uint8_t Pack(uint8_t clock, uint8_t fingerprint) {
  return static_cast<uint8_t>((clock << 6) | (fingerprint & 0x3f));
}
inline constexpr uint8_t Clock(uint8_t packed) { return packed >> 6; }
inline constexpr uint8_t Fingerprint(uint8_t packed) { return packed & 0x3f; }
}  // namespace clock_entry

inline uint8_t VersionFingerprint(uint64_t seqno) { return Mix64(seqno) & 0x3f; }

enum class ClockTransition { kInserted, kPromoted, kResetAsNew };

struct TrackedValue {
  uint8_t clock;
  uint8_t fingerprint;
};

struct TrackerOptions {
  size_t capacity = 100000;
  size_t shards = 64;
  // The maintenance task evicts down to this fraction of capacity.
  double evict_to = 0.95;
  bool background_eviction = true;
};

class Tracker {
 public:
  Tracker(TrackerOptions options, ClockHistogram* histogram);
  ~Tracker();
  Tracker(const Tracker&) = delete;
  Tracker& operator=(const Tracker&) = delete;

  // Called on every successful point read with the version that was served.
  ClockTransition TrackRead(std::string_view key, uint64_t seqno);

  std::optional<TrackedValue> Lookup(std::string_view key) const;

  // Advances the clock hand until target_count keys were removed or every
  // entry has been visited enough times to reach clock zero. Returns the
  // number of removed keys. Eviction passes are serialized.
  size_t RunEvictionPass(size_t target_count);

  size_t size() const { return size_.load(std::memory_order_relaxed); }
  size_t capacity() const { return options_.capacity; }

  // Packed bytes of every tracked entry, for histogram cross-checks.
  std::vector<uint8_t> PackedValues() const;

  void StartBackground();
  void StopBackground();
  // Blocks until the tracked count is at or below capacity (or the
  // background task is not running).
  void WaitForEviction();

  uint64_t inserts() const { return inserts_.load(std::memory_order_relaxed); }
  uint64_t promotions() const { return promotions_.load(std::memory_order_relaxed); }
  uint64_t lookups() const { return lookups_.load(std::memory_order_relaxed); }
  uint64_t evictions() const { return evictions_.load(std::memory_order_relaxed); }

 private:
  struct StringHash {
    using is_transparent = void;
    size_t operator()(std::string_view s) const { return Hash64(s); }
  };
  struct StringEq {
    using is_transparent = void;
    bool operator()(std::string_view a, std::string_view b) const { return a == b; }
  };
  using Map = std::unordered_map<std::string, std::atomic<uint8_t>, StringHash, StringEq>;

  struct Shard {
    mutable std::shared_mutex mu;
    Map map;
  };

  Shard& ShardFor(std::string_view key) const;
  ClockTransition Refresh(std::atomic<uint8_t>& slot, uint8_t fingerprint);
  void MaintenanceLoop();

  TrackerOptions options_;
  ClockHistogram* histogram_;
  std::unique_ptr<Shard[]> shards_;
  std::atomic<size_t> size_{0};

  std::mutex evict_mu_;
  size_t hand_shard_ = 0;
  size_t hand_bucket_ = 0;

  std::mutex bg_mu_;
  std::condition_variable bg_cv_;
  std::condition_variable idle_cv_;
  std::atomic<bool> wake_pending_{false};
  bool stop_ = false;
  std::thread bg_;

  std::atomic<uint64_t> inserts_{0};
  std::atomic<uint64_t> promotions_{0};
  mutable std::atomic<uint64_t> lookups_{0};
  std::atomic<uint64_t> evictions_{0};
};

}  // namespace prism
