#pragma once

// Read-aware compaction: SST popularity scores, victim selection, and the
// pinned merge that keeps popular records in the upper level of a job.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "prism/engine/merger.h"
#include "prism/engine/record.h"
#include "prism/engine/version.h"
#include "prism/mapper.h"
#include "prism/status.h"

namespace prism {

class Tracker;

inline constexpr int8_t kUntrackedClock = -1;

// Sum of clock^weight; untracked keys carry clock -1. weight 3 runs on the
// vector kernel.
int64_t ComputeScore(std::span<const int8_t> clocks, int weight = 3);

// Clock value of key, or -1 when the tracker does not hold it.
int8_t ClockOf(const Tracker* tracker, std::string_view key);

// Lowest score wins; ties go to the lowest (oldest) file id. Returns the
// position in files, or nullopt for an empty list.
std::optional<size_t> SelectCompactionFile(const std::vector<FilePtr>& files);

// Open key interval (lo, hi); a missing bound is unbounded.
struct KeyGap {
  std::optional<std::string> lo;
  std::optional<std::string> hi;

  bool Contains(std::string_view key) const {
    if (lo && !(key > *lo)) return false;
    if (hi && !(key < *hi)) return false;
    return true;
  }
};

class RecordSink {
 public:
  virtual ~RecordSink() = default;
  virtual Status Add(std::string_view key, SequenceNumber seq, ValueKind kind,
                     std::string_view value) = 0;
};

// Bytes a record contributes to an output level.
inline uint64_t RecordBytes(std::string_view key, std::string_view value) {
  return key.size() + value.size() + 12;
}

struct PinnedMergeOptions {
  // Children [0, num_upper_children) of the merging iterator come from the
  // upper level; the rest from the lower level.
  size_t num_upper_children = 0;
  // Lower level is the bottom of the tree.
  bool drop_tombstones = false;
  bool pinning = true;
  // Upper outputs must fall strictly inside this interval.
  KeyGap gap;
  // Pinned bytes allowed before pinning stops for the rest of the job.
  uint64_t upper_room = 0;
};

struct PinnedMergeStats {
  uint64_t input_records = 0;
  uint64_t pinned = 0;      // routed to the upper output
  uint64_t up_moved = 0;    // pinned records that came from the lower level
  uint64_t down = 0;        // routed to the lower output
  uint64_t superseded = 0;  // older versions dropped
  uint64_t tombstones_dropped = 0;
  uint64_t pinned_bytes = 0;
  uint64_t down_bytes = 0;
  bool room_exhausted = false;
};

// Streams the merged inputs once. The newest version of every key survives
// (unless it is a tombstone reaching the bottom); survivors go up when the
// decider pins them and they fit the gap and the room, otherwise down.
// Tombstones never go up.
Status PinnedMerge(MergingIterator* input, PinDecider* decider, const PinnedMergeOptions& opts,
                   RecordSink* upper, RecordSink* lower, PinnedMergeStats* stats);

}  // namespace prism
