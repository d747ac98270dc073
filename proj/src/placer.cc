#include "prism/placer.h"

#include <string>

#include "prism/simd/kernels.h"
#include "prism/tracker.h"

namespace prism {

int64_t ComputeScore(std::span<const int8_t> clocks, int weight) {
  if (weight == 3) return simd::SumCubedClocks(clocks);
  int64_t total = 0;
  for (int8_t c : clocks) {
    int64_t term = 1;
    for (int i = 0; i < weight; ++i) term *= c;
    total += term;
  }
  return total;
}

int8_t ClockOf(const Tracker* tracker, std::string_view key) {
  if (tracker == nullptr) return kUntrackedClock;
  const auto v = tracker->Lookup(key);
  return v ? static_cast<int8_t>(v->clock) : kUntrackedClock;
}

std::optional<size_t> SelectCompactionFile(const std::vector<FilePtr>& files) {
  std::optional<size_t> best;
  for (size_t i = 0; i < files.size(); ++i) {
    if (!best) {
      best = i;
      continue;
    }
    const auto& f = files[i];
    const auto& b = files[*best];
    if (f->score < b->score || (f->score == b->score && f->id < b->id)) best = i;
  }
  return best;
}

Status PinnedMerge(MergingIterator* input, PinDecider* decider, const PinnedMergeOptions& opts,
                   RecordSink* upper, RecordSink* lower, PinnedMergeStats* stats) {
  *stats = PinnedMergeStats{};
  bool pinning = opts.pinning && decider != nullptr && !decider->policy().pins_nothing();
  std::string last_key;
  bool have_last = false;

  for (input->SeekToFirst(); input->Valid(); input->Next()) {
    ++stats->input_records;
    const std::string_view key = input->key();
    if (have_last && key == last_key) {
      ++stats->superseded;
      continue;
    }
    last_key.assign(key);
    have_last = true;

    const ValueKind kind = input->kind();
    if (kind == ValueKind::kTombstone && opts.drop_tombstones) {
      ++stats->tombstones_dropped;
      continue;
    }
    const std::string_view value = input->value();
    const uint64_t bytes = RecordBytes(key, value);

    bool up = false;
    if (pinning && kind == ValueKind::kPut && opts.gap.Contains(key) && decider->ShouldPin(key)) {
      if (stats->pinned_bytes + bytes > opts.upper_room) {
        pinning = false;
        stats->room_exhausted = true;
      } else {
        up = true;
      }
    }

    Status s;
    if (up) {
      s = upper->Add(key, input->seqno(), kind, value);
      ++stats->pinned;
      stats->pinned_bytes += bytes;
      if (static_cast<size_t>(input->current_child()) >= opts.num_upper_children) {
        ++stats->up_moved;
      }
    } else {
      s = lower->Add(key, input->seqno(), kind, value);
      ++stats->down;
      stats->down_bytes += bytes;
    }
    if (!s.ok()) return s;
  }
  return input->status();
}

}  // namespace prism
