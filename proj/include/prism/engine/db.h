#pragma once

#include <array>
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "prism/engine/block_cache.h"
#include "prism/engine/compaction_picker.h"
#include "prism/engine/memtable.h"
#include "prism/engine/options.h"
#include "prism/engine/table.h"
#include "prism/engine/version.h"
#include "prism/mapper.h"
#include "prism/status.h"
#include "prism/tiers.h"
#include "prism/tracker.h"

namespace prism {

enum class ReadSource : uint8_t { kNone, kMemtable, kBlockCache, kDevice };
const char* ReadSourceName(ReadSource s);

// Where a successful point read was served from.
struct ReadInfo {
  int level = -2;  // -1 memtable, otherwise the tree level
  ReadSource source = ReadSource::kNone;
  SequenceNumber seqno = 0;
};

struct CompactionEvent {
  uint64_t job_id = 0;
  int level = 0;
  bool trivial_move = false;
  std::vector<uint64_t> upper_inputs;
  std::vector<uint64_t> lower_inputs;
  std::vector<int64_t> input_scores;
  size_t upper_outputs = 0;
  size_t lower_outputs = 0;
  uint64_t records_in = 0;
  uint64_t pinned = 0;
  uint64_t up_moved = 0;
  uint64_t down = 0;
  uint64_t superseded = 0;
  uint64_t tombstones_dropped = 0;
  uint64_t bytes_read = 0;
  uint64_t bytes_written = 0;
  int policy_boundary = PinPolicy::kPinNone;
  double policy_prob = 0;
  uint64_t micros = 0;
};

std::string CompactionEventCsvHeader();
std::string CompactionEventCsv(const CompactionEvent& e);

struct DbStats {
  uint64_t puts = 0;
  uint64_t deletes = 0;
  uint64_t gets = 0;
  uint64_t gets_found = 0;
  uint64_t scans = 0;
  // Index 0 is the memtable, index l + 1 is level l.
  std::array<uint64_t, kMaxLevels + 1> gets_by_level{};
  std::array<uint64_t, 4> gets_by_source{};
  uint64_t flushes = 0;
  uint64_t flush_bytes = 0;
  uint64_t compactions = 0;  // merge jobs
  uint64_t trivial_moves = 0;
  uint64_t compaction_bytes_read = 0;
  uint64_t compaction_bytes_written = 0;
  uint64_t pinned_records = 0;
  uint64_t up_moved_records = 0;
  uint64_t write_stalls = 0;
  uint64_t stall_micros = 0;
  uint64_t failed_jobs = 0;
  std::vector<uint64_t> level_files;
  std::vector<uint64_t> level_bytes;
  BlockCacheStats cache;
};

class DB {
 public:
  static Status Open(const Options& options, const std::string& path, std::unique_ptr<DB>* out);
  ~DB();
  DB(const DB&) = delete;
  DB& operator=(const DB&) = delete;

  Status Put(std::string_view key, std::string_view value, SequenceNumber* seq = nullptr);
  Status Delete(std::string_view key, SequenceNumber* seq = nullptr);
  Status Get(std::string_view key, std::string* value, ReadInfo* info = nullptr);
  // Up to count live records with key >= start, ascending.
  Status Scan(std::string_view start, size_t count,
              std::vector<std::pair<std::string, std::string>>* out);

  // Writes the active memtable to a new L0 file and waits for it. *out is
  // null when the memtable was empty.
  Status FlushMemTable(FilePtr* out = nullptr);
  // Waits until no flush or compaction is pending or running.
  Status CompactUntilIdle();
  // Runs one compaction of level into level + 1 even if the level is under
  // its target. No-op for an empty level.
  Status CompactLevel(int level);
  // Flushes the memtable, stops background work and closes the manifest.
  Status Close();

  DbStats GetStats() const;
  void ResetStats();
  std::vector<CompactionEvent> CompactionEvents() const;
  std::shared_ptr<const Version> CurrentVersion() const;

  const Options& options() const { return options_; }
  const std::string& path() const { return path_; }
  Tracker* tracker() { return tracker_.get(); }
  Mapper* mapper() { return mapper_.get(); }
  TierEnv* env() { return env_.get(); }
  BlockCache* block_cache() { return cache_.get(); }
  SequenceNumber last_sequence() const { return last_seq_.load(); }

 private:
  struct SuperVersion {
    std::shared_ptr<MemTable> mem;
    std::vector<std::shared_ptr<MemTable>> imms;  // newest first
    std::shared_ptr<const Version> version;
  };
  struct JobResult;

  DB(const Options& options, std::string path);
  Status Recover();
  void StartThreads();

  Status Write(std::string_view key, std::string_view value, ValueKind kind,
               SequenceNumber* seq);
  Status MakeRoomForWrite(std::unique_lock<std::mutex>* write_lock);
  void SwitchMemTableLocked();
  void PublishLocked();
  std::shared_ptr<const SuperVersion> GetSuperVersion() const;

  Status FlushOldestImm();
  void FlushLoop();
  void CompactionLoop();
  Status RunCompactionsInline();
  Status ExecutePlan(const CompactionPlan& plan, uint64_t job_id);
  Status RunPlan(const CompactionPlan& plan, uint64_t job_id, JobResult* result);
  Status InstallLocked(const VersionEdit& edit);
  void RecordEventLocked(const CompactionEvent& e);
  PickerConfig MakePickerConfig() const;
  bool IdleLocked() const;

  uint64_t NewFileId() { return next_file_id_.fetch_add(1); }
  void TrackRead(std::string_view key, SequenceNumber seq);
  Status OutputTable(int level, bool retained, std::string contents, const TableProps& props,
                     const std::vector<int8_t>& clocks, FilePtr* out);
  const Tracker* ScoringTracker() const;

  friend class OutputSink;

  Options options_;
  std::string path_;
  std::unique_ptr<TierEnv> env_;
  std::unique_ptr<BlockCache> cache_;
  std::unique_ptr<Mapper> mapper_;
  std::unique_ptr<Tracker> tracker_;

  std::mutex write_mu_;
  mutable std::mutex mu_;
  std::condition_variable bg_cv_;
  std::condition_variable state_cv_;
  std::shared_ptr<MemTable> mem_;
  std::deque<std::shared_ptr<MemTable>> imms_;  // oldest first
  std::shared_ptr<const Version> version_;
  RunningJobs running_;
  int running_jobs_ = 0;
  bool flushing_ = false;
  bool closing_ = false;
  std::atomic<bool> closed_{false};
  Status bg_error_;
  FilePtr last_flushed_;
  uint64_t job_counter_ = 0;
  Manifest manifest_;
  std::vector<CompactionEvent> events_;
  std::FILE* event_log_ = nullptr;

  mutable std::mutex sv_mu_;
  std::shared_ptr<const SuperVersion> sv_;

  std::atomic<uint64_t> next_file_id_{1};
  std::atomic<SequenceNumber> last_seq_{0};

  std::thread flush_thread_;
  std::vector<std::thread> workers_;

  struct Counters {
    std::atomic<uint64_t> puts{0}, deletes{0}, gets{0}, gets_found{0}, scans{0};
    std::array<std::atomic<uint64_t>, kMaxLevels + 1> gets_by_level{};
    std::array<std::atomic<uint64_t>, 4> gets_by_source{};
    std::atomic<uint64_t> flushes{0}, flush_bytes{0}, compactions{0}, trivial_moves{0};
    std::atomic<uint64_t> compaction_bytes_read{0}, compaction_bytes_written{0};
    std::atomic<uint64_t> pinned{0}, up_moved{0}, write_stalls{0}, stall_micros{0};
    std::atomic<uint64_t> failed_jobs{0};
  };
  mutable Counters counters_;
};

}  // namespace prism
