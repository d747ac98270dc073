#pragma once

// Level layout snapshots and the manifest log that persists them.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "prism/engine/record.h"
#include "prism/status.h"
#include "prism/tiers.h"

namespace prism {

class Table;

struct FileMeta {
  uint64_t id = 0;
  int level = 0;
  int tier = 0;
  uint64_t size = 0;
  uint64_t entries = 0;
  uint64_t tombstones = 0;
  SequenceNumber smallest_seq = 0;
  SequenceNumber largest_seq = 0;
  std::string smallest;
  std::string largest;
  // Popularity score assigned when the file was written.
  int64_t score = 0;
  // Output kept in L0 by a pinned L0 compaction; not counted toward the
  // L0 file trigger.
  bool retained = false;
  std::shared_ptr<Table> table;

  bool Overlaps(std::string_view lo, std::string_view hi) const {
    return !(largest < lo || smallest > hi);
  }
};

using FilePtr = std::shared_ptr<const FileMeta>;

// Immutable. L0 is ordered by largest_seq descending (newest first); every
// other level by smallest key.
struct Version {
  int num_levels = 0;
  std::vector<std::vector<FilePtr>> levels;

  explicit Version(int n = 5) : num_levels(n), levels(static_cast<size_t>(n)) {}

  const std::vector<FilePtr>& files(int level) const {
    return levels[static_cast<size_t>(level)];
  }
  uint64_t LevelBytes(int level) const;
  uint64_t TotalBytes() const;
  size_t NumFiles() const;
  // L0 files that count toward the compaction trigger.
  int L0TriggerFiles() const;
  // Files in level overlapping [lo, hi].
  std::vector<FilePtr> Overlapping(int level, std::string_view lo, std::string_view hi) const;
  // First file in a sorted level whose largest key is >= key (or nullptr).
  const FilePtr* FindFile(int level, std::string_view key) const;

  // Checks ordering and disjointness of levels >= 1.
  Status CheckInvariants() const;
};

struct VersionEdit {
  struct Deleted {
    int level;
    uint64_t id;
  };
  std::vector<Deleted> deleted;
  std::vector<FilePtr> added;
  uint64_t next_file_id = 0;
  SequenceNumber last_seq = 0;
};

// New version = base minus deleted plus added, with levels re-sorted.
std::shared_ptr<const Version> ApplyEdit(const Version& base, const VersionEdit& edit);

void SortLevel(int level, std::vector<FilePtr>* files);

struct ManifestState {
  std::vector<FileMeta> files;  // without table readers
  uint64_t next_file_id = 1;
  SequenceNumber last_seq = 0;
};

// Append-only text log. Each edit is a group of lines ending with "commit";
// trailing partial groups are ignored at replay.
class Manifest {
 public:
  ~Manifest();

  static Status Replay(const std::string& path, ManifestState* state);
  Status OpenForAppend(const std::string& path);
  Status Append(const VersionEdit& edit);
  // Rewrites the log as a single snapshot edit.
  Status WriteSnapshot(const std::string& path, const Version& v, uint64_t next_file_id,
                       SequenceNumber last_seq);

 private:
  std::FILE* f_ = nullptr;
};

std::string HexEncode(std::string_view s);
bool HexDecode(std::string_view hex, std::string* out);

}  // namespace prism
