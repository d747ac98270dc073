#pragma once

// Chooses the next compaction from a version and the set of running jobs.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "prism/engine/version.h"
#include "prism/placer.h"

namespace prism {

enum class FileSelection {
  kMinScore,     // least popular file first
  kLargestFile,  // classic size-based choice
};

struct PickerConfig {
  int num_levels = 5;
  int level0_trigger = 4;
  // level_targets[0] bounds the pinned bytes kept in L0 by one job;
  // level_targets[l] for l >= 1 is the level's size target.
  std::vector<uint64_t> level_targets;
  FileSelection selection = FileSelection::kMinScore;
  // Extra upper files join a job only while the lower inputs stay the same
  // and the job stays under this many bytes. 0 disables it.
  uint64_t max_compaction_bytes = 0;
  // Retention stops this many bytes short of a level's target, so a job
  // frees about as much as a plain one and the next flush does not
  // immediately re-trigger the level.
  uint64_t room_headroom = 0;
};

struct KeyRange {
  std::string lo;
  std::string hi;
  bool Overlaps(const KeyRange& o) const { return !(hi < o.lo || lo > o.hi); }
};

struct RunningJobs {
  std::unordered_set<uint64_t> busy_files;
  // Key spans of running jobs registered on each level they touch.
  std::vector<std::vector<KeyRange>> spans;
  bool l0_running = false;

  explicit RunningJobs(int levels = 5) : spans(static_cast<size_t>(levels)) {}
  bool Conflicts(int level, const KeyRange& r) const;
};

struct CompactionPlan {
  int level = 0;  // upper level; outputs go to level and level + 1
  std::vector<FilePtr> upper;
  std::vector<FilePtr> lower;
  KeyRange span;
  KeyGap gap;
  uint64_t upper_room = 0;
  double ratio = 0;
  // Inputs can be relinked into level + 1 without rewriting.
  bool movable = false;
};

// Compaction pressure per level: L0 counts trigger files against the
// trigger, other levels bytes against their target. The bottom level is 0.
std::vector<double> LevelRatios(const Version& v, const PickerConfig& cfg);

// Highest ratio wins (ties to the lower level); levels whose inputs are busy
// fall through to the next candidate.
std::optional<CompactionPlan> PickCompaction(const Version& v, const PickerConfig& cfg,
                                             const RunningJobs& running);

// Plan for one level regardless of its ratio.
std::optional<CompactionPlan> PlanForLevel(const Version& v, const PickerConfig& cfg,
                                           const RunningJobs& running, int level);

void RegisterPlan(const CompactionPlan& plan, RunningJobs* running);
void UnregisterPlan(const CompactionPlan& plan, RunningJobs* running);

}  // namespace prism
