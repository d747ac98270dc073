#include "prism/engine/compaction_picker.h"

#include <algorithm>
#include <numeric>

namespace prism {

bool RunningJobs::Conflicts(int level, const KeyRange& r) const {
  for (const auto& s : spans[static_cast<size_t>(level)]) {
    if (s.Overlaps(r)) return true;
  }
  return false;
}

std::vector<double> LevelRatios(const Version& v, const PickerConfig& cfg) {
  std::vector<double> ratios(static_cast<size_t>(cfg.num_levels), 0.0);
  ratios[0] = static_cast<double>(v.L0TriggerFiles()) / cfg.level0_trigger;
  for (int l = 1; l + 1 < cfg.num_levels; ++l) {
    const double target = static_cast<double>(cfg.level_targets[static_cast<size_t>(l)]);
    ratios[static_cast<size_t>(l)] = static_cast<double>(v.LevelBytes(l)) / target;
  }
  return ratios;
}

namespace {

KeyRange RangeOf(const std::vector<FilePtr>& a, const std::vector<FilePtr>& b) {
  KeyRange r;
  bool first = true;
  for (const auto* list : {&a, &b}) {
    for (const auto& f : *list) {
      if (first || f->smallest < r.lo) r.lo = f->smallest;
      if (first || f->largest > r.hi) r.hi = f->largest;
      first = false;
    }
  }
  return r;
}

bool AnyBusy(const std::vector<FilePtr>& files, const RunningJobs& running) {
  return std::any_of(files.begin(), files.end(),
                     [&](const FilePtr& f) { return running.busy_files.count(f->id) != 0; });
}

// Pulls in every upper file inside the job's full key span when that leaves
// the lower inputs unchanged. [*first, *last] is the upper run in the level.
void ExpandUpper(const Version& v, const PickerConfig& cfg, const RunningJobs& running, int level,
                 CompactionPlan* plan, size_t* first, size_t* last) {
  if (cfg.max_compaction_bytes == 0 || plan->lower.empty()) return;
  const auto& files = v.files(level);
  size_t lo = *first;
  size_t hi = *last;
  while (lo > 0 && !(files[lo - 1]->largest < plan->span.lo)) --lo;
  while (hi + 1 < files.size() && !(files[hi + 1]->smallest > plan->span.hi)) ++hi;
  if (lo == *first && hi == *last) return;
  std::vector<FilePtr> upper(files.begin() + static_cast<std::ptrdiff_t>(lo),
                             files.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
  if (AnyBusy(upper, running)) return;
  const auto lower = v.Overlapping(level + 1, upper.front()->smallest, upper.back()->largest);
  if (lower.size() != plan->lower.size()) return;
  uint64_t bytes = 0;
  for (const auto& f : upper) bytes += f->size;
  for (const auto& f : lower) bytes += f->size;
  if (bytes >= cfg.max_compaction_bytes) return;
  const KeyRange span = RangeOf(upper, lower);
  if (running.Conflicts(level, span) || running.Conflicts(level + 1, span)) return;
  plan->upper = std::move(upper);
  plan->span = span;
  *first = lo;
  *last = hi;
}

std::optional<CompactionPlan> PlanL0(const Version& v, const PickerConfig& cfg,
                                     const RunningJobs& running) {
  const auto& l0 = v.files(0);
  if (l0.empty() || running.l0_running || AnyBusy(l0, running)) return std::nullopt;
  CompactionPlan plan;
  plan.level = 0;
  plan.upper = l0;
  const KeyRange upper_range = RangeOf(l0, {});
  plan.lower = v.Overlapping(1, upper_range.lo, upper_range.hi);
  if (AnyBusy(plan.lower, running)) return std::nullopt;
  plan.span = RangeOf(plan.upper, plan.lower);
  if (running.Conflicts(0, plan.span) || running.Conflicts(1, plan.span)) return std::nullopt;
  plan.upper_room = cfg.level_targets[0];

  if (plan.lower.empty()) {
    std::vector<FilePtr> sorted = l0;
    SortLevel(1, &sorted);
    plan.movable = true;
    for (size_t i = 1; i < sorted.size(); ++i) {
      if (!(sorted[i - 1]->largest < sorted[i]->smallest)) plan.movable = false;
    }
  }
  return plan;
}

std::optional<CompactionPlan> PlanSorted(const Version& v, const PickerConfig& cfg,
                                         const RunningJobs& running, int level) {
  const auto& files = v.files(level);
  std::vector<FilePtr> candidates;
  std::vector<size_t> positions;
  for (size_t i = 0; i < files.size(); ++i) {
    const auto& f = files[i];
    if (running.busy_files.count(f->id) != 0) continue;
    const auto lower = v.Overlapping(level + 1, f->smallest, f->largest);
    if (AnyBusy(lower, running)) continue;
    const KeyRange span = RangeOf({f}, lower);
    if (running.Conflicts(level, span) || running.Conflicts(level + 1, span)) continue;
    candidates.push_back(f);
    positions.push_back(i);
  }
  if (candidates.empty()) return std::nullopt;

  size_t pick = 0;
  if (cfg.selection == FileSelection::kMinScore) {
    pick = *SelectCompactionFile(candidates);
  } else {
    for (size_t i = 1; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      const auto& b = candidates[pick];
      if (c->size > b->size || (c->size == b->size && c->id < b->id)) pick = i;
    }
  }

  const FilePtr& chosen = candidates[pick];
  size_t first = positions[pick];
  size_t last = first;
  CompactionPlan plan;
  plan.level = level;
  plan.upper = {chosen};
  plan.lower = v.Overlapping(level + 1, chosen->smallest, chosen->largest);
  plan.span = RangeOf(plan.upper, plan.lower);
  ExpandUpper(v, cfg, running, level, &plan, &first, &last);
  if (first > 0) plan.gap.lo = files[first - 1]->largest;
  if (last + 1 < files.size()) plan.gap.hi = files[last + 1]->smallest;
  uint64_t upper_bytes = 0;
  for (const auto& f : plan.upper) upper_bytes += f->size;
  const uint64_t target = cfg.level_targets[static_cast<size_t>(level)];
  const uint64_t remaining = v.LevelBytes(level) - upper_bytes;
  const uint64_t keep = remaining + cfg.room_headroom;
  plan.upper_room = target > keep ? target - keep : 0;
  plan.movable = plan.lower.empty();
  return plan;
}

}  // namespace

std::optional<CompactionPlan> PlanForLevel(const Version& v, const PickerConfig& cfg,
                                           const RunningJobs& running, int level) {
  if (level < 0 || level + 1 >= cfg.num_levels) return std::nullopt;
  auto plan = level == 0 ? PlanL0(v, cfg, running) : PlanSorted(v, cfg, running, level);
  return plan;
}

std::optional<CompactionPlan> PickCompaction(const Version& v, const PickerConfig& cfg,
                                             const RunningJobs& running) {
  const auto ratios = LevelRatios(v, cfg);
  std::vector<int> order(static_cast<size_t>(cfg.num_levels - 1));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return ratios[static_cast<size_t>(a)] > ratios[static_cast<size_t>(b)];
  });
  for (int level : order) {
    const double r = ratios[static_cast<size_t>(level)];
    const bool due = level == 0 ? r >= 1.0 : r > 1.0;
    if (!due) continue;
    auto plan = PlanForLevel(v, cfg, running, level);
    if (plan) {
      plan->ratio = r;
      return plan;
    }
  }
  return std::nullopt;
}

void RegisterPlan(const CompactionPlan& plan, RunningJobs* running) {
  for (const auto& f : plan.upper) running->busy_files.insert(f->id);
  for (const auto& f : plan.lower) running->busy_files.insert(f->id);
  running->spans[static_cast<size_t>(plan.level)].push_back(plan.span);
  running->spans[static_cast<size_t>(plan.level + 1)].push_back(plan.span);
  if (plan.level == 0) running->l0_running = true;
}

void UnregisterPlan(const CompactionPlan& plan, RunningJobs* running) {
  for (const auto& f : plan.upper) running->busy_files.erase(f->id);
  for (const auto& f : plan.lower) running->busy_files.erase(f->id);
  for (int l : {plan.level, plan.level + 1}) {
    auto& spans = running->spans[static_cast<size_t>(l)];
    for (auto it = spans.begin(); it != spans.end(); ++it) {
      if (it->lo == plan.span.lo && it->hi == plan.span.hi) {
        spans.erase(it);
        break;
      }
    }
  }
  if (plan.level == 0) running->l0_running = false;
}

}  // namespace prism
