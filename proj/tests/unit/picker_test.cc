#include <gtest/gtest.h>

#include "prism/engine/compaction_picker.h"

namespace prism {
namespace {

FilePtr F(uint64_t id, int level, std::string lo, std::string hi, uint64_t size,
          int64_t score = 0, SequenceNumber seq = 1) {
  auto f = std::make_shared<FileMeta>();
  f->id = id;
  f->level = level;
  f->smallest = std::move(lo);
  f->largest = std::move(hi);
  f->size = size;
  f->score = score;
  f->smallest_seq = f->largest_seq = seq;
  return f;
}

PickerConfig Cfg() {
  PickerConfig c;
  c.num_levels = 4;
  c.level0_trigger = 4;
  c.level_targets = {50, 100, 1000, 0};
  return c;
}

std::shared_ptr<const Version> Make(std::vector<FilePtr> files) {
  Version base(4);
  VersionEdit e;
  e.added = std::move(files);
  return ApplyEdit(base, e);
}

TEST(Picker, LevelRatios) {
  auto v = Make({F(1, 0, "a", "b", 10, 0, 1), F(2, 0, "a", "b", 10, 0, 2), F(3, 1, "a", "c", 150),
                 F(4, 2, "a", "z", 500), F(5, 3, "a", "z", 99999)});
  const auto r = LevelRatios(*v, Cfg());
  EXPECT_DOUBLE_EQ(r[0], 0.5);
  EXPECT_DOUBLE_EQ(r[1], 1.5);
  EXPECT_DOUBLE_EQ(r[2], 0.5);
  EXPECT_DOUBLE_EQ(r[3], 0.0);
}

TEST(Picker, HighestRatioFirstAndNothingWhenUnderTarget) {
  auto idle = Make({F(3, 1, "a", "c", 90), F(4, 2, "a", "z", 500)});
  EXPECT_FALSE(PickCompaction(*idle, Cfg(), RunningJobs(4)));

  auto v = Make({F(1, 0, "a", "b", 10, 0, 1), F(2, 0, "c", "d", 10, 0, 2),
                 F(6, 0, "e", "f", 10, 0, 3), F(7, 0, "g", "h", 10, 0, 4),  // ratio 1.0
                 F(3, 1, "a", "c", 120), F(8, 1, "d", "e", 100),            // ratio 2.2
                 F(4, 2, "a", "z", 500)});
  auto p = PickCompaction(*v, Cfg(), RunningJobs(4));
  ASSERT_TRUE(p);
  EXPECT_EQ(p->level, 1);
  EXPECT_DOUBLE_EQ(p->ratio, 2.2);
}

TEST(Picker, MinScoreAndLargestSelection) {
  auto v = Make({F(10, 1, "a", "b", 60, 5), F(11, 1, "c", "d", 90, -3), F(12, 1, "e", "f", 90, -3),
                 F(13, 1, "g", "h", 30, 9), F(20, 2, "c", "c", 40)});
  PickerConfig c = Cfg();
  auto p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  ASSERT_EQ(p->upper.size(), 1u);
  EXPECT_EQ(p->upper[0]->id, 11u);  // tie on score goes to the lower id
  ASSERT_EQ(p->lower.size(), 1u);
  EXPECT_EQ(p->lower[0]->id, 20u);
  EXPECT_FALSE(p->movable);
  // gap is bounded by the neighbours
  EXPECT_EQ(*p->gap.lo, "b");
  EXPECT_EQ(*p->gap.hi, "e");
  // level holds 270 against a target of 100; the other files already exceed it
  EXPECT_EQ(p->upper_room, 0u);

  c.selection = FileSelection::kLargestFile;
  p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper[0]->id, 11u);
  EXPECT_TRUE(p->span.lo == "c" && p->span.hi == "d");
}

TEST(Picker, RoomAndOpenEdges) {
  auto v = Make({F(1, 1, "a", "b", 30, 4), F(2, 1, "m", "n", 40, 1)});
  auto p = PlanForLevel(*v, Cfg(), RunningJobs(4), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper[0]->id, 2u);
  EXPECT_EQ(*p->gap.lo, "b");
  EXPECT_FALSE(p->gap.hi.has_value());
  EXPECT_EQ(p->upper_room, 70u);  // target 100 minus the 30 left behind
  EXPECT_TRUE(p->movable);
}

TEST(Picker, HeadroomShrinksRoom) {
  auto v = Make({F(1, 1, "a", "b", 30, 4), F(2, 1, "m", "n", 40, 1)});
  PickerConfig c = Cfg();
  c.room_headroom = 25;
  auto p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper_room, 45u);
  c.room_headroom = 80;
  p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper_room, 0u);
}

TEST(Picker, BusyFilesAndSpansAreSkipped) {
  auto v = Make({F(1, 1, "a", "b", 30, 0), F(2, 1, "m", "n", 40, 5), F(3, 2, "a", "a", 10)});
  RunningJobs running(4);
  auto first = PlanForLevel(*v, Cfg(), running, 1);
  ASSERT_TRUE(first);
  EXPECT_EQ(first->upper[0]->id, 1u);
  RegisterPlan(*first, &running);
  EXPECT_TRUE(running.busy_files.count(3));
  auto second = PlanForLevel(*v, Cfg(), running, 1);
  ASSERT_TRUE(second);
  EXPECT_EQ(second->upper[0]->id, 2u);
  RegisterPlan(*second, &running);
  EXPECT_FALSE(PlanForLevel(*v, Cfg(), running, 1));
  UnregisterPlan(*first, &running);
  UnregisterPlan(*second, &running);
  EXPECT_TRUE(running.busy_files.empty());
  EXPECT_TRUE(running.spans[1].empty());
  EXPECT_TRUE(running.spans[2].empty());
}

TEST(Picker, L0TakesAllFilesAndOneJobAtATime) {
  auto v = Make({F(1, 0, "a", "c", 10, 0, 1), F(2, 0, "d", "f", 10, 0, 2)});
  RunningJobs running(4);
  auto p = PlanForLevel(*v, Cfg(), running, 0);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper.size(), 2u);
  EXPECT_TRUE(p->lower.empty());
  EXPECT_TRUE(p->movable);
  EXPECT_EQ(p->upper_room, 50u);
  RegisterPlan(*p, &running);
  EXPECT_FALSE(PlanForLevel(*v, Cfg(), running, 0));

  auto overlapping = Make({F(1, 0, "a", "e", 10, 0, 1), F(2, 0, "d", "f", 10, 0, 2)});
  auto q = PlanForLevel(*overlapping, Cfg(), RunningJobs(4), 0);
  ASSERT_TRUE(q);
  EXPECT_FALSE(q->movable);
}

TEST(Picker, BottomLevelNeverCompacts) {
  auto v = Make({F(5, 3, "a", "z", 99999)});
  EXPECT_FALSE(PlanForLevel(*v, Cfg(), RunningJobs(4), 3));
}

TEST(Picker, ExpandsUpperWhenLowerInputsStaySame) {
  // L1 files b..c and d..e both sit inside the single L2 file a..f; g..h
  // would pull in another L2 file.
  auto v = Make({F(10, 1, "b", "c", 40, -5), F(11, 1, "d", "e", 40, 2), F(12, 1, "g", "h", 40, 0),
                 F(20, 2, "a", "f", 100), F(21, 2, "g", "k", 100)});
  PickerConfig c = Cfg();
  c.max_compaction_bytes = 1000;
  auto p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  ASSERT_EQ(p->upper.size(), 2u);
  EXPECT_EQ(p->upper[0]->id, 10u);
  EXPECT_EQ(p->upper[1]->id, 11u);
  ASSERT_EQ(p->lower.size(), 1u);
  EXPECT_EQ(p->span.lo, "a");
  EXPECT_EQ(p->span.hi, "f");
  EXPECT_FALSE(p->gap.lo);
  EXPECT_EQ(*p->gap.hi, "g");
  EXPECT_EQ(p->upper_room, 100u - 40u);

  // over the byte cap, or disabled: the chosen file alone
  c.max_compaction_bytes = 180;
  p = PlanForLevel(*v, c, RunningJobs(4), 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper.size(), 1u);
  c.max_compaction_bytes = 0;
  p = PlanForLevel(*v, c, RunningJobs(4), 1);
  EXPECT_EQ(p->upper.size(), 1u);

  // a busy neighbour blocks the expansion
  RunningJobs busy(4);
  busy.busy_files.insert(11);
  c.max_compaction_bytes = 1000;
  p = PlanForLevel(*v, c, busy, 1);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->upper.size(), 1u);
}

}  // namespace
}  // namespace prism
