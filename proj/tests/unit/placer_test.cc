#include <gtest/gtest.h>

#include <map>
#include <random>

#include "prism/engine/merger.h"
#include "prism/mapper.h"
#include "prism/placer.h"
#include "prism/tracker.h"
#include "test_util.h"

namespace prism {
namespace {

using testing::TestRecord;
using testing::VectorIterator;

struct CollectSink : RecordSink {
  std::vector<TestRecord> out;
  Status Add(std::string_view key, SequenceNumber seq, ValueKind kind,
             std::string_view value) override {
    if (!out.empty()) {
      EXPECT_LT(out.back().key, std::string(key)) << "output not sorted";
    }
    out.push_back({std::string(key), seq, kind, std::string(value)});
    return Status::OK();
  }
  std::vector<std::string> Keys() const {
    std::vector<std::string> k;
    for (const auto& r : out) k.push_back(r.key);
    return k;
  }
};

std::unique_ptr<MergingIterator> Merge(std::vector<std::vector<TestRecord>> inputs) {
  std::vector<std::unique_ptr<RecordIterator>> children;
  for (auto& in : inputs) children.push_back(std::make_unique<VectorIterator>(std::move(in)));
  return std::make_unique<MergingIterator>(std::move(children));
}

TestRecord Put(std::string k, SequenceNumber s, std::string v = "v") {
  return {std::move(k), s, ValueKind::kPut, std::move(v)};
}
TestRecord Del(std::string k, SequenceNumber s) { return {std::move(k), s, ValueKind::kTombstone, ""}; }

TrackerOptions NoBackground() {
  TrackerOptions o;
  o.background_eviction = false;
  return o;
}

TEST(ComputeScore, Examples) {
  EXPECT_EQ(ComputeScore({}), 0);
  const std::vector<int8_t> a = {3, -1, -1, -1};
  EXPECT_EQ(ComputeScore(a), 24);
  const std::vector<int8_t> untracked(17, kUntrackedClock);
  EXPECT_EQ(ComputeScore(untracked), -17);
  const std::vector<int8_t> mixed = {0, 1, 2, 3};
  EXPECT_EQ(ComputeScore(mixed), 0 + 1 + 8 + 27);
  EXPECT_EQ(ComputeScore(mixed, 1), 6);
  EXPECT_EQ(ComputeScore(mixed, 2), 0 + 1 + 4 + 9);
}

TEST(ComputeScore, ClockOfUsesTracker) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  t.TrackRead("a", 1);
  t.TrackRead("a", 1);
  EXPECT_EQ(ClockOf(&t, "a"), 3);
  EXPECT_EQ(ClockOf(&t, "b"), kUntrackedClock);
  EXPECT_EQ(ClockOf(nullptr, "a"), kUntrackedClock);
}

FilePtr File(uint64_t id, int64_t score) {
  auto f = std::make_shared<FileMeta>();
  f->id = id;
  f->score = score;
  return f;
}

TEST(SelectCompactionFile, Examples) {
  EXPECT_FALSE(SelectCompactionFile({}));
  EXPECT_EQ(*SelectCompactionFile({File(1, 24), File(2, -5), File(3, 0)}), 1u);
  EXPECT_EQ(*SelectCompactionFile({File(9, 100)}), 0u);
  EXPECT_EQ(*SelectCompactionFile({File(7, -5), File(4, -5)}), 1u);
}

TEST(PinnedMerge, PinsNothingIsClassicMerge) {
  auto it = Merge({{Put("b", 10), Put("d", 11)}, {Put("a", 1), Put("b", 2), Put("c", 3)}});
  PinDecider d(nullptr, PinPolicy{}, 1);
  PinnedMergeOptions o;
  o.num_upper_children = 1;
  o.upper_room = 1 << 20;
  CollectSink up;
  CollectSink down;
  PinnedMergeStats st;
  ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
  EXPECT_TRUE(up.out.empty());
  EXPECT_EQ(down.Keys(), (std::vector<std::string>{"a", "b", "c", "d"}));
  EXPECT_EQ(down.out[1].seq, 10u);  // newer b wins
  EXPECT_EQ(st.superseded, 1u);
  EXPECT_EQ(st.input_records, 5u);
}

// Upper file holds 40; lower files hold 35 and 65; all three are at clock 3.
TEST(PinnedMerge, RetainsAndRaisesPopularKeys) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  for (const char* k : {"40", "35", "65"}) {
    t.TrackRead(k, 1);
    t.TrackRead(k, 1);
  }
  for (const char* k : {"30", "50"}) t.TrackRead(k, 1);  // clock 1, not pinned
  PinPolicy policy;
  policy.boundary = 3;
  policy.boundary_prob = 1.0;
  PinDecider d(&t, policy, 1);

  auto it = Merge({{Put("40", 20), Put("45", 21), Put("55", 22)},
                   {Put("30", 1), Put("35", 2), Put("50", 3)},
                   {Put("60", 4), Put("65", 5), Put("70", 6)}});
  PinnedMergeOptions o;
  o.num_upper_children = 1;
  o.upper_room = 1 << 20;
  CollectSink up;
  CollectSink down;
  PinnedMergeStats st;
  ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
  EXPECT_EQ(up.Keys(), (std::vector<std::string>{"35", "40", "65"}));
  EXPECT_EQ(down.Keys(), (std::vector<std::string>{"30", "45", "50", "55", "60", "70"}));
  EXPECT_EQ(st.pinned, 3u);
  EXPECT_EQ(st.up_moved, 2u);
}

TEST(PinnedMerge, DuplicateKeepsNewerInUpperOutput) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  t.TrackRead("k", 7);
  t.TrackRead("k", 7);
  PinPolicy policy;
  policy.boundary = 3;
  policy.boundary_prob = 1.0;
  PinDecider d(&t, policy, 1);
  auto it = Merge({{Put("k", 9, "new")}, {Put("k", 4, "old")}});
  PinnedMergeOptions o;
  o.num_upper_children = 1;
  o.upper_room = 1 << 20;
  CollectSink up;
  CollectSink down;
  PinnedMergeStats st;
  ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
  ASSERT_EQ(up.out.size(), 1u);
  EXPECT_EQ(up.out[0].seq, 9u);
  EXPECT_EQ(up.out[0].value, "new");
  EXPECT_TRUE(down.out.empty());
  EXPECT_EQ(st.up_moved, 0u);
}

TEST(PinnedMerge, GapAndRoomLimitPinning) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  for (int i = 0; i < 10; ++i) {
    const std::string k = "k" + std::to_string(i);
    t.TrackRead(k, 1);
    t.TrackRead(k, 1);
  }
  PinPolicy policy;
  policy.boundary = 3;
  policy.boundary_prob = 1.0;

  std::vector<TestRecord> lower;
  for (int i = 0; i < 10; ++i) lower.push_back(Put("k" + std::to_string(i), 1 + i, "xx"));

  {
    PinDecider d(&t, policy, 1);
    auto it = Merge({{}, lower});
    PinnedMergeOptions o;
    o.num_upper_children = 1;
    o.upper_room = 1 << 20;
    o.gap.lo = "k2";
    o.gap.hi = "k6";
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
    EXPECT_EQ(up.Keys(), (std::vector<std::string>{"k3", "k4", "k5"}));
  }
  {
    PinDecider d(&t, policy, 1);
    auto it = Merge({{}, lower});
    PinnedMergeOptions o;
    o.num_upper_children = 1;
    // two records fit: each is 2 + 2 + 12 bytes
    o.upper_room = 2 * RecordBytes("k0", "xx") + 1;
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
    EXPECT_EQ(up.Keys(), (std::vector<std::string>{"k0", "k1"}));
    EXPECT_TRUE(st.room_exhausted);
    EXPECT_EQ(down.out.size(), 8u);
  }
}

TEST(PinnedMerge, TombstonesNeverGoUpAndDropAtBottom) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  t.TrackRead("a", 1);
  t.TrackRead("a", 1);
  PinPolicy policy;
  policy.boundary = 0;
  policy.boundary_prob = 1.0;
  for (bool bottom : {false, true}) {
    PinDecider d(&t, policy, 1);
    auto it = Merge({{Del("a", 5)}, {Put("a", 1), Put("b", 2)}});
    PinnedMergeOptions o;
    o.num_upper_children = 1;
    o.upper_room = 1 << 20;
    o.drop_tombstones = bottom;
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
    EXPECT_TRUE(up.out.empty());
    if (bottom) {
      EXPECT_EQ(down.Keys(), (std::vector<std::string>{"b"}));
      EXPECT_EQ(st.tombstones_dropped, 1u);
    } else {
      ASSERT_EQ(down.out.size(), 2u);
      EXPECT_EQ(down.out[0].kind, ValueKind::kTombstone);
    }
  }
}

TEST(PinnedMerge, UnpinOnRecheck) {
  ClockHistogram h;
  Tracker t(NoBackground(), &h);
  t.TrackRead("p", 1);
  t.TrackRead("p", 1);
  PinPolicy policy;
  policy.boundary = 3;
  policy.boundary_prob = 1.0;
  PinnedMergeOptions o;
  o.num_upper_children = 1;
  o.upper_room = 1 << 20;
  {
    PinDecider d(&t, policy, 1);
    auto it = Merge({{Put("p", 3)}, {}});
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
    EXPECT_EQ(up.Keys(), (std::vector<std::string>{"p"}));
  }
  // tracker forgets p
  while (t.Lookup("p")) t.RunEvictionPass(1);
  {
    PinDecider d(&t, policy, 1);
    auto it = Merge({{Put("p", 3)}, {}});
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());
    EXPECT_TRUE(up.out.empty());
    EXPECT_EQ(down.Keys(), (std::vector<std::string>{"p"}));
  }
}

// Outputs equal inputs minus superseded versions, for random inputs and
// random pin decisions.
TEST(PinnedMerge, NoRecordLossProperty) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 200; ++trial) {
    ClockHistogram h;
    Tracker t(NoBackground(), &h);
    const int nchildren = 2 + static_cast<int>(rng() % 3);
    std::vector<std::vector<TestRecord>> inputs(static_cast<size_t>(nchildren));
    std::map<std::string, TestRecord> newest;
    SequenceNumber seq = 1;
    for (auto& in : inputs) {
      std::map<std::string, bool> used;
      const int n = static_cast<int>(rng() % 40);
      for (int i = 0; i < n; ++i) {
        std::string k = "k" + std::to_string(rng() % 60);
        if (used[k]) continue;
        used[k] = true;
        TestRecord r = rng() % 5 == 0 ? Del(k, seq++) : Put(k, seq++, std::to_string(rng()));
        auto itn = newest.find(k);
        if (itn == newest.end() || itn->second.seq < r.seq) newest[k] = r;
        in.push_back(r);
        if (rng() % 2 == 0) t.TrackRead(k, 1);
        if (rng() % 3 == 0) t.TrackRead(k, 1);
      }
    }
    const bool bottom = rng() % 2 == 0;
    PinPolicy policy = DerivePolicy(h.Snapshot(), 0.4);
    PinDecider d(&t, policy, rng());
    auto it = Merge(inputs);
    PinnedMergeOptions o;
    o.num_upper_children = 1;
    o.upper_room = rng() % 2 ? (1 << 20) : 100;
    o.drop_tombstones = bottom;
    CollectSink up;
    CollectSink down;
    PinnedMergeStats st;
    ASSERT_TRUE(PinnedMerge(it.get(), &d, o, &up, &down, &st).ok());

    std::map<std::string, TestRecord> got;
    for (const auto* sink : {&up, &down}) {
      for (const auto& r : sink->out) {
        ASSERT_TRUE(got.emplace(r.key, r).second) << "duplicate " << r.key;
      }
    }
    for (const auto& r : up.out) EXPECT_EQ(r.kind, ValueKind::kPut);
    size_t expected = 0;
    for (const auto& [k, r] : newest) {
      if (bottom && r.kind == ValueKind::kTombstone) {
        EXPECT_EQ(got.count(k), 0u);
        continue;
      }
      ++expected;
      ASSERT_EQ(got.count(k), 1u) << k;
      EXPECT_EQ(got[k].seq, r.seq);
      EXPECT_EQ(got[k].value, r.value);
    }
    EXPECT_EQ(got.size(), expected);
    EXPECT_LE(st.pinned_bytes, o.upper_room);
  }
}

}  // namespace
}  // namespace prism
