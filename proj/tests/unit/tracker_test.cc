#include <gtest/gtest.h>

#include <numeric>
#include <random>
#include <thread>

#include "prism/mapper.h"
#include "prism/simd/kernels.h"
#include "prism/tracker.h"

namespace prism {
namespace {

TrackerOptions Manual(size_t capacity, size_t shards = 8) {
  TrackerOptions o;
  o.capacity = capacity;
  o.shards = shards;
  o.background_eviction = false;
  return o;
}

// Histogram must equal a recount of the tracked entries.
void ExpectHistogramMatches(const Tracker& t, const ClockHistogram& h) {
  const auto packed = t.PackedValues();
  uint64_t recount[4];
  simd::scalar::ClockHistogram(packed.data(), packed.size(), recount);
  const auto snap = h.Snapshot();
  for (int c = 0; c < 4; ++c) EXPECT_EQ(snap[static_cast<size_t>(c)], recount[c]) << c;
  EXPECT_EQ(h.accounting_errors(), 0u);
}

TEST(Tracker, ClockSemantics) {
  ClockHistogram h;
  Tracker t(Manual(100), &h);
  EXPECT_EQ(t.TrackRead("k", 5), ClockTransition::kInserted);
  ASSERT_TRUE(t.Lookup("k"));
  EXPECT_EQ(t.Lookup("k")->clock, 1);
  EXPECT_EQ(t.Lookup("k")->fingerprint, VersionFingerprint(5));

  EXPECT_EQ(t.TrackRead("k", 5), ClockTransition::kPromoted);
  EXPECT_EQ(t.Lookup("k")->clock, 3);
  EXPECT_EQ(t.TrackRead("k", 5), ClockTransition::kPromoted);
  EXPECT_EQ(t.Lookup("k")->clock, 3);

  // find a version with a different fingerprint
  uint64_t v2 = 6;
  while (VersionFingerprint(v2) == VersionFingerprint(5)) ++v2;
  EXPECT_EQ(t.TrackRead("k", v2), ClockTransition::kResetAsNew);
  EXPECT_EQ(t.Lookup("k")->clock, 1);
  EXPECT_EQ(t.Lookup("k")->fingerprint, VersionFingerprint(v2));
  EXPECT_FALSE(t.Lookup("missing"));
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, EvictionDecrementsInLockStep) {
  // One shard, so both keys share one clock hand.
  ClockHistogram h;
  Tracker t(Manual(100, 1), &h);
  t.TrackRead("a", 1);
  t.TrackRead("a", 1);
  t.TrackRead("c", 2);
  t.TrackRead("c", 2);
  ASSERT_EQ(t.Lookup("a")->clock, 3);
  ASSERT_EQ(t.Lookup("c")->clock, 3);
  // 3 -> 2 -> 1 -> 0 for both, then the first one found at 0 goes.
  EXPECT_EQ(t.RunEvictionPass(1), 1u);
  EXPECT_EQ(t.size(), 1u);
  const auto left = t.Lookup("a") ? t.Lookup("a") : t.Lookup("c");
  ASSERT_TRUE(left);
  EXPECT_EQ(left->clock, 0);
  ExpectHistogramMatches(t, h);
  EXPECT_EQ(t.RunEvictionPass(1), 1u);
  EXPECT_EQ(t.size(), 0u);
  EXPECT_EQ(h.Total(), 0u);
}

TEST(Tracker, ColderKeyLeavesFirst) {
  ClockHistogram h;
  Tracker t(Manual(100, 1), &h);
  t.TrackRead("hot", 1);
  t.TrackRead("hot", 1);
  t.TrackRead("cold", 1);
  EXPECT_EQ(t.RunEvictionPass(1), 1u);
  EXPECT_FALSE(t.Lookup("cold"));
  ASSERT_TRUE(t.Lookup("hot"));
  EXPECT_GE(t.Lookup("hot")->clock, 1);
  EXPECT_LE(t.Lookup("hot")->clock, 2);
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, ReReadAfterDecayPromotes) {
  ClockHistogram h;
  Tracker t(Manual(100, 1), &h);
  t.TrackRead("x", 9);
  t.TrackRead("y", 9);
  t.TrackRead("y", 9);
  t.RunEvictionPass(1);  // x: 1 -> 0 -> gone, y: 3 -> 2 or 1
  ASSERT_TRUE(t.Lookup("y"));
  t.TrackRead("y", 9);
  EXPECT_EQ(t.Lookup("y")->clock, 3);
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, ManualEvictionBoundsSize) {
  ClockHistogram h;
  Tracker t(Manual(1000), &h);
  for (int i = 0; i < 5000; ++i) t.TrackRead("k" + std::to_string(i), 1);
  EXPECT_EQ(t.size(), 5000u);
  t.RunEvictionPass(t.size() - 950);
  EXPECT_EQ(t.size(), 950u);
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, BackgroundEvictionReachesFloor) {
  ClockHistogram h;
  TrackerOptions o;
  o.capacity = 2000;
  o.shards = 16;
  Tracker t(o, &h);
  t.StartBackground();
  for (int i = 0; i < 20000; ++i) t.TrackRead("u" + std::to_string(i), 1);
  t.WaitForEviction();
  for (int i = 0; i < 200 && t.size() > 1900; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  t.StopBackground();
  EXPECT_LE(t.size(), 2000u * 105 / 100);
  EXPECT_GT(t.evictions(), 0u);
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, ConcurrentReadersKeepHistogramConsistent) {
  ClockHistogram h;
  TrackerOptions o;
  o.capacity = 500;
  o.shards = 8;
  Tracker t(o, &h);
  t.StartBackground();
  std::vector<std::thread> threads;
  for (int w = 0; w < 4; ++w) {
    threads.emplace_back([&, w] {
      std::mt19937_64 rng(w);
      for (int i = 0; i < 20000; ++i) {
        const uint64_t k = rng() % 3000;
        t.TrackRead("c" + std::to_string(k), 1 + (rng() % 3 == 0 ? 1 : 0));
      }
    });
  }
  for (auto& th : threads) th.join();
  t.StopBackground();
  ExpectHistogramMatches(t, h);
}

TEST(Tracker, RecencyOrdering) {
  // A is read every round, B once per 10 rounds; eviction between rounds.
  ClockHistogram h;
  Tracker t(Manual(300, 4), &h);
  for (int round = 0; round < 50; ++round) {
    for (int i = 0; i < 100; ++i) t.TrackRead("A" + std::to_string(i), 1);
    for (int i = 0; i < 100; ++i) {
      if ((i + round) % 10 == 0) t.TrackRead("B" + std::to_string(i), 1);
    }
    t.RunEvictionPass(50);
  }
  double a = 0;
  double b = 0;
  int na = 0;
  int nb = 0;
  for (int i = 0; i < 100; ++i) {
    if (auto v = t.Lookup("A" + std::to_string(i))) {
      a += v->clock;
      ++na;
    }
    if (auto v = t.Lookup("B" + std::to_string(i))) {
      b += v->clock;
      ++nb;
    }
  }
  ASSERT_GT(na, 0);
  const double mean_a = a / na;
  const double mean_b = nb == 0 ? 0 : b / nb;
  EXPECT_GT(mean_a, mean_b);
}

}  // namespace
}  // namespace prism
