#include <gtest/gtest.h>

#include "prism/mapper.h"
#include "prism/tracker.h"

namespace prism {
namespace {

TEST(Mapper, ThresholdSplitsBoundaryClock) {
  // 10% at clock 3 plus half of the 10% at clock 2 gives 15%.
  const PinPolicy p = DerivePolicy({50, 30, 10, 10}, 0.15);
  EXPECT_EQ(p.boundary, 2);
  EXPECT_NEAR(p.boundary_prob, 0.5, 1e-12);
  EXPECT_DOUBLE_EQ(p.PinProbability(3), 1.0);
  EXPECT_DOUBLE_EQ(p.PinProbability(2), 0.5);
  EXPECT_DOUBLE_EQ(p.PinProbability(1), 0.0);
  EXPECT_DOUBLE_EQ(p.PinProbability(0), 0.0);
  EXPECT_DOUBLE_EQ(p.PinProbability(std::nullopt), 0.0);
}

TEST(Mapper, ExactBoundaryTakesWholeClass) {
  const PinPolicy p = DerivePolicy({50, 30, 10, 10}, 0.10);
  EXPECT_EQ(p.boundary, 3);
  EXPECT_NEAR(p.boundary_prob, 1.0, 1e-12);
  EXPECT_FALSE(p.pins_nothing());
}

TEST(Mapper, ZeroThresholdOrEmptyPinsNothing) {
  EXPECT_TRUE(DerivePolicy({50, 30, 10, 10}, 0.0).pins_nothing());
  EXPECT_TRUE(DerivePolicy({0, 0, 0, 0}, 0.5).pins_nothing());
}

TEST(Mapper, FullThresholdPinsEveryTrackedKey) {
  const PinPolicy p = DerivePolicy({50, 30, 10, 10}, 1.0);
  EXPECT_EQ(p.boundary, 0);
  EXPECT_DOUBLE_EQ(p.PinProbability(0), 1.0);
  EXPECT_DOUBLE_EQ(p.PinProbability(std::nullopt), 0.0);
}

TEST(Mapper, SkipsEmptyClasses) {
  // No clock-3 keys: the 20% comes from clock 2 sampled at 2/3.
  const PinPolicy p = DerivePolicy({40, 30, 30, 0}, 0.20);
  EXPECT_EQ(p.boundary, 2);
  EXPECT_NEAR(p.boundary_prob, 2.0 / 3.0, 1e-12);
}

TEST(Mapper, ExpectedPinFractionEqualsThreshold) {
  for (double th : {0.01, 0.05, 0.15, 0.33, 0.5, 0.77, 0.9}) {
    const std::array<uint64_t, 4> counts = {500, 300, 120, 80};
    const PinPolicy p = DerivePolicy(counts, th);
    double expected = 0;
    for (int c = 0; c < 4; ++c) {
      expected += static_cast<double>(counts[static_cast<size_t>(c)]) *
                  p.PinProbability(static_cast<uint8_t>(c));
    }
    EXPECT_NEAR(expected / 1000.0, th, 1e-9) << th;
  }
}

TEST(Mapper, DeciderIsDeterministicPerSeed) {
  const PinPolicy p = DerivePolicy({50, 30, 10, 10}, 0.15);
  PinDecider a(nullptr, p, 42);
  PinDecider b(nullptr, p, 42);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.Decide(2), b.Decide(2));
}

TEST(Mapper, ShouldPinUsesTracker) {
  ClockHistogram h;
  TrackerOptions o;
  o.background_eviction = false;
  Tracker t(o, &h);
  t.TrackRead("hot", 1);
  t.TrackRead("hot", 1);
  t.TrackRead("warm", 1);
  const PinPolicy p = DerivePolicy(h.Snapshot(), 0.5);
  EXPECT_EQ(p.boundary, 3);
  PinDecider d(&t, p, 1);
  EXPECT_TRUE(d.ShouldPin("hot"));
  EXPECT_FALSE(d.ShouldPin("warm"));
  EXPECT_FALSE(d.ShouldPin("absent"));
}

TEST(ClockHistogram, UnderflowIsClampedAndCounted) {
  ClockHistogram h;
  h.ApplyDelta(std::nullopt, 1);
  h.ApplyDelta(1, std::nullopt);
  EXPECT_EQ(h.accounting_errors(), 0u);
  h.ApplyDelta(1, std::nullopt);
  EXPECT_EQ(h.accounting_errors(), 1u);
  EXPECT_EQ(h.Total(), 0u);
}

TEST(Mapper, LivePolicyFollowsHistogram) {
  Mapper m(0.15);
  for (int i = 0; i < 10; ++i) m.histogram().ApplyDelta(std::nullopt, 3);
  for (int i = 0; i < 10; ++i) m.histogram().ApplyDelta(std::nullopt, 2);
  for (int i = 0; i < 30; ++i) m.histogram().ApplyDelta(std::nullopt, 1);
  for (int i = 0; i < 50; ++i) m.histogram().ApplyDelta(std::nullopt, 0);
  EXPECT_EQ(m.CurrentPolicy().boundary, 2);
  m.set_threshold(0.05);
  EXPECT_EQ(m.CurrentPolicy().boundary, 3);
  EXPECT_NEAR(m.CurrentPolicy().boundary_prob, 0.5, 1e-12);
}

}  // namespace
}  // namespace prism
