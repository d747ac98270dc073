#include <gtest/gtest.h>

#include <fstream>

#include "prism/engine/options.h"
#include "test_util.h"

namespace prism {
namespace {

TEST(Options, DefaultsValidate) {
  Options o;
  EXPECT_TRUE(o.Validate().ok());
  EXPECT_EQ(o.LevelTarget(0), o.write_buffer_size);
  EXPECT_EQ(o.LevelTarget(1), o.max_bytes_for_level_base);
  EXPECT_EQ(o.LevelTarget(3), o.max_bytes_for_level_base * 100);
}

TEST(Options, ApplyOverridesAndRejectsUnknown) {
  Options o;
  KeyValues kv;
  ASSERT_TRUE(ParseKeyValues("# desk\nwrite_buffer_size = 256K\npin_threshold=0.5\n"
                             "tier_mapping=NNTTQ\ntier.Q.read_us=400\npinning_enabled=false\n",
                             &kv)
                  .ok());
  ASSERT_TRUE(ApplyOptions(kv, &o).ok());
  EXPECT_EQ(o.write_buffer_size, 256u * 1024);
  EXPECT_DOUBLE_EQ(o.pin_threshold, 0.5);
  EXPECT_EQ(o.tier_mapping, "NNTTQ");
  EXPECT_FALSE(o.pinning_enabled);
  EXPECT_DOUBLE_EQ(o.tiers[2].read_latency_us, 400.0);
  ASSERT_TRUE(ApplyOptions({{"pin_headroom_files", "0.25"}}, &o).ok());
  EXPECT_DOUBLE_EQ(o.pin_headroom_files, 0.25);

  Options bad;
  EXPECT_TRUE(ApplyOptions({{"no_such_knob", "1"}}, &bad).IsInvalidArgument());
  EXPECT_TRUE(ApplyOptions({{"pin_threshold", "abc"}}, &bad).IsInvalidArgument());
}

TEST(Options, ValidateCatchesBadGeometry) {
  Options o;
  o.tier_mapping = "NNN";
  EXPECT_FALSE(o.Validate().ok());
  o = Options();
  o.pin_threshold = 1.5;
  EXPECT_FALSE(o.Validate().ok());
  o = Options();
  o.pin_headroom_files = -0.5;
  EXPECT_FALSE(o.Validate().ok());
  o = Options();
  o.num_levels = 9;
  EXPECT_FALSE(o.Validate().ok());
}

TEST(Options, LoadFile) {
  testing::TempDir dir("opts");
  const std::string path = dir.str() + "/x.conf";
  std::ofstream(path) << "num_levels=4\ntier_mapping=NTQQ\n";
  Options o;
  ASSERT_TRUE(LoadOptionsFile(path, &o).ok());
  EXPECT_EQ(o.num_levels, 4);
  EXPECT_FALSE(LoadOptionsFile(dir.str() + "/missing.conf", &o).ok());
}

}  // namespace
}  // namespace prism
