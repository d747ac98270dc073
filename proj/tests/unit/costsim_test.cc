#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "prism/costsim.h"
#include "test_util.h"

namespace prism::costsim {
namespace {

SimInput Input(std::vector<double> reads, double dram, std::vector<double> writes) {
  SimInput in;
  in.devices = DefaultDevices();
  in.sizes_gb = DefaultSizes();
  in.profile.read_fraction = std::move(reads);
  in.profile.dram_read_fraction = dram;
  in.profile.write_gb_per_day = std::move(writes);
  return in;
}

// Every point no other point dominates, by exhaustive comparison.
std::set<std::string> BruteForceFrontier(const std::vector<SimResult>& all) {
  std::set<std::string> out;
  for (const auto& a : all) {
    bool dominated = false;
    for (const auto& b : all) {
      if (b.cost <= a.cost && b.latency_us <= a.latency_us &&
          (b.cost < a.cost || b.latency_us < a.latency_us)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(a.config);
  }
  return out;
}

TEST(Costsim, ReferenceConfigCost) {
  SimInput in = Input({0.1, 0.1, 0.1, 0.2, 0.4}, 0.1, {0, 0, 0, 0, 0});
  SimResult r;
  ASSERT_TRUE(Simulate("NNNTQ", in, &r).ok());
  // 2.4 GB NVM at 1.3 + 20 GB TLC at 0.4 + 200 GB QLC at 0.1
  EXPECT_NEAR(r.cost, 2.4 * 1.3 + 20 * 0.4 + 200 * 0.1, 1e-9);
  EXPECT_NEAR(r.cost, 31.12, 0.005);
  EXPECT_NEAR(r.latency_us, 0.3 * 26 + 0.2 * 195 + 0.4 * 391, 1e-9);
  ASSERT_TRUE(Simulate("QQQQQ", in, &r).ok());
  EXPECT_NEAR(r.latency_us, 0.9 * 391, 1e-9);
  EXPECT_FALSE(Simulate("NNNT", in, &r).ok());
  EXPECT_FALSE(Simulate("NNNTX", in, &r).ok());
}

TEST(Costsim, SpareCapacityForWear) {
  // 1000 GB/day over 3 years on 200-cycle QLC needs 5475 GB
  EXPECT_DOUBLE_EQ(ProvisionedGb(20, 1000, 3, 200), 5475);
  EXPECT_DOUBLE_EQ(ProvisionedGb(20, 1, 3, 200), 20);
  EXPECT_DOUBLE_EQ(ProvisionedGb(0.2, 1, 3, 18000), 1);  // rounded up to whole GB
}

TEST(Costsim, FrontierMatchesBruteForce) {
  const std::vector<SimInput> inputs = {
      Input({0.1, 0.1, 0.1, 0.2, 0.4}, 0.1, {0, 0, 0, 0, 0}),
      Input({0.3, 0.2, 0.2, 0.2, 0.1}, 0.0, {50, 40, 30, 20, 10}),
      Input({0.0, 0.05, 0.05, 0.1, 0.6}, 0.2, {400, 300, 200, 100, 5}),
  };
  for (const auto& in : inputs) {
    std::vector<SimResult> all;
    ASSERT_TRUE(Sweep(in, &all).ok());
    ASSERT_EQ(all.size(), 243u);
    std::set<std::string> got;
    for (const auto& r : all) {
      if (r.pareto) got.insert(r.config);
    }
    EXPECT_EQ(got, BruteForceFrontier(all));
    for (size_t i = 1; i < all.size(); ++i) EXPECT_LE(all[i - 1].cost, all[i].cost);
  }
}

TEST(Costsim, SpeedOrdering) {
  const auto d = DefaultDevices();
  EXPECT_TRUE(SpeedNonIncreasing("NNNTQ", d));
  EXPECT_TRUE(SpeedNonIncreasing("QQQQQ", d));
  EXPECT_FALSE(SpeedNonIncreasing("NTNTQ", d));
  EXPECT_FALSE(SpeedNonIncreasing("QQQQN", d));
}

TEST(Costsim, CsvInputs) {
  testing::TempDir dir("costsim");
  const std::string prof = dir.str() + "/p.csv";
  std::ofstream(prof) << "bucket,read_fraction,write_gb_per_day\nmemtable,0.05,0\ncache,0.05,0\n"
                         "L0,0.1,1\nL1,0.1,2\nL2,0.2,3\nL3,0.2,4\nL4,0.3,5\n";
  Profile p;
  ASSERT_TRUE(ReadProfileCsv(prof, 5, &p).ok());
  EXPECT_NEAR(p.dram_read_fraction, 0.1, 1e-12);
  EXPECT_DOUBLE_EQ(p.read_fraction[4], 0.3);
  EXPECT_DOUBLE_EQ(p.write_gb_per_day[2], 3);

  const std::string sizes = dir.str() + "/s.csv";
  std::ofstream(sizes) << "level,size_gb\n0,1\n1,2\n";
  std::vector<double> sz;
  ASSERT_TRUE(ReadSizesCsv(sizes, &sz).ok());
  EXPECT_EQ(sz, (std::vector<double>{1, 2}));

  const std::string dev = dir.str() + "/d.csv";
  std::ofstream(dev) << "code,name,read_us,cost_per_gb,pe_cycles\nN,NVM,26,1.3,18000\nQ,QLC,391,0.1,200\n";
  std::vector<Device> d;
  ASSERT_TRUE(ReadDevicesCsv(dev, &d).ok());
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[1].code, 'Q');

  const std::string csv = ResultsCsv({SimResult{"NQ", 1.5, 2.5, 1.0, 3, true}});
  EXPECT_NE(csv.find("NQ,1.5,2.5,1,3,1"), std::string::npos);
}

}  // namespace
}  // namespace prism::costsim
