#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "prism/bench/generators.h"

namespace prism::bench {
namespace {

// Upper critical value of chi-square with k degrees of freedom
// (Wilson-Hilferty; z is the standard normal quantile).
double ChiSquareCritical(double k, double z) {
  const double a = 2.0 / (9.0 * k);
  return k * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

double ChiSquareVsPmf(const std::vector<uint64_t>& counts, double theta, uint64_t samples) {
  double norm = 0;
  for (size_t k = 0; k < counts.size(); ++k) norm += std::pow(static_cast<double>(k + 1), -theta);
  double chi = 0;
  for (size_t k = 0; k < counts.size(); ++k) {
    const double expect = samples * std::pow(static_cast<double>(k + 1), -theta) / norm;
    const double d = static_cast<double>(counts[k]) - expect;
    chi += d * d / expect;
  }
  return chi;
}

TEST(Zipfian, MatchesPmfAcrossThetas) {
  for (double theta : {0.5, 0.99, 1.2}) {
    const uint64_t n = 1000, samples = 200000;
    ZipfianGenerator z(n, theta);
    Rng rng(17);
    std::vector<uint64_t> counts(n, 0);
    for (uint64_t i = 0; i < samples; ++i) {
      const uint64_t r = z.Next(rng);
      ASSERT_LT(r, n);
      ++counts[r];
    }
    const double chi = ChiSquareVsPmf(counts, theta, samples);
    EXPECT_LT(chi, ChiSquareCritical(n - 1, 2.326)) << theta;
  }
}

TEST(Zipfian, SmallDomains) {
  ZipfianGenerator one(1, 0.99);
  Rng rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(one.Next(rng), 0u);
  ZipfianGenerator two(2, 0.99);
  uint64_t zeros = 0;
  for (int i = 0; i < 100000; ++i) zeros += two.Next(rng) == 0;
  // P(0) = 1 / (1 + 2^-0.99)
  EXPECT_NEAR(zeros / 1e5, 1.0 / (1.0 + std::pow(2.0, -0.99)), 0.01);
}

TEST(KeyChooser, PermutationIsBijectiveAndSeeded) {
  WorkloadSpec spec;
  spec.record_count = 5000;
  KeyChooser a(spec);
  KeyChooser b(spec);
  const auto hot = a.HotKeys(5000);
  EXPECT_EQ(std::set<uint64_t>(hot.begin(), hot.end()).size(), 5000u);
  EXPECT_EQ(hot, b.HotKeys(5000));
  spec.scramble_seed = 99;
  EXPECT_NE(KeyChooser(spec).HotKeys(10), a.HotKeys(10));

  // the hottest key is drawn most often
  Rng rng(3);
  std::vector<uint64_t> counts(5000, 0);
  for (int i = 0; i < 100000; ++i) ++counts[a.Next(rng, 5000)];
  const auto top = std::max_element(counts.begin(), counts.end()) - counts.begin();
  EXPECT_EQ(static_cast<uint64_t>(top), hot[0]);
}

TEST(KeyChooser, LatestAndUniform) {
  WorkloadSpec spec;
  spec.record_count = 100;
  spec.distribution = KeyDistribution::kLatest;
  KeyChooser latest(spec);
  Rng rng(5);
  uint64_t newest = 0;
  for (int i = 0; i < 10000; ++i) {
    const uint64_t k = latest.Next(rng, 150);
    ASSERT_LT(k, 150u);
    newest += k == 149;
  }
  EXPECT_GT(newest, 1000u);
  spec.distribution = KeyDistribution::kUniform;
  KeyChooser uni(spec);
  std::vector<int> c(10, 0);
  for (int i = 0; i < 100000; ++i) ++c[uni.Next(rng, 10)];
  for (int x : c) EXPECT_NEAR(x, 10000, 500);
}

}  // namespace
}  // namespace prism::bench
