#pragma once

// Key choosers for the YCSB-style runner.

#include <cstdint>
#include <random>
#include <vector>

#include "prism/bench/workload.h"

namespace prism::bench {

using Rng = std::mt19937_64;

// Exact sampler for P(rank = k) proportional to 1 / (k + 1)^theta over
// ranks 0..n-1, using rejection-inversion (Hormann and Derflinger), so no
// zeta table is needed.
class ZipfianGenerator {
 public:
  ZipfianGenerator(uint64_t n, double theta);
  uint64_t Next(Rng& rng) const;
  uint64_t n() const { return n_; }
  double theta() const { return theta_; }

 private:
  double H(double x) const;
  double HIntegral(double x) const;
  double HIntegralInverse(double x) const;

  uint64_t n_;
  double theta_;
  double h_integral_x1_;
  double h_integral_n_;
  double s_;
};

// Maps a distribution over popularity ranks onto key indices.
class KeyChooser {
 public:
  explicit KeyChooser(const WorkloadSpec& spec);

  // key_count is the number of keys that currently exist (grows with inserts).
  uint64_t Next(Rng& rng, uint64_t key_count) const;
  // Key indices of the k most popular ranks at load time.
  std::vector<uint64_t> HotKeys(size_t k) const;

 private:
  KeyDistribution dist_;
  uint64_t records_;
  ZipfianGenerator zipf_;
  std::vector<uint32_t> perm_;  // rank -> key index for zipfian
};

}  // namespace prism::bench
