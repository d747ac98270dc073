#include "prism/bench/generators.h"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace prism::bench {

namespace {

// log1p(x) / x and expm1(x) / x with their series near zero.
double Helper1(double x) {
  if (std::fabs(x) > 1e-8) return std::log1p(x) / x;
  return 1 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x));
}

double Helper2(double x) {
  if (std::fabs(x) > 1e-8) return std::expm1(x) / x;
  return 1 + x * 0.5 * (1 + x * (1.0 / 3.0) * (1 + 0.25 * x));
}

}  // namespace

ZipfianGenerator::ZipfianGenerator(uint64_t n, double theta) : n_(n), theta_(theta) {
  h_integral_x1_ = HIntegral(1.5) - 1.0;
  h_integral_n_ = HIntegral(static_cast<double>(n_) + 0.5);
  s_ = 2.0 - HIntegralInverse(HIntegral(2.5) - H(2.0));
}

double ZipfianGenerator::H(double x) const { return std::exp(-theta_ * std::log(x)); }

double ZipfianGenerator::HIntegral(double x) const {
  const double lx = std::log(x);
  return Helper2((1.0 - theta_) * lx) * lx;
}

double ZipfianGenerator::HIntegralInverse(double x) const {
  double t = x * (1.0 - theta_);
  if (t < -1.0) t = -1.0;  // rounding guard
  return std::exp(Helper1(t) * x);
}

uint64_t ZipfianGenerator::Next(Rng& rng) const {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  while (true) {
    const double u = h_integral_n_ + unit(rng) * (h_integral_x1_ - h_integral_n_);
    const double x = HIntegralInverse(u);
    double kd = std::floor(x + 0.5);
    if (kd < 1) kd = 1;
    if (kd > static_cast<double>(n_)) kd = static_cast<double>(n_);
    if (kd - x <= s_ || u >= HIntegral(kd + 0.5) - H(kd)) {
      return static_cast<uint64_t>(kd) - 1;
    }
  }
}

KeyChooser::KeyChooser(const WorkloadSpec& spec)
    : dist_(spec.distribution),
      records_(spec.record_count),
      zipf_(spec.record_count, spec.distribution == KeyDistribution::kUniform ? 1.0 : spec.theta) {
  if (dist_ == KeyDistribution::kZipfian) {
    perm_.resize(records_);
    std::iota(perm_.begin(), perm_.end(), 0u);
    Rng rng(spec.scramble_seed);
    std::shuffle(perm_.begin(), perm_.end(), rng);
  }
}

uint64_t KeyChooser::Next(Rng& rng, uint64_t key_count) const {
  switch (dist_) {
    case KeyDistribution::kZipfian:
      return perm_[zipf_.Next(rng)];
    case KeyDistribution::kLatest: {
      const uint64_t r = zipf_.Next(rng);
      return r < key_count ? key_count - 1 - r : 0;
    }
    case KeyDistribution::kUniform:
      return std::uniform_int_distribution<uint64_t>(0, key_count - 1)(rng);
  }
  return 0;
}

std::vector<uint64_t> KeyChooser::HotKeys(size_t k) const {
  k = std::min<size_t>(k, records_);
  std::vector<uint64_t> out(k);
  for (size_t i = 0; i < k; ++i) {
    switch (dist_) {
      case KeyDistribution::kZipfian:
        out[i] = perm_[i];
        break;
      case KeyDistribution::kLatest:
        out[i] = records_ - 1 - i;
        break;
      case KeyDistribution::kUniform:
        out[i] = i;
        break;
    }
  }
  return out;
}

}  // namespace prism::bench
