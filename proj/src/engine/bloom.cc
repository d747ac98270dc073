#include "prism/engine/bloom.h"

#include <algorithm>
#include <cmath>

namespace prism {

int BloomProbes(int bits_per_key) {
  const int k = static_cast<int>(std::lround(bits_per_key * 0.69));
  return std::clamp(k, 1, 30);
}

std::string BuildBloomFilter(const std::vector<uint64_t>& key_hashes, int bits_per_key) {
  const int k = BloomProbes(bits_per_key);
  size_t bits = key_hashes.size() * static_cast<size_t>(std::max(bits_per_key, 1));
  bits = std::max<size_t>(bits, 64);
  const size_t bytes = (bits + 7) / 8;
  bits = bytes * 8;
  std::string filter(bytes, '\0');
  for (uint64_t h : key_hashes) {
    uint32_t h1 = static_cast<uint32_t>(h);
    const uint32_t delta = static_cast<uint32_t>(h >> 32) | 1u;
    for (int i = 0; i < k; ++i) {
      const size_t bit = h1 % bits;
      filter[bit / 8] = static_cast<char>(filter[bit / 8] | (1 << (bit % 8)));
      h1 += delta;
    }
  }
  filter.push_back(static_cast<char>(k));
  return filter;
}

bool BloomMayContain(std::string_view filter, uint64_t key_hash) {
  if (filter.size() < 2) return true;
  const int k = static_cast<uint8_t>(filter.back());
  const size_t bits = (filter.size() - 1) * 8;
  uint32_t h1 = static_cast<uint32_t>(key_hash);
  const uint32_t delta = static_cast<uint32_t>(key_hash >> 32) | 1u;
  for (int i = 0; i < k; ++i) {
    const size_t bit = h1 % bits;
    if ((filter[bit / 8] & (1 << (bit % 8))) == 0) return false;
    h1 += delta;
  }
  return true;
}

}  // namespace prism
