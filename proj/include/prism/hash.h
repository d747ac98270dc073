#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace prism {

// splitmix64 finalizer.
inline uint64_t Mix64(uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

// Stable 64-bit hash over bytes; used for bloom filters and tracker sharding.
// Not cryptographic, deterministic across runs and platforms.
inline uint64_t Hash64(std::string_view data, uint64_t seed = 0x9e3779b97f4a7c15ULL) {
  uint64_t h = seed ^ (data.size() * 0xff51afd7ed558ccdULL);
  const char* p = data.data();
  size_t n = data.size();
  while (n >= 8) {
    uint64_t w;
    std::memcpy(&w, p, 8);
    h = Mix64(h ^ w) + 0x632be59bd9b4e019ULL;
    p += 8;
    n -= 8;
  }
  uint64_t tail = 0;
  std::memcpy(&tail, p, n);
  return Mix64(h ^ tail ^ (static_cast<uint64_t>(n) << 56));
}

}  // namespace prism
