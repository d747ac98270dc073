// Built with -msse4.2; only called after a runtime CPU check.
#include <nmmintrin.h>

#include <cstring>

#include "prism/simd/kernels.h"

namespace prism::simd::sse42 {

uint32_t Crc32cUpdate(uint32_t crc, const uint8_t* p, size_t n) {
  uint64_t c = crc;
  while (n >= 8) {
    uint64_t w;
    std::memcpy(&w, p, 8);
    c = _mm_crc32_u64(c, w);
    p += 8;
    n -= 8;
  }
  auto c32 = static_cast<uint32_t>(c);
  while (n-- > 0) c32 = _mm_crc32_u8(c32, *p++);
  return c32;
}

}  // namespace prism::simd::sse42
