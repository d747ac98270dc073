#include <array>

#include "prism/simd/kernels.h"

namespace prism::simd::scalar {
namespace {

constexpr uint32_t kCastagnoli = 0x82f63b78u;

using CrcTables = std::array<std::array<uint32_t, 256>, 8>;

constexpr CrcTables MakeTables() {
  CrcTables t{};
  for (uint32_t i = 0; i < 256; ++i) {
    uint32_t c = i;
    for (int k = 0; k < 8; ++k) c = (c & 1) ? (c >> 1) ^ kCastagnoli : c >> 1;
    t[0][i] = c;
  }
  for (uint32_t i = 0; i < 256; ++i) {
    for (int s = 1; s < 8; ++s) t[s][i] = (t[s - 1][i] >> 8) ^ t[0][t[s - 1][i] & 0xff];
  }
  return t;
}

constexpr CrcTables kTables = MakeTables();

}  // namespace

// Slicing-by-8.
uint32_t Crc32cUpdate(uint32_t crc, const uint8_t* p, size_t n) {
  while (n >= 8) {
    const uint32_t lo = crc ^ (uint32_t{p[0]} | uint32_t{p[1]} << 8 |
                               uint32_t{p[2]} << 16 | uint32_t{p[3]} << 24);
    crc = kTables[7][lo & 0xff] ^ kTables[6][(lo >> 8) & 0xff] ^
          kTables[5][(lo >> 16) & 0xff] ^ kTables[4][lo >> 24] ^
          kTables[3][p[4]] ^ kTables[2][p[5]] ^ kTables[1][p[6]] ^ kTables[0][p[7]];
    p += 8;
    n -= 8;
  }
  while (n-- > 0) crc = (crc >> 8) ^ kTables[0][(crc ^ *p++) & 0xff];
  return crc;
}

int64_t SumCubedClocks(const int8_t* clocks, size_t n) {
  int64_t sum = 0;
  for (size_t i = 0; i < n; ++i) {
    const int64_t c = clocks[i];
    sum += c * c * c;
  }
  return sum;
}

void ClockHistogram(const uint8_t* packed, size_t n, uint64_t out[4]) {
  out[0] = out[1] = out[2] = out[3] = 0;
  for (size_t i = 0; i < n; ++i) ++out[packed[i] >> 6];
}

double Dot(const double* a, const double* b, size_t n) {
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace prism::simd::scalar
