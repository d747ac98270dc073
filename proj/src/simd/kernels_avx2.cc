// Built with -mavx2; only called after a runtime CPU check.
#include <immintrin.h>

#include "prism/simd/kernels.h"

namespace prism::simd::avx2 {

int64_t SumCubedClocks(const int8_t* clocks, size_t n) {
  // Lookup of (c^3 + 1) indexed by (c + 1), so every lane is unsigned and
  // _mm256_sad_epu8 can do the horizontal byte sums.
  const __m256i lut = _mm256_setr_epi8(0, 1, 2, 9, 28, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0,
                                       0, 1, 2, 9, 28, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0);
  const __m256i one = _mm256_set1_epi8(1);
  const __m256i zero = _mm256_setzero_si256();
  __m256i acc = _mm256_setzero_si256();
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(clocks + i));
    const __m256i biased = _mm256_shuffle_epi8(lut, _mm256_add_epi8(v, one));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(biased, zero));
  }
  alignas(32) uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  int64_t sum = static_cast<int64_t>(lanes[0] + lanes[1] + lanes[2] + lanes[3]) -
                static_cast<int64_t>(i);
  for (; i < n; ++i) {
    const int64_t c = clocks[i];
    sum += c * c * c;
  }
  return sum;
}

void ClockHistogram(const uint8_t* packed, size_t n, uint64_t out[4]) {
  const __m256i low2 = _mm256_set1_epi8(0x03);
  const __m256i one = _mm256_set1_epi8(1);
  const __m256i two = _mm256_set1_epi8(2);
  const __m256i three = _mm256_set1_epi8(3);
  uint64_t c1 = 0, c2 = 0, c3 = 0;
  size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(packed + i));
    const __m256i clock = _mm256_and_si256(_mm256_srli_epi16(v, 6), low2);
    c1 += __builtin_popcount(
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(clock, one))));
    c2 += __builtin_popcount(
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(clock, two))));
    c3 += __builtin_popcount(
        static_cast<uint32_t>(_mm256_movemask_epi8(_mm256_cmpeq_epi8(clock, three))));
  }
  uint64_t tail[4] = {0, 0, 0, 0};
  for (; i < n; ++i) ++tail[packed[i] >> 6];
  out[1] = c1 + tail[1];
  out[2] = c2 + tail[2];
  out[3] = c3 + tail[3];
  out[0] = n - out[1] - out[2] - out[3];
}

double Dot(const double* a, const double* b, size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace prism::simd::avx2
