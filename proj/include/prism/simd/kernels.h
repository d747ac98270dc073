#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// x86 vector variants. Kernels() picks the widest variant the running CPU
// supports; PRISM_SIMD=scalar in the environment forces the reference path.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace prism::simd {

enum class Isa { kScalar, kSse42, kAvx2 };

const char* IsaName(Isa isa);

struct KernelTable {
  // CRC32C (Castagnoli), non-inverted running value in, running value out.
  uint32_t (*crc32c_update)(uint32_t crc, const uint8_t* data, size_t n);
  // Sum of c^3 over clocks in [-1, 3].
  int64_t (*sum_cubed_clocks)(const int8_t* clocks, size_t n);
  // Counts of packed tracker bytes by their top-two-bit clock value.
  void (*clock_histogram)(const uint8_t* packed, size_t n, uint64_t out[4]);
  double (*dot)(const double* a, const double* b, size_t n);
  Isa crc_isa;
  Isa vector_isa;
};

namespace scalar {
uint32_t Crc32cUpdate(uint32_t crc, const uint8_t* data, size_t n);
int64_t SumCubedClocks(const int8_t* clocks, size_t n);
void ClockHistogram(const uint8_t* packed, size_t n, uint64_t out[4]);
double Dot(const double* a, const double* b, size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define PRISM_SIMD_X86 1
namespace sse42 {
uint32_t Crc32cUpdate(uint32_t crc, const uint8_t* data, size_t n);
}  // namespace sse42
namespace avx2 {
int64_t SumCubedClocks(const int8_t* clocks, size_t n);
void ClockHistogram(const uint8_t* packed, size_t n, uint64_t out[4]);
double Dot(const double* a, const double* b, size_t n);
}  // namespace avx2
#endif

bool CpuHasSse42();
bool CpuHasAvx2();

// Selected once per process.
const KernelTable& Kernels();
// Table restricted to the given ISA (falls back to scalar where unsupported).
KernelTable KernelsFor(Isa isa);

inline uint32_t Crc32c(std::string_view data) {
  const uint32_t crc = Kernels().crc32c_update(
      0xffffffffu, reinterpret_cast<const uint8_t*>(data.data()), data.size());
  return crc ^ 0xffffffffu;
}

inline int64_t SumCubedClocks(std::span<const int8_t> clocks) {
  return Kernels().sum_cubed_clocks(clocks.data(), clocks.size());
}

inline double Dot(std::span<const double> a, std::span<const double> b) {
  return Kernels().dot(a.data(), b.data(), a.size() < b.size() ? a.size() : b.size());
}

}  // namespace prism::simd
