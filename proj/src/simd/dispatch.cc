#include <cstdlib>
#include <cstring>

#include "prism/simd/kernels.h"

namespace prism::simd {

const char* IsaName(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kSse42: return "sse4.2";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool CpuHasSse42() {
#ifdef PRISM_SIMD_X86
  return __builtin_cpu_supports("sse4.2");
#else
  return false;
#endif
}

bool CpuHasAvx2() {
#ifdef PRISM_SIMD_X86
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

KernelTable KernelsFor(Isa isa) {
  KernelTable t{scalar::Crc32cUpdate, scalar::SumCubedClocks, scalar::ClockHistogram,
                scalar::Dot, Isa::kScalar, Isa::kScalar};
#ifdef PRISM_SIMD_X86
  if (isa != Isa::kScalar && CpuHasSse42()) {
    t.crc32c_update = sse42::Crc32cUpdate;
    t.crc_isa = Isa::kSse42;
  }
  if (isa == Isa::kAvx2 && CpuHasAvx2()) {
    t.sum_cubed_clocks = avx2::SumCubedClocks;
    t.clock_histogram = avx2::ClockHistogram;
    t.dot = avx2::Dot;
    t.vector_isa = Isa::kAvx2;
  }
#else
  (void)isa;
#endif
  return t;
}

const KernelTable& Kernels() {
  static const KernelTable table = [] {
    const char* force = std::getenv("PRISM_SIMD");
    if (force != nullptr && std::strcmp(force, "scalar") == 0) return KernelsFor(Isa::kScalar);
    if (force != nullptr && std::strcmp(force, "sse4.2") == 0) return KernelsFor(Isa::kSse42);
    return KernelsFor(Isa::kAvx2);
  }();
  return table;
}

}  // namespace prism::simd
