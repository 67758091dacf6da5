#include <cstdlib>
#include <cstring>

#include "mlbs/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#endif

namespace mlbs::kernels {

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
  unsigned int eax = 0, ebx = 0, ecx = 0, edx = 0;
  if (__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) {
    const bool avx2 = (ebx & (1u << 5)) != 0;
    bool fma = false;
    if (__get_cpuid(1, &eax, &ebx, &ecx, &edx)) fma = (ecx & (1u << 12)) != 0;
    return avx2 && fma;
  }
#endif
  return false;
}

const Ops& active() {
  static const Ops* chosen = [] {
    if (const char* env = std::getenv("MLBS_KERNELS")) {
      if (std::strcmp(env, "scalar") == 0) return &scalar_ops();
      if (std::strcmp(env, "avx2") == 0) return &avx2_ops();
    }
    return avx2_available() ? &avx2_ops() : &scalar_ops();
  }();
  return *chosen;
}

}  // namespace mlbs::kernels
