#include <cstdlib>
#include <cstring>

#include "nbv/kernels/kernels.hpp"

namespace nbv::kern {

#ifndef NBV_WITH_AVX2
const Dispatch* avx2_kernels_or_null() { return nullptr; }
#endif

namespace {

const Dispatch& select() {
  const char* forced = std::getenv("NBV_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return scalar_kernels();
    if (std::strcmp(forced, "avx2") == 0) {
      if (const Dispatch* d = avx2_kernels_or_null()) return *d;
      return scalar_kernels();  // requested lane unavailable: fall back
    }
    // Unknown value: ignore and auto-select.
  }
  if (const Dispatch* d = avx2_kernels_or_null()) return *d;
  return scalar_kernels();
}

}  // namespace

const Dispatch& active() {
  static const Dispatch& chosen = select();
  return chosen;
}

}  // namespace nbv::kern
