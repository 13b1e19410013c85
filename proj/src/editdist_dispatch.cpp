#include <atomic>
#include <cstdlib>

#include "wge/editdist.hpp"

namespace wge::editdist {

namespace {

bool avx2_supported() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Kernel detect() {
  if (const char* env = std::getenv("WGE_FORCE_SCALAR"); env && env[0] == '1')
    return Kernel::Scalar;
  return avx2_supported() ? Kernel::Avx2 : Kernel::Scalar;
}

std::atomic<int> forced{-1};

}  // namespace

bool kernel_available(Kernel k) {
  return k == Kernel::Scalar || (k == Kernel::Avx2 && avx2_supported());
}

Kernel active_kernel() {
  int f = forced.load(std::memory_order_relaxed);
  if (f >= 0) return static_cast<Kernel>(f);
  static const Kernel detected = detect();
  return detected;
}

void force_kernel(Kernel k) { forced.store(static_cast<int>(k)); }
void reset_kernel() { forced.store(-1); }

uint32_t levenshtein(std::u32string_view a, std::u32string_view b) {
  return levenshtein_scalar(a, b);
}

void levenshtein_batch(std::u32string_view needle,
                       std::span<const std::u32string> targets,
                       std::span<uint32_t> out) {
#if defined(__x86_64__) || defined(_M_X64)
  if (active_kernel() == Kernel::Avx2 && !needle.empty()) {
    levenshtein_batch_avx2(needle, targets, out);
    return;
  }
#endif
  levenshtein_batch_scalar(needle, targets, out);
}

}  // namespace wge::editdist
