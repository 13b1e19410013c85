// AVX2 one-vs-many Levenshtein kernel: 8 independent DP lanes in 32-bit
// elements. The dp array is indexed by needle position; each step consumes
// one character of each lane's target, with finished lanes masked off so
// their rows freeze at the final distance.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <algorithm>
#include <vector>

#include "wge/editdist.hpp"

namespace wge::editdist {

namespace {

__attribute__((target("avx2"))) void run_group(
    std::u32string_view needle, const std::u32string* const* targets,
    uint32_t* out, size_t lanes) {
  const size_t m = needle.size();

  alignas(32) int32_t lens[8] = {0};
  size_t max_len = 0;
  for (size_t l = 0; l < lanes; ++l) {
    lens[l] = static_cast<int32_t>(targets[l]->size());
    max_len = std::max(max_len, targets[l]->size());
  }
  const __m256i len_vec = _mm256_load_si256(reinterpret_cast<const __m256i*>(lens));
  const __m256i one = _mm256_set1_epi32(1);

  // one 8-lane row per needle position; plain int32 storage sidesteps the
  // 32-byte alignment requirement of an __m256i array
  std::vector<int32_t> dp_buf(8 * (m + 1));
  for (size_t j = 0; j <= m; ++j)
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dp_buf.data() + 8 * j),
                        _mm256_set1_epi32(static_cast<int32_t>(j)));

  alignas(32) int32_t chars[8];
  for (size_t k = 0; k < max_len; ++k) {
    for (size_t l = 0; l < 8; ++l)
      chars[l] = (l < lanes && k < targets[l]->size())
                     ? static_cast<int32_t>((*targets[l])[k])
                     : -1;
    const __m256i tchar = _mm256_load_si256(reinterpret_cast<const __m256i*>(chars));
    // lanes still consuming input at row k
    const __m256i active =
        _mm256_cmpgt_epi32(len_vec, _mm256_set1_epi32(static_cast<int32_t>(k)));

    __m256i row0 =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(dp_buf.data()));
    __m256i diag = row0;
    __m256i prev = _mm256_blendv_epi8(
        row0, _mm256_set1_epi32(static_cast<int32_t>(k + 1)), active);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dp_buf.data()), prev);
    for (size_t j = 1; j <= m; ++j) {
      const __m256i cur = _mm256_loadu_si256(
          reinterpret_cast<const __m256i*>(dp_buf.data() + 8 * j));
      const __m256i match =
          _mm256_cmpeq_epi32(tchar, _mm256_set1_epi32(static_cast<int32_t>(needle[j - 1])));
      const __m256i sub = _mm256_add_epi32(diag, _mm256_andnot_si256(match, one));
      __m256i best = _mm256_min_epi32(_mm256_add_epi32(cur, one),
                                      _mm256_add_epi32(prev, one));
      best = _mm256_min_epi32(best, sub);
      diag = cur;
      const __m256i next = _mm256_blendv_epi8(cur, best, active);
      _mm256_storeu_si256(reinterpret_cast<__m256i*>(dp_buf.data() + 8 * j), next);
      prev = next;
    }
  }

  alignas(32) int32_t result[8];
  _mm256_store_si256(reinterpret_cast<__m256i*>(result),
                     _mm256_loadu_si256(reinterpret_cast<const __m256i*>(
                         dp_buf.data() + 8 * m)));
  for (size_t l = 0; l < lanes; ++l) out[l] = static_cast<uint32_t>(result[l]);
}

}  // namespace

void levenshtein_batch_avx2(std::u32string_view needle,
                            std::span<const std::u32string> targets,
                            std::span<uint32_t> out) {
  const std::u32string* group[8];
  for (size_t base = 0; base < targets.size(); base += 8) {
    size_t lanes = std::min<size_t>(8, targets.size() - base);
    for (size_t l = 0; l < lanes; ++l) group[l] = &targets[base + l];
    for (size_t l = lanes; l < 8; ++l) group[l] = group[0];
    run_group(needle, group, out.data() + base, lanes);
  }
}

}  // namespace wge::editdist

#endif
