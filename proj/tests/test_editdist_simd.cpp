#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>

#include "doctest.h"
#include "wge/editdist.hpp"

using namespace wge::editdist;

static std::u32string random_string(std::mt19937_64& gen, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<int> ch('a', 'h');
  std::u32string s;
  for (int i = len(gen); i > 0; --i) s.push_back(static_cast<char32_t>(ch(gen)));
  return s;
}

TEST_CASE("dispatch reports a usable kernel") {
  CHECK(kernel_available(Kernel::Scalar));
  Kernel k = active_kernel();
  CHECK(kernel_available(k));
  force_kernel(Kernel::Scalar);
  CHECK(active_kernel() == Kernel::Scalar);
  reset_kernel();
}

TEST_CASE("batch kernels agree with the scalar reference") {
  if (!kernel_available(Kernel::Avx2)) {
    MESSAGE("avx2 unavailable on this host, dispatch equivalence is vacuous");
    return;
  }
  std::mt19937_64 gen(123);
  for (int iter = 0; iter < 200; ++iter) {
    std::u32string needle = random_string(gen, 60);
    std::uniform_int_distribution<int> n_targets(0, 25);
    std::vector<std::u32string> targets;
    int n = n_targets(gen);
    for (int i = 0; i < n; ++i) targets.push_back(random_string(gen, 60));

    std::vector<uint32_t> scalar_out(targets.size());
    std::vector<uint32_t> simd_out(targets.size());
    levenshtein_batch_scalar(needle, targets, scalar_out);
    levenshtein_batch_avx2(needle, targets, simd_out);
    CHECK(scalar_out == simd_out);
  }
}

TEST_CASE("edge shapes: empty needle, empty targets, uneven lane lengths") {
  if (!kernel_available(Kernel::Avx2)) return;
  std::vector<std::u32string> targets = {U"",       U"a",     U"abcdefg",
                                         U"aaaaaa", U"zzzzz", U"abc",
                                         U"abcd",   U"ab",    U"extra-lane"};
  std::vector<uint32_t> a(targets.size()), b(targets.size());
  levenshtein_batch_scalar(U"", targets, a);
  levenshtein_batch_avx2(U"", targets, b);
  CHECK(a == b);
  levenshtein_batch_scalar(U"abcdef", targets, a);
  levenshtein_batch_avx2(U"abcdef", targets, b);
  CHECK(a == b);
}

TEST_CASE("forced kernels produce identical batch results through dispatch") {
  std::mt19937_64 gen(5);
  std::u32string needle = random_string(gen, 30);
  std::vector<std::u32string> targets;
  for (int i = 0; i < 17; ++i) targets.push_back(random_string(gen, 30));
  std::vector<uint32_t> out_scalar(targets.size());
  force_kernel(Kernel::Scalar);
  levenshtein_batch(needle, targets, out_scalar);
  reset_kernel();
  std::vector<uint32_t> out_active(targets.size());
  levenshtein_batch(needle, targets, out_active);
  CHECK(out_scalar == out_active);
}
