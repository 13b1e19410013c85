#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace wge::editdist {

// Unit-cost Levenshtein distance over Unicode scalar values.
uint32_t levenshtein(std::u32string_view a, std::u32string_view b);

// Scalar reference kernel. The dispatched variants are equivalence-tested
// against this one.
uint32_t levenshtein_scalar(std::u32string_view a, std::u32string_view b);

// One-vs-many kernel: out[i] = levenshtein(needle, targets[i]).
// Dispatches to the widest kernel the CPU supports.
void levenshtein_batch(std::u32string_view needle,
                       std::span<const std::u32string> targets,
                       std::span<uint32_t> out);

void levenshtein_batch_scalar(std::u32string_view needle,
                              std::span<const std::u32string> targets,
                              std::span<uint32_t> out);

enum class Kernel { Scalar, Avx2 };

Kernel active_kernel();
bool kernel_available(Kernel k);

// Test hook: pin the dispatched kernel. Pass Scalar to disable SIMD.
void force_kernel(Kernel k);
void reset_kernel();

#if defined(__x86_64__) || defined(_M_X64)
void levenshtein_batch_avx2(std::u32string_view needle,
                            std::span<const std::u32string> targets,
                            std::span<uint32_t> out);
#endif

}  // namespace wge::editdist
