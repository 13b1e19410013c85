#include <algorithm>
#include <vector>

#include "wge/editdist.hpp"

namespace wge::editdist {

uint32_t levenshtein_scalar(std::u32string_view a, std::u32string_view b) {
  if (a.size() < b.size()) std::swap(a, b);  // keep the row short
  if (b.empty()) return static_cast<uint32_t>(a.size());

  std::vector<uint32_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = static_cast<uint32_t>(j);

  for (size_t i = 1; i <= a.size(); ++i) {
    uint32_t diag = row[0];
    row[0] = static_cast<uint32_t>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      uint32_t sub = diag + (a[i - 1] != b[j - 1] ? 1 : 0);
      diag = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, sub});
    }
  }
  return row[b.size()];
}

void levenshtein_batch_scalar(std::u32string_view needle,
                              std::span<const std::u32string> targets,
                              std::span<uint32_t> out) {
  for (size_t i = 0; i < targets.size(); ++i)
    out[i] = levenshtein_scalar(needle, targets[i]);
}

}  // namespace wge::editdist
