#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wge {

// The closed 9-function action vocabulary.
enum class ActionKind {
  Click,
  Type,
  Scroll,
  Select,
  Hover,
  Wait,
  Goto,
  Back,
  Refresh,
};

constexpr int kActionKindCount = 9;

struct ParamSpec {
  const char* key;
  bool required;
  bool numeric;  // serialized without trailing zeros
};

std::string_view kind_name(ActionKind kind);
std::optional<ActionKind> kind_from_name(std::string_view name);  // case-insensitive
std::span<const ParamSpec> kind_signature(ActionKind kind);

// A parsed action call plus its annotation fields. Params are kept in
// signature order so serialization is deterministic.
struct CanonicalAction {
  ActionKind kind = ActionKind::Click;
  std::vector<std::pair<std::string, std::string>> params;
  double confidence = 1.0;
  bool necessary = true;
  std::optional<int> pre_dependency;
  std::string source_url;

  const std::string* param(std::string_view key) const;
};

// Parses a canonical call such as `click(text='Submit', element='button')`.
// Annotation fields are left at their defaults.
// Error codes: UNKNOWN_FUNCTION, MISSING_PARAM, BAD_QUOTING, DUP_KEY,
// BAD_PARAM, BAD_SYNTAX.
CanonicalAction parse_action(std::string_view text);

// Deterministic serialization: lowercase kind, params in signature order,
// single-quoted values with \' and \\ escapes. parse_action round-trips it.
std::string canonical_string(const CanonicalAction& a);

// UTF-8 -> Unicode scalar values. Invalid bytes decode as U+FFFD.
std::u32string to_codepoints(std::string_view utf8);

// Normalized edit similarity over the canonical serializations:
// 1 - lev(a,b) / max(|a|,|b|), and 1.0 for identical strings.
double similarity(const CanonicalAction& a, const CanonicalAction& b);
double string_similarity(std::string_view a, std::string_view b);

}  // namespace wge
