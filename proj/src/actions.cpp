#include "wge/actions.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "wge/editdist.hpp"
#include "wge/error.hpp"

namespace wge {

namespace {

struct KindInfo {
  const char* name;
  std::vector<ParamSpec> params;
};

const std::array<KindInfo, kActionKindCount>& kind_table() {
  static const std::array<KindInfo, kActionKindCount> table = {{
      {"click", {{"text", true, false}, {"element", false, false}}},
      {"type", {{"text", true, false}, {"element", false, false}}},
      {"scroll", {{"direction", true, false}, {"amount", false, true}}},
      {"select", {{"value", true, false}, {"element", false, false}}},
      {"hover", {{"text", true, false}, {"element", false, false}}},
      {"wait", {{"seconds", true, true}}},
      {"goto", {{"url", true, false}}},
      {"back", {}},
      {"refresh", {}},
  }};
  return table;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// Strips trailing zeros from a decimal literal: "2.0" -> "2", "1.50" -> "1.5".
std::string normalize_number(const std::string& value, std::string_view key) {
  double parsed = 0;
  auto [ptr, ec] =
      std::from_chars(value.data(), value.data() + value.size(), parsed);
  if (ec != std::errc() || ptr != value.data() + value.size())
    throw Error("BAD_PARAM", "parameter '" + std::string(key) +
                                 "' is not numeric: '" + value + "'");
  std::string out = value;
  if (out.find('.') != std::string::npos) {
    while (!out.empty() && out.back() == '0') out.pop_back();
    if (!out.empty() && out.back() == '.') out.pop_back();
  }
  return out;
}

void check_semantics(ActionKind kind, std::string_view key,
                     const std::string& value) {
  if (kind == ActionKind::Scroll && key == "direction" && value != "up" &&
      value != "down")
    throw Error("BAD_PARAM", "scroll direction must be 'up' or 'down', got '" +
                                 value + "'");
  if (kind == ActionKind::Wait && key == "seconds") {
    double seconds = std::stod(value);
    if (seconds < 0) throw Error("BAD_PARAM", "wait seconds must be >= 0");
  }
}

}  // namespace

std::string_view kind_name(ActionKind kind) {
  return kind_table()[static_cast<int>(kind)].name;
}

std::optional<ActionKind> kind_from_name(std::string_view name) {
  std::string lowered = to_lower(name);
  const auto& table = kind_table();
  for (int i = 0; i < kActionKindCount; ++i)
    if (lowered == table[i].name) return static_cast<ActionKind>(i);
  return std::nullopt;
}

std::span<const ParamSpec> kind_signature(ActionKind kind) {
  return kind_table()[static_cast<int>(kind)].params;
}

const std::string* CanonicalAction::param(std::string_view key) const {
  for (const auto& [k, v] : params)
    if (k == key) return &v;
  return nullptr;
}

CanonicalAction parse_action(std::string_view text) {
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  };

  skip_ws();
  size_t name_start = pos;
  while (pos < text.size() &&
         (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
    ++pos;
  std::string_view name = text.substr(name_start, pos - name_start);
  if (name.empty()) throw Error("BAD_SYNTAX", "expected function name");

  auto kind = kind_from_name(name);
  if (!kind)
    throw Error("UNKNOWN_FUNCTION", "unknown function '" + std::string(name) + "'");

  skip_ws();
  if (pos >= text.size() || text[pos] != '(')
    throw Error("BAD_SYNTAX", "expected '(' after function name");
  ++pos;

  std::vector<std::pair<std::string, std::string>> raw;
  skip_ws();
  if (pos < text.size() && text[pos] != ')') {
    for (;;) {
      skip_ws();
      size_t key_start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '_'))
        ++pos;
      std::string key(text.substr(key_start, pos - key_start));
      if (key.empty()) throw Error("BAD_SYNTAX", "expected parameter key");
      skip_ws();
      if (pos >= text.size() || text[pos] != '=')
        throw Error("BAD_SYNTAX", "expected '=' after key '" + key + "'");
      ++pos;
      skip_ws();
      if (pos >= text.size() || text[pos] != '\'')
        throw Error("BAD_QUOTING", "expected single-quoted value for '" + key + "'");
      ++pos;
      std::string value;
      bool closed = false;
      while (pos < text.size()) {
        char c = text[pos++];
        if (c == '\\') {
          if (pos >= text.size())
            throw Error("BAD_QUOTING", "dangling escape in value of '" + key + "'");
          value.push_back(text[pos++]);
        } else if (c == '\'') {
          closed = true;
          break;
        } else {
          value.push_back(c);
        }
      }
      if (!closed)
        throw Error("BAD_QUOTING", "unterminated value for '" + key + "'");
      for (const auto& [k, v] : raw)
        if (k == key) throw Error("DUP_KEY", "duplicate key '" + key + "'");
      raw.emplace_back(std::move(key), std::move(value));
      skip_ws();
      if (pos < text.size() && text[pos] == ',') {
        ++pos;
        continue;
      }
      break;
    }
  }
  if (pos >= text.size() || text[pos] != ')')
    throw Error("BAD_SYNTAX", "expected ')'");
  ++pos;
  skip_ws();
  if (pos != text.size())
    throw Error("BAD_SYNTAX", "trailing characters after ')'");

  CanonicalAction action;
  action.kind = *kind;
  auto signature = kind_signature(*kind);
  for (const auto& spec : signature) {
    auto it = std::find_if(raw.begin(), raw.end(),
                           [&](const auto& kv) { return kv.first == spec.key; });
    if (it == raw.end()) {
      if (spec.required)
        throw Error("MISSING_PARAM", std::string(kind_name(*kind)) +
                                         " requires parameter '" + spec.key + "'");
      continue;
    }
    std::string value = it->second;
    if (spec.numeric) value = normalize_number(value, spec.key);
    check_semantics(*kind, spec.key, value);
    action.params.emplace_back(spec.key, std::move(value));
    raw.erase(it);
  }
  if (!raw.empty())
    throw Error("BAD_PARAM", "unknown parameter '" + raw.front().first + "' for " +
                                 std::string(kind_name(*kind)));
  return action;
}

std::string canonical_string(const CanonicalAction& a) {
  std::string out(kind_name(a.kind));
  out.push_back('(');
  bool first = true;
  for (const auto& [key, value] : a.params) {
    if (!first) out += ", ";
    first = false;
    out += key;
    out += "='";
    for (char c : value) {
      if (c == '\'' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('\'');
  }
  out.push_back(')');
  return out;
}

std::u32string to_codepoints(std::string_view utf8) {
  std::u32string out;
  out.reserve(utf8.size());
  size_t i = 0;
  while (i < utf8.size()) {
    unsigned char c = utf8[i];
    char32_t cp = 0xFFFD;
    size_t len = 1;
    if (c < 0x80) {
      cp = c;
    } else if ((c >> 5) == 0x6 && i + 1 < utf8.size()) {
      cp = ((c & 0x1F) << 6) | (utf8[i + 1] & 0x3F);
      len = 2;
    } else if ((c >> 4) == 0xE && i + 2 < utf8.size()) {
      cp = ((c & 0x0F) << 12) | ((utf8[i + 1] & 0x3F) << 6) | (utf8[i + 2] & 0x3F);
      len = 3;
    } else if ((c >> 3) == 0x1E && i + 3 < utf8.size()) {
      cp = ((c & 0x07) << 18) | ((utf8[i + 1] & 0x3F) << 12) |
           ((utf8[i + 2] & 0x3F) << 6) | (utf8[i + 3] & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

double string_similarity(std::string_view a, std::string_view b) {
  if (a == b) return 1.0;
  std::u32string ca = to_codepoints(a);
  std::u32string cb = to_codepoints(b);
  size_t longest = std::max(ca.size(), cb.size());
  if (longest == 0) return 1.0;
  uint32_t dist = editdist::levenshtein(ca, cb);
  return 1.0 - static_cast<double>(dist) / static_cast<double>(longest);
}

double similarity(const CanonicalAction& a, const CanonicalAction& b) {
  return string_similarity(canonical_string(a), canonical_string(b));
}

}  // namespace wge
