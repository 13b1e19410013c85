#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <variant>

#include "wge/analysis.hpp"
#include "wge/annotation.hpp"

namespace wge {

// Minimal TOML reader covering what the run config needs: [section]
// headers, string / number / boolean values, # comments.
class TomlTable {
 public:
  using Value = std::variant<std::string, double, bool>;

  static TomlTable parse_file(const std::filesystem::path& path);
  static TomlTable parse(std::string_view text);

  bool contains(const std::string& dotted_key) const;
  std::string get_string(const std::string& key, std::string fallback) const;
  double get_number(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

 private:
  std::map<std::string, Value> values_;
};

struct RunConfig {
  double theta = 0.9;
  RewardConfig reward;
  ClassifierConfig classifier;
  std::string client_mode = "mock";  // mock | live
  LiveClientConfig judge_client{.model = "o4-mini"};
  LiveClientConfig converter_client{.model = "gpt-4o"};
  int jobs = 1;
  bool dot = false;

  void validate() const;  // throws BAD_CONFIG
};

RunConfig load_run_config(const std::filesystem::path& path);
RunConfig run_config_from_toml(const TomlTable& t);

}  // namespace wge
