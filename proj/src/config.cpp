#include "wge/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "wge/error.hpp"

namespace wge {

namespace {

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (c == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (c == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

}  // namespace

TomlTable TomlTable::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("IO", "cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

TomlTable TomlTable::parse(std::string_view text) {
  TomlTable table;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw Error("BAD_CONFIG", "line " + std::to_string(line_no) +
                                      ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("BAD_CONFIG",
                  "line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    std::string full = section.empty() ? key : section + "." + key;

    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      std::string unescaped;
      for (size_t i = 1; i + 1 < value.size(); ++i) {
        if (value[i] == '\\' && i + 2 < value.size()) ++i;
        unescaped.push_back(value[i]);
      }
      table.values_[full] = unescaped;
    } else if (value == "true" || value == "false") {
      table.values_[full] = (value == "true");
    } else {
      double number = 0;
      auto [ptr, ec] =
          std::from_chars(value.data(), value.data() + value.size(), number);
      if (ec != std::errc() || ptr != value.data() + value.size())
        throw Error("BAD_CONFIG", "line " + std::to_string(line_no) +
                                      ": cannot parse value '" + value + "'");
      table.values_[full] = number;
    }
  }
  return table;
}

bool TomlTable::contains(const std::string& key) const {
  return values_.count(key) > 0;
}

std::string TomlTable::get_string(const std::string& key, std::string fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw Error("BAD_CONFIG", "key '" + key + "' is not a string");
}

double TomlTable::get_number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  throw Error("BAD_CONFIG", "key '" + key + "' is not a number");
}

bool TomlTable::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* b = std::get_if<bool>(&it->second)) return *b;
  throw Error("BAD_CONFIG", "key '" + key + "' is not a boolean");
}

void RunConfig::validate() const {
  if (theta < 0.0 || theta > 1.0)
    throw Error("BAD_CONFIG", "theta must lie in [0,1]");
  if (reward.gamma <= 0.0 || reward.gamma >= 1.0)
    throw Error("BAD_CONFIG", "gamma must lie in (0,1)");
  if (reward.tolerance <= 0.0 || reward.max_iterations <= 0)
    throw Error("BAD_CONFIG", "reward tolerance and max_iterations must be positive");
  classifier.validate();
  if (client_mode != "mock" && client_mode != "live")
    throw Error("BAD_CONFIG", "client must be 'mock' or 'live'");
  if (jobs < 1) throw Error("BAD_CONFIG", "jobs must be >= 1");
}

RunConfig run_config_from_toml(const TomlTable& t) {
  RunConfig cfg;
  cfg.theta = t.get_number("merge.theta", cfg.theta);
  cfg.reward.gamma = t.get_number("rewards.gamma", cfg.reward.gamma);
  cfg.reward.tolerance = t.get_number("rewards.tolerance", cfg.reward.tolerance);
  cfg.reward.max_iterations = static_cast<int>(
      t.get_number("rewards.max_iterations", cfg.reward.max_iterations));
  cfg.classifier.w_high = t.get_number("classifier.w_high", cfg.classifier.w_high);
  cfg.classifier.w_low = t.get_number("classifier.w_low", cfg.classifier.w_low);
  cfg.classifier.s_fail = t.get_number("classifier.s_fail", cfg.classifier.s_fail);
  cfg.classifier.s_success =
      t.get_number("classifier.s_success", cfg.classifier.s_success);
  cfg.client_mode = t.get_string("client.mode", cfg.client_mode);
  cfg.judge_client.endpoint =
      t.get_string("client.endpoint", cfg.judge_client.endpoint);
  cfg.judge_client.model = t.get_string("client.judge_model", cfg.judge_client.model);
  cfg.judge_client.temperature =
      t.get_number("client.temperature", cfg.judge_client.temperature);
  cfg.judge_client.max_in_flight = static_cast<int>(
      t.get_number("client.max_in_flight", cfg.judge_client.max_in_flight));
  cfg.judge_client.api_key_env =
      t.get_string("client.api_key_env", cfg.judge_client.api_key_env);
  cfg.converter_client = cfg.judge_client;
  cfg.converter_client.model = t.get_string("client.converter_model", "gpt-4o");
  cfg.converter_client.temperature = 0.0;
  cfg.jobs = static_cast<int>(t.get_number("run.jobs", cfg.jobs));
  cfg.dot = t.get_bool("run.dot", cfg.dot);
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return run_config_from_toml(TomlTable::parse_file(path));
}

}  // namespace wge
