#include "wge/annotation.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <regex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wge/error.hpp"
#include "wge/prompts.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

namespace wge {

using nlohmann::ordered_json;

namespace {

std::string replace_slot(std::string text, const std::string& slot,
                         const std::string& value) {
  std::string needle = "{" + slot + "}";
  size_t pos = text.find(needle);
  if (pos != std::string::npos) text.replace(pos, needle.size(), value);
  return text;
}

std::string trim(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string quote_join(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += "\"" + items[i] + "\"";
  }
  return out;
}

}  // namespace

PromptPair render_judge_prompt(const TaskSpec& task, const Trajectory& traj) {
  std::string action_lines;
  for (size_t i = 0; i < traj.actions.size(); ++i) {
    if (i) action_lines += "\n";
    action_lines += std::to_string(i + 1) + ". " +
                    canonical_string(traj.actions[i]) + " (at " +
                    traj.actions[i].source_url + ")";
  }

  std::string user;
  if (task.reference.empty()) {
    user = prompts::kJudgeUserWithoutRef;
  } else {
    std::string ref_lines;
    auto add_line = [&](const std::string& line) {
      if (!ref_lines.empty()) ref_lines += "\n";
      ref_lines += line;
    };
    if (task.reference.exact_match)
      add_line("- Exact match expected: \"" + *task.reference.exact_match + "\"");
    if (!task.reference.must_include.empty())
      add_line("- Must include all of: " + quote_join(task.reference.must_include));
    if (!task.reference.fuzzy_match.empty())
      add_line("- Fuzzy match acceptable: " + quote_join(task.reference.fuzzy_match));
    user = replace_slot(prompts::kJudgeUserWithRef, "reference_lines", ref_lines);
  }
  user = replace_slot(user, "intent", task.intent);
  user = replace_slot(user, "final_message", traj.final_message());
  user = replace_slot(user, "action_lines", action_lines);
  return {prompts::kJudgeSystem, user};
}

JudgeVerdict parse_judge_reply(std::string_view text) {
  std::vector<std::string> lines;
  {
    std::string buf(text);
    std::istringstream in(buf);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
  }
  size_t first = 0;
  while (first < lines.size() && trim(lines[first]).empty()) ++first;
  if (first == lines.size())
    throw Error("BAD_VERDICT", "empty judge reply");

  std::string token = trim(lines[first]);
  JudgeVerdict verdict;
  if (token == "SUCCESS") verdict.outcome = Outcome::Success;
  else if (token == "FAILURE") verdict.outcome = Outcome::Failure;
  else throw Error("BAD_VERDICT", "first line is not SUCCESS or FAILURE: \"" +
                                      std::string(text) + "\"");

  std::vector<std::string> rest(lines.begin() + first + 1, lines.end());
  while (!rest.empty() && trim(rest.back()).empty()) rest.pop_back();
  if (!rest.empty()) {
    std::string last = trim(rest.back());
    if (last.rfind("CONFIDENCE:", 0) == 0) {
      try {
        verdict.confidence = std::stod(last.substr(11));
        rest.pop_back();
      } catch (...) {
        // leave the line in the explanation
      }
    }
  }
  std::string explanation;
  for (const auto& line : rest) {
    if (!explanation.empty()) explanation += "\n";
    explanation += line;
  }
  verdict.explanation = trim(explanation);
  return verdict;
}

PromptPair render_conversion_prompt(const std::string& description,
                                    const std::string& task_context,
                                    std::span<const std::string> previous) {
  std::string steps;
  for (size_t i = 0; i < previous.size(); ++i) {
    if (i) steps += "\n";
    steps += "- [step " + std::to_string(i) + "] " + previous[i];
  }
  std::string user = prompts::kConvertUser;
  user = replace_slot(user, "action", description);
  user = replace_slot(user, "task_description", task_context);
  user = replace_slot(user, "previous_steps", steps);
  return {prompts::kConvertSystem, user};
}

namespace {

ConversionRecord record_from_json(const ordered_json& j) {
  if (!j.is_object()) throw Error("BAD_JSON", "conversion record is not an object");
  ConversionRecord rec;
  if (!j.contains("functionName"))
    throw Error("BAD_JSON", "conversion record missing functionName");
  rec.function_name = j.at("functionName").get<std::string>();
  if (!j.contains("namedParameters") || !j.at("namedParameters").is_object())
    throw Error("NEED_NAMED_PARAMETERS", "conversion record missing namedParameters");
  for (const auto& [key, value] : j.at("namedParameters").items())
    rec.named_parameters.emplace_back(key, value.get<std::string>());
  if (j.contains("parameters"))
    rec.parameters = j.at("parameters").get<std::vector<std::string>>();
  else
    for (const auto& [key, value] : rec.named_parameters) rec.parameters.push_back(value);
  if (rec.parameters.size() != rec.named_parameters.size())
    throw Error("PARAM_MISMATCH", "parameters and namedParameters disagree");
  for (size_t i = 0; i < rec.parameters.size(); ++i)
    if (rec.parameters[i] != rec.named_parameters[i].second)
      throw Error("PARAM_MISMATCH", "parameters and namedParameters disagree");
  if (!j.contains("necessary"))
    throw Error("NEED_NECESSARY", "conversion record missing \"necessary\"");
  rec.necessary = j.at("necessary").get<bool>();
  if (j.contains("confidence")) rec.confidence = j.at("confidence").get<double>();
  if (j.contains("pre") && !j.at("pre").is_null()) {
    const auto& pre = j.at("pre");
    if (pre.is_object() && pre.contains("id")) {
      std::string id = pre.at("id").get<std::string>();
      size_t digits = id.find_last_not_of("0123456789");
      if (digits + 1 < id.size())
        rec.pre_step = std::stoi(id.substr(digits + 1));
    }
  }
  if (j.contains("reasoning")) rec.reasoning = j.at("reasoning").get<std::string>();
  return rec;
}

}  // namespace

std::vector<ConversionRecord> parse_conversion_reply(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error("BAD_JSON", std::string("invalid conversion JSON: ") + e.what());
  }
  std::vector<ConversionRecord> out;
  if (j.is_array())
    for (const auto& item : j) out.push_back(record_from_json(item));
  else
    out.push_back(record_from_json(j));
  return out;
}

CanonicalAction to_canonical_action(const ConversionRecord& rec,
                                    const std::string& url) {
  std::string call = rec.function_name + "(";
  bool first = true;
  for (const auto& [key, value] : rec.named_parameters) {
    if (!first) call += ", ";
    first = false;
    call += key + "='";
    for (char c : value) {
      if (c == '\'' || c == '\\') call.push_back('\\');
      call.push_back(c);
    }
    call += "'";
  }
  call += ")";
  CanonicalAction action = parse_action(call);
  action.confidence = rec.confidence;
  action.necessary = rec.necessary;
  action.pre_dependency = rec.pre_step;
  action.source_url = url;
  return action;
}

JudgeReport judge_dataset(Dataset& d, AnnotatorClient& client,
                          const JudgeOptions& opts) {
  JudgeReport report;
  for (auto& traj : d.trajectories) {
    if (traj.outcome != Outcome::Unjudged && !opts.force) {
      ++report.skipped;
      continue;
    }
    auto it = d.tasks.find(traj.task_id);
    if (it == d.tasks.end())
      throw Error("DANGLING_TASK", "trajectory " + traj.key() +
                                       " references unknown task");
    PromptPair prompt = render_judge_prompt(it->second, traj);
    bool done = false;
    for (int attempt = 0; attempt < opts.max_attempts && !done; ++attempt) {
      if (attempt > 0 && opts.backoff)
        std::this_thread::sleep_for(std::chrono::milliseconds(250 << attempt));
      try {
        JudgeVerdict verdict =
            parse_judge_reply(client.complete(prompt.system, prompt.user));
        traj.outcome = verdict.outcome;
        traj.judge_confidence = verdict.confidence;
        ++report.judged;
        done = true;
      } catch (const Error&) {
        // retry; transport and parse failures are treated alike
      }
    }
    if (!done) report.failures.push_back(traj.key());
  }
  return report;
}

Dataset canonicalize_dataset(const RawDataset& raw, AnnotatorClient& converter) {
  Dataset out;
  out.tasks = raw.tasks;
  for (const auto& rt : raw.trajectories) {
    Trajectory traj;
    traj.task_id = rt.task_id;
    traj.agent_id = rt.agent_id;
    traj.run_index = rt.run_index.value_or(0);
    traj.outcome = rt.outcome;
    traj.judge_confidence = rt.judge_confidence;
    const std::string& intent = raw.tasks.at(rt.task_id).intent;
    std::vector<std::string> previous;
    for (const auto& ra : rt.actions) {
      std::vector<CanonicalAction> converted;
      try {
        CanonicalAction a = parse_action(ra.description);
        a.source_url = ra.url;
        if (ra.necessary) a.necessary = *ra.necessary;
        if (ra.confidence) a.confidence = *ra.confidence;
        if (ra.pre) a.pre_dependency = *ra.pre;
        converted.push_back(std::move(a));
      } catch (const Error&) {
        PromptPair prompt =
            render_conversion_prompt(ra.description, intent, previous);
        auto records =
            parse_conversion_reply(converter.complete(prompt.system, prompt.user));
        for (const auto& rec : records)
          converted.push_back(to_canonical_action(rec, ra.url));
      }
      for (auto& a : converted) {
        previous.push_back(canonical_string(a));
        traj.actions.push_back(std::move(a));
      }
    }
    out.trajectories.push_back(std::move(traj));
  }
  out.rebuild_agent_registry();
  return out;
}

// ---------------------------------------------------------------------------
// Mock clients
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> extract_quoted(const std::string& line) {
  std::vector<std::string> out;
  size_t pos = 0;
  while ((pos = line.find('"', pos)) != std::string::npos) {
    size_t end = line.find('"', pos + 1);
    if (end == std::string::npos) break;
    out.push_back(line.substr(pos + 1, end - pos - 1));
    pos = end + 1;
  }
  return out;
}

class MockJudgeClient final : public AnnotatorClient {
 public:
  std::string name() const override { return "mock-judge"; }

  std::string complete(const std::string&, const std::string& user) override {
    std::optional<std::string> exact;
    std::vector<std::string> must_include, fuzzy;
    std::string haystack, final_message;

    std::istringstream in(user);
    std::string line;
    enum { None, Final, Actions } section = None;
    while (std::getline(in, line)) {
      if (line.rfind("- Exact match expected: ", 0) == 0) {
        auto items = extract_quoted(line);
        if (!items.empty()) exact = items[0];
      } else if (line.rfind("- Must include all of: ", 0) == 0) {
        must_include = extract_quoted(line);
      } else if (line.rfind("- Fuzzy match acceptable: ", 0) == 0) {
        fuzzy = extract_quoted(line);
      } else if (line == "Final Message:") {
        section = Final;
      } else if (line == "Action Sequence:") {
        section = Actions;
      } else if (line.rfind("EVALUATION CRITERIA", 0) == 0) {
        section = None;
      } else if (section == Final && !line.empty()) {
        std::string msg = line;
        if (msg.size() >= 2 && msg.front() == '"' && msg.back() == '"')
          msg = msg.substr(1, msg.size() - 2);
        final_message += msg;
        haystack += msg + "\n";
      } else if (section == Actions) {
        haystack += line + "\n";
      }
    }

    std::string missing;
    if (exact && haystack.find(*exact) == std::string::npos)
      missing = "exact answer \"" + *exact + "\"";
    for (const auto& item : must_include)
      if (missing.empty() && haystack.find(item) == std::string::npos)
        missing = "required answer \"" + item + "\"";
    if (missing.empty() && !fuzzy.empty()) {
      bool any = std::any_of(fuzzy.begin(), fuzzy.end(), [&](const auto& f) {
        return haystack.find(f) != std::string::npos;
      });
      if (!any) missing = "any fuzzy-match answer";
    }
    if (missing.empty() && !exact && must_include.empty() && fuzzy.empty() &&
        final_message.empty())
      missing = "a final message";

    if (missing.empty())
      return "SUCCESS\nAll reference checks passed against the trajectory.";
    return "FAILURE\nThe trajectory does not contain " + missing + ".";
  }
};

std::vector<std::string> quoted_tokens(const std::string& text) {
  std::vector<std::string> out;
  static const std::regex q(R"(['"]([^'"]+)['"])");
  for (auto it = std::sregex_iterator(text.begin(), text.end(), q);
       it != std::sregex_iterator(); ++it)
    out.push_back((*it)[1].str());
  return out;
}

void set_params(ordered_json& rec, std::vector<std::pair<std::string, std::string>> kv) {
  ordered_json named = ordered_json::object();
  ordered_json plain = ordered_json::array();
  for (auto& [k, v] : kv) {
    named[k] = v;
    plain.push_back(v);
  }
  rec["parameters"] = plain;
  rec["namedParameters"] = named;
}

class MockConverterClient final : public AnnotatorClient {
 public:
  std::string name() const override { return "mock-converter"; }

  std::string complete(const std::string&, const std::string& user) override {
    std::string description;
    {
      size_t start = user.find("Description:\n\"");
      size_t end = user.find("\"\n\nTask Context:");
      if (start != std::string::npos && end != std::string::npos) {
        start += 14;
        description = user.substr(start, end - start);
      }
    }

    ordered_json replies = ordered_json::array();
    for (const std::string& sentence : split_sentences(description)) {
      ordered_json rec = convert_sentence(sentence);
      replies.push_back(std::move(rec));
    }
    return replies.dump(2);
  }

 private:
  static std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string current;
    for (size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      // only break at punctuation followed by whitespace or end of text,
      // so dots inside URLs and decimals stay put
      bool boundary = (c == '.' || c == '!' || c == '?') &&
                      (i + 1 == text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])));
      if (boundary) {
        std::string t = trim(current);
        if (!t.empty()) out.push_back(t);
        current.clear();
      } else {
        current.push_back(c);
      }
    }
    std::string t = trim(current);
    if (!t.empty()) out.push_back(t);
    return out;
  }

  static ordered_json base_record(const std::string& fn, double confidence,
                                  const std::string& reasoning) {
    ordered_json rec;
    rec["functionName"] = fn;
    rec["parameters"] = ordered_json::array();
    rec["namedParameters"] = ordered_json::object();
    rec["confidence"] = confidence;
    rec["necessary"] = true;
    rec["pre"] = nullptr;
    rec["reasoning"] = reasoning;
    return rec;
  }

  static ordered_json convert_sentence(const std::string& sentence) {
    static const std::regex re_back(R"((went|go|goes|going|navigated?)\s+back)",
                                    std::regex::icase);
    static const std::regex re_refresh(R"(\b(refresh(ed)?|reload(ed)?)\b)",
                                       std::regex::icase);
    static const std::regex re_scroll(R"(scroll(ed|s)?\s+(up|down))",
                                      std::regex::icase);
    static const std::regex re_wait(R"(wait(ed|s)?\s+(for\s+)?(\d+)\s*second)",
                                    std::regex::icase);
    static const std::regex re_goto(R"((went to|navigated? to|opened|visit(ed)?)\s+(https?://\S+))",
                                    std::regex::icase);
    static const std::regex re_type(R"(typed?\s+['"]([^'"]+)['"]\s+into\s+(the\s+)?['"]?([A-Za-z0-9 _-]+?)['"]?\s*$)",
                                    std::regex::icase);
    static const std::regex re_select(R"(select(ed)?\s+['"]([^'"]+)['"](\s+from\s+(the\s+)?['"]([^'"]+)['"])?)",
                                      std::regex::icase);
    static const std::regex re_hover(R"(hover(ed)?\s+(over\s+)?(the\s+)?['"]([^'"]+)['"])",
                                     std::regex::icase);
    static const std::regex re_click(R"(\b(click(ed)?(\s+on)?|press(ed)?|tap(ped)?)\b)",
                                     std::regex::icase);

    std::smatch m;
    if (std::regex_search(sentence, m, re_back))
      return base_record("back", 0.9, "navigation back in history");
    if (std::regex_search(sentence, m, re_refresh))
      return base_record("refresh", 0.9, "page refresh");
    if (std::regex_search(sentence, m, re_scroll)) {
      ordered_json rec = base_record("scroll", 0.9, "scroll action");
      std::string dir = m[2].str();
      std::transform(dir.begin(), dir.end(), dir.begin(), ::tolower);
      set_params(rec, {{"direction", dir}});
      return rec;
    }
    if (std::regex_search(sentence, m, re_wait)) {
      ordered_json rec = base_record("wait", 0.9, "explicit wait");
      set_params(rec, {{"seconds", m[3].str()}});
      return rec;
    }
    if (std::regex_search(sentence, m, re_goto)) {
      ordered_json rec = base_record("goto", 0.9, "navigation to a URL");
      set_params(rec, {{"url", m[3].str()}});
      return rec;
    }
    if (std::regex_search(sentence, m, re_type)) {
      ordered_json rec = base_record("type", 0.9, "typing into a field");
      set_params(rec, {{"text", m[1].str()}, {"element", trim(m[3].str())}});
      return rec;
    }
    if (std::regex_search(sentence, m, re_select)) {
      ordered_json rec = base_record("select", 0.9, "dropdown selection");
      std::vector<std::pair<std::string, std::string>> kv = {{"value", m[2].str()}};
      if (m[5].matched) kv.emplace_back("element", trim(m[5].str()));
      set_params(rec, kv);
      return rec;
    }
    if (std::regex_search(sentence, m, re_hover)) {
      ordered_json rec = base_record("hover", 0.9, "hover over an element");
      set_params(rec, {{"text", m[4].str()}});
      return rec;
    }
    if (std::regex_search(sentence, m, re_click)) {
      auto quoted = quoted_tokens(sentence);
      ordered_json rec = base_record("click", 0.9, "click action");
      std::vector<std::pair<std::string, std::string>> kv;
      kv.emplace_back("text", quoted.empty() ? trim(sentence.substr(m.position(0) + m.length(0)))
                                             : quoted.front());
      std::string lowered = sentence;
      std::transform(lowered.begin(), lowered.end(), lowered.begin(), ::tolower);
      if (lowered.find("button") != std::string::npos)
        kv.emplace_back("element", "button");
      else if (lowered.find("link") != std::string::npos)
        kv.emplace_back("element", "link");
      set_params(rec, kv);
      return rec;
    }

    // fallback: low-trust click on the longest quoted token
    auto quoted = quoted_tokens(sentence);
    std::string target = sentence;
    if (!quoted.empty())
      target = *std::max_element(quoted.begin(), quoted.end(),
                                 [](const auto& a, const auto& b) {
                                   return a.size() < b.size();
                                 });
    ordered_json rec = base_record("click", 0.3, "no rule matched; low-trust fallback");
    set_params(rec, {{"text", target}});
    return rec;
  }
};

class LiveClient final : public AnnotatorClient {
 public:
  explicit LiveClient(LiveClientConfig cfg) : cfg_(std::move(cfg)) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (key) api_key_ = key;
  }

  std::string name() const override { return "live:" + cfg_.model; }

  std::string complete(const std::string& system, const std::string& user) override {
    if (api_key_.empty())
      throw Error("NO_CREDENTIALS",
                  "environment variable " + cfg_.api_key_env + " is not set");
    httplib::Client http(cfg_.endpoint);
    http.set_connection_timeout(30);
    http.set_read_timeout(120);
    ordered_json body;
    body["model"] = cfg_.model;
    body["temperature"] = cfg_.temperature;
    body["messages"] = ordered_json::array({
        ordered_json{{"role", "system"}, {"content", system}},
        ordered_json{{"role", "user"}, {"content", user}},
    });
    auto res = http.Post("/v1/chat/completions",
                         {{"Authorization", "Bearer " + api_key_}},
                         body.dump(), "application/json");
    if (!res || res->status != 200)
      throw Error("TRANSPORT", "completion request failed (status " +
                                   (res ? std::to_string(res->status) : "none") + ")");
    ordered_json reply = ordered_json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  }

 private:
  LiveClientConfig cfg_;
  std::string api_key_;
};

}  // namespace

std::unique_ptr<AnnotatorClient> make_mock_judge_client() {
  return std::make_unique<MockJudgeClient>();
}

std::unique_ptr<AnnotatorClient> make_mock_converter_client() {
  return std::make_unique<MockConverterClient>();
}

std::unique_ptr<AnnotatorClient> make_live_client(const LiveClientConfig& cfg) {
  return std::make_unique<LiveClient>(cfg);
}

}  // namespace wge
