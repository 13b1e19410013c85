#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wge/dataset.hpp"

namespace wge {

struct JudgeVerdict {
  Outcome outcome = Outcome::Unjudged;
  std::string explanation;
  double confidence = 1.0;
};

struct ConversionRecord {
  std::string function_name;
  std::vector<std::string> parameters;
  std::vector<std::pair<std::string, std::string>> named_parameters;
  double confidence = 1.0;
  bool necessary = true;
  std::optional<int> pre_step;
  std::string reasoning;

  bool low_trust() const { return confidence < 0.5; }
};

// Text-completion contract shared by the mock and live backends. Mock
// implementations are deterministic in (system, user).
class AnnotatorClient {
 public:
  virtual ~AnnotatorClient() = default;
  virtual std::string complete(const std::string& system,
                               const std::string& user) = 0;
  virtual std::string name() const = 0;
};

struct PromptPair {
  std::string system;
  std::string user;
};

PromptPair render_judge_prompt(const TaskSpec& task, const Trajectory& traj);

// First non-blank line must be exactly SUCCESS or FAILURE after trimming.
// An optional trailing "CONFIDENCE: <x>" line feeds the confidence channel.
// Throws BAD_VERDICT otherwise.
JudgeVerdict parse_judge_reply(std::string_view text);

PromptPair render_conversion_prompt(const std::string& description,
                                    const std::string& task_context,
                                    std::span<const std::string> previous);

// Accepts one JSON object or an array of them.
// Throws BAD_JSON, NEED_NECESSARY, NEED_NAMED_PARAMETERS, PARAM_MISMATCH.
std::vector<ConversionRecord> parse_conversion_reply(std::string_view text);

CanonicalAction to_canonical_action(const ConversionRecord& rec,
                                    const std::string& url);

struct JudgeOptions {
  bool force = false;
  int max_attempts = 3;
  bool backoff = false;  // mock runs skip the sleep
};

struct JudgeReport {
  int judged = 0;
  int skipped = 0;                    // already judged, no --force
  std::vector<std::string> failures;  // keys left unjudged
};

JudgeReport judge_dataset(Dataset& d, AnnotatorClient& client,
                          const JudgeOptions& opts = {});

// Converts raw free-text trajectories via the client's conversion replies.
// Descriptions that already parse as canonical calls pass through unchanged.
Dataset canonicalize_dataset(const RawDataset& raw, AnnotatorClient& converter);

// Mock judge: applies the evaluation prompt's reference checks mechanically
// (exact / must-include / fuzzy substring over final message, actions, urls).
std::unique_ptr<AnnotatorClient> make_mock_judge_client();

// Mock converter: fixed rule table over common phrasings, confidence 0.9.
// Unmatched sentences fall back to a low-trust click on the longest quoted
// token (confidence 0.3).
std::unique_ptr<AnnotatorClient> make_mock_converter_client();

struct LiveClientConfig {
  std::string endpoint = "https://api.openai.com";
  std::string model = "o4-mini";  // judge default; converter uses gpt-4o
  double temperature = 0.1;
  int max_in_flight = 4;
  std::string api_key_env = "WGE_API_KEY";
};

std::unique_ptr<AnnotatorClient> make_live_client(const LiveClientConfig& cfg);

}  // namespace wge
