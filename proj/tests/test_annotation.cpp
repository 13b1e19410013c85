#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "wge/annotation.hpp"
#include "wge/error.hpp"
#include "wge/prompts.hpp"

using namespace wge;

static std::string read_file(const std::string& name) {
  std::ifstream in(std::string(WGE_PROMPTS_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

TEST_CASE("embedded templates match the checked-in prompt files byte for byte") {
  CHECK(read_file("judge_system.txt") == prompts::kJudgeSystem);
  CHECK(read_file("judge_user_with_ref.txt") == prompts::kJudgeUserWithRef);
  CHECK(read_file("judge_user_without_ref.txt") == prompts::kJudgeUserWithoutRef);
  CHECK(read_file("convert_system.txt") == prompts::kConvertSystem);
  CHECK(read_file("convert_user.txt") == prompts::kConvertUser);
}

static TaskSpec ref_task() {
  TaskSpec task;
  task.task_id = "t1";
  task.intent = "Find the order total";
  task.reference.exact_match = "$42.00";
  task.reference.must_include = {"order", "total"};
  return task;
}

static Trajectory two_step_traj() {
  Trajectory traj;
  traj.task_id = "t1";
  traj.agent_id = "a";
  auto a = parse_action("goto(url='https://shop.example/orders')");
  a.source_url = "https://shop.example";
  traj.actions.push_back(a);
  a = parse_action("click(text='order total $42.00', element='link')");
  a.source_url = "https://shop.example/orders";
  traj.actions.push_back(a);
  return traj;
}

TEST_CASE("judge prompt rendering fills every slot") {
  auto [system, user] = render_judge_prompt(ref_task(), two_step_traj());
  CHECK(system == prompts::kJudgeSystem);
  CHECK(user.find("Task Intent: Find the order total") != std::string::npos);
  CHECK(user.find("- Exact match expected: \"$42.00\"") != std::string::npos);
  CHECK(user.find("- Must include all of: \"order\", \"total\"") != std::string::npos);
  CHECK(user.find("1. goto(url='https://shop.example/orders') (at https://shop.example)") !=
        std::string::npos);
  CHECK(user.find("2. click(text='order total $42.00', element='link') (at https://shop.example/orders)") !=
        std::string::npos);
  CHECK(user.find("{") == std::string::npos);  // no unfilled slots

  TaskSpec bare;
  bare.task_id = "t2";
  bare.intent = "look around";
  auto [sys2, user2] = render_judge_prompt(bare, two_step_traj());
  CHECK(user2.find("without Reference Answer") != std::string::npos);
  CHECK(user2.find("Reference Answers:") == std::string::npos);
}

TEST_CASE("parse_judge_reply accepts the two verdict forms") {
  auto v = parse_judge_reply("SUCCESS\nThe answer appears in the final message.");
  CHECK(v.outcome == Outcome::Success);
  CHECK(v.explanation == "The answer appears in the final message.");
  CHECK(v.confidence == 1.0);

  v = parse_judge_reply("\n  FAILURE  \nNo reference found.\nCONFIDENCE: 0.75\n");
  CHECK(v.outcome == Outcome::Failure);
  CHECK(v.confidence == doctest::Approx(0.75));
  CHECK(v.explanation == "No reference found.");
}

TEST_CASE("parse_judge_reply rejects 20 adversarial variants") {
  const char* variants[20] = {
      "",
      "\n\n",
      "success",
      "Success",
      "failure",
      "FAILED",
      "SUCCESSFUL",
      "SUCCESS!",
      "SUCCESS: the task worked",
      "The agent SUCCESS",
      "VERDICT: SUCCESS",
      "PASS",
      "TRUE",
      "yes",
      "SUCCES",
      "FAILURE.",
      "SUCCESS FAILURE",
      "  maybe SUCCESS",
      "\"SUCCESS\"",
      "1",
  };
  for (const char* text : variants) {
    CAPTURE(text);
    CHECK_THROWS_AS(parse_judge_reply(text), Error);
  }
}

TEST_CASE("conversion prompt rendering") {
  std::vector<std::string> previous = {"goto(url='https://a.example')",
                                       "click(text='Login')"};
  auto [system, user] =
      render_conversion_prompt("Clicked the red button", "buy a widget", previous);
  CHECK(system == prompts::kConvertSystem);
  CHECK(user.find("\"Clicked the red button\"") != std::string::npos);
  CHECK(user.find("Task Context: buy a widget") != std::string::npos);
  CHECK(user.find("- [step 0] goto(url='https://a.example')") != std::string::npos);
  CHECK(user.find("- [step 1] click(text='Login')") != std::string::npos);
}

TEST_CASE("conversion reply parsing and validation") {
  const char* good = R"({
    "functionName": "click",
    "parameters": ["Submit", "button"],
    "namedParameters": {"text": "Submit", "element": "button"},
    "confidence": 0.95,
    "necessary": true,
    "pre": {"id": "step 2"},
    "reasoning": "clear click"
  })";
  auto recs = parse_conversion_reply(good);
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].function_name == "click");
  CHECK(recs[0].pre_step == 2);
  CHECK_FALSE(recs[0].low_trust());

  auto action = to_canonical_action(recs[0], "https://x.example");
  CHECK(canonical_string(action) == "click(text='Submit', element='button')");
  CHECK(action.pre_dependency == 2);
  CHECK(action.source_url == "https://x.example");

  auto code_of = [](const char* text) -> std::string {
    try {
      parse_conversion_reply(text);
    } catch (const Error& e) {
      return e.code();
    }
    return "";
  };
  CHECK(code_of("not json") == "BAD_JSON");
  CHECK(code_of(R"({"functionName":"click","namedParameters":{"text":"x"}})") ==
        "NEED_NECESSARY");
  CHECK(code_of(R"({"functionName":"click","necessary":true})") ==
        "NEED_NAMED_PARAMETERS");
  CHECK(code_of(R"({"functionName":"click","necessary":true,
                    "parameters":["a","b"],"namedParameters":{"text":"a"}})") ==
        "PARAM_MISMATCH");

  // array replies hold one record per sentence
  auto many = parse_conversion_reply(R"([
    {"functionName":"back","parameters":[],"namedParameters":{},"necessary":false},
    {"functionName":"refresh","parameters":[],"namedParameters":{},"necessary":true}
  ])");
  CHECK(many.size() == 2);
  CHECK(many[0].function_name == "back");
  CHECK_FALSE(many[0].necessary);
}

TEST_CASE("mock converter rule table") {
  auto converter = make_mock_converter_client();
  auto convert = [&](const std::string& text) {
    auto [system, user] = render_conversion_prompt(text, "ctx", {});
    auto recs = parse_conversion_reply(converter->complete(system, user));
    std::vector<std::string> calls;
    for (const auto& rec : recs)
      calls.push_back(canonical_string(to_canonical_action(rec, "u")));
    return calls;
  };

  CHECK(convert("Clicked on the 'Submit' button") ==
        std::vector<std::string>{"click(text='Submit', element='button')"});
  CHECK(convert("Then the agent went back") == std::vector<std::string>{"back()"});
  CHECK(convert("Refreshed the page") == std::vector<std::string>{"refresh()"});
  CHECK(convert("Scrolled down to see more") ==
        std::vector<std::string>{"scroll(direction='down')"});
  CHECK(convert("Waited for 3 seconds") ==
        std::vector<std::string>{"wait(seconds='3')"});
  CHECK(convert("Navigated to https://shop.example/cart") ==
        std::vector<std::string>{"goto(url='https://shop.example/cart')"});
  CHECK(convert("Typed 'hello' into the 'search box'") ==
        std::vector<std::string>{"type(text='hello', element='search box')"});
  CHECK(convert("Selected 'Large' from the 'size' dropdown") ==
        std::vector<std::string>{"select(value='Large', element='size')"});
  CHECK(convert("Hovered over the 'menu'") ==
        std::vector<std::string>{"hover(text='menu')"});

  // multi-sentence descriptions split into one call each
  CHECK(convert("Clicked on the 'Login' link. Then the agent went back.") ==
        std::vector<std::string>{"click(text='Login', element='link')", "back()"});

  // unmatched text falls back to a low-trust click
  auto [system, user] =
      render_conversion_prompt("Pondered the 'mystery' of the page", "ctx", {});
  auto recs = parse_conversion_reply(converter->complete(system, user));
  REQUIRE(recs.size() == 1);
  CHECK(recs[0].low_trust());
  CHECK(recs[0].function_name == "click");
  CHECK(recs[0].named_parameters[0].second == "mystery");
}

TEST_CASE("mock judge applies the reference checks mechanically") {
  auto judge = make_mock_judge_client();
  TaskSpec task = ref_task();
  Trajectory traj = two_step_traj();

  auto verdict_for = [&](const TaskSpec& t, const Trajectory& tr) {
    auto [system, user] = render_judge_prompt(t, tr);
    return parse_judge_reply(judge->complete(system, user));
  };

  // exact answer present in an action but "total"/"order" also needed
  CHECK(verdict_for(task, traj).outcome == Outcome::Success);

  TaskSpec strict = task;
  strict.reference.exact_match = "$999.99";
  CHECK(verdict_for(strict, traj).outcome == Outcome::Failure);

  TaskSpec fuzzy;
  fuzzy.task_id = "t3";
  fuzzy.intent = "x";
  fuzzy.reference.fuzzy_match = {"nothing-here", "order total"};
  CHECK(verdict_for(fuzzy, traj).outcome == Outcome::Success);

  // no reference: success iff a final message exists
  TaskSpec bare;
  bare.task_id = "t4";
  bare.intent = "x";
  CHECK(verdict_for(bare, traj).outcome == Outcome::Success);
  Trajectory empty;
  empty.task_id = "t4";
  empty.agent_id = "a";
  CHECK(verdict_for(bare, empty).outcome == Outcome::Failure);
}

namespace {

class FlakyClient final : public AnnotatorClient {
 public:
  explicit FlakyClient(int fail_first) : remaining_(fail_first) {}
  std::string name() const override { return "flaky"; }
  std::string complete(const std::string&, const std::string&) override {
    ++calls;
    if (remaining_-- > 0) throw Error("TRANSPORT", "synthetic outage");
    return "SUCCESS\nok";
  }
  int calls = 0;

 private:
  int remaining_;
};

Dataset judge_fixture() {
  Dataset d;
  TaskSpec task;
  task.task_id = "t1";
  task.intent = "x";
  d.tasks.emplace("t1", task);
  Trajectory traj;
  traj.task_id = "t1";
  traj.agent_id = "a";
  traj.actions.push_back(parse_action("back()"));
  d.trajectories.push_back(traj);
  d.rebuild_agent_registry();
  return d;
}

}  // namespace

TEST_CASE("judge_dataset skip, force and retry semantics") {
  Dataset d = judge_fixture();

  FlakyClient recovers(2);  // two failures, third attempt succeeds
  auto report = judge_dataset(d, recovers);
  CHECK(report.judged == 1);
  CHECK(report.failures.empty());
  CHECK(recovers.calls == 3);
  CHECK(d.trajectories[0].outcome == Outcome::Success);

  // already judged: skipped without a client call
  FlakyClient idle(0);
  report = judge_dataset(d, idle);
  CHECK(report.skipped == 1);
  CHECK(idle.calls == 0);

  // force re-judges
  FlakyClient forced(0);
  JudgeOptions opts;
  opts.force = true;
  report = judge_dataset(d, forced);
  CHECK(report.skipped == 1);
  report = judge_dataset(d, forced, opts);
  CHECK(report.judged == 1);

  // permanent failure leaves the run unjudged and listed
  Dataset d2 = judge_fixture();
  FlakyClient dead(100);
  report = judge_dataset(d2, dead);
  CHECK(report.judged == 0);
  REQUIRE(report.failures.size() == 1);
  CHECK(report.failures[0] == "t1/a#0");
  CHECK(d2.trajectories[0].outcome == Outcome::Unjudged);
  CHECK(dead.calls == 3);
}

TEST_CASE("canonicalize_dataset converts free text and passes canonical through") {
  RawDataset raw;
  TaskSpec task;
  task.task_id = "t1";
  task.intent = "x";
  raw.tasks.emplace("t1", task);
  RawTrajectory rt;
  rt.task_id = "t1";
  rt.agent_id = "a";
  rt.run_index = 0;
  rt.actions.push_back({"goto(url='https://a.example')", "u0", 0, {}, {}, {}});
  rt.actions.push_back({"Clicked on the 'Buy' button", "u1", 1, {}, {}, {}});
  raw.trajectories.push_back(rt);

  auto converter = make_mock_converter_client();
  Dataset d = canonicalize_dataset(raw, *converter);
  REQUIRE(d.trajectories.size() == 1);
  REQUIRE(d.trajectories[0].actions.size() == 2);
  CHECK(canonical_string(d.trajectories[0].actions[0]) ==
        "goto(url='https://a.example')");
  CHECK(d.trajectories[0].actions[0].confidence == 1.0);
  CHECK(canonical_string(d.trajectories[0].actions[1]) ==
        "click(text='Buy', element='button')");
  CHECK(d.trajectories[0].actions[1].confidence == doctest::Approx(0.9));
}
