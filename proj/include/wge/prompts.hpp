#pragma once

// Embedded prompt templates. The files under prompts/ are the versioned
// copies; test_annotation checks the two stay byte-identical.

namespace wge::prompts {

inline constexpr char kJudgeSystem[] =
    R"(You are an expert evaluator for web agent trajectories. Your task is to determine if a web agent successfully completed a given task based on its actions and final response.

EVALUATION CRITERIA:
1. Analyze the agent's actions, URLs visited, and final message
2. Check if the agent fulfilled the task intent
3. If reference answers are provided, verify they appear in the trajectory
4. Consider both the journey (actions/URLs) and destination (final message)
5. Be strict but fair in your assessment

RESPONSE FORMAT:
Respond with exactly "SUCCESS" or "FAILURE" on the first line, followed by a brief explanation on the next line.
)";

inline constexpr char kJudgeUserWithRef[] =
    R"(Task Intent: {intent}

Reference Answers:
{reference_lines}

Final Message:
"{final_message}"

Action Sequence:
{action_lines}

EVALUATION CRITERIA (with Reference Answer):
1. Does the final message contain the correct answer that matches the reference?
2. If the answer is not in the final message, check if it appears in the actions or URLs
3. The reference answer MUST be found somewhere in the trajectory for success

IMPORTANT: The provided reference answers are the ground truth. Success requires finding these specific answers.

Respond with: SUCCESS or FAILURE, followed by a brief explanation.
)";

inline constexpr char kJudgeUserWithoutRef[] =
    R"(Task Intent: {intent}

Final Message:
"{final_message}"

Action Sequence:
{action_lines}

EVALUATION CRITERIA (without Reference Answer):
1. Does the final message indicate that the task intent was fulfilled?
2. Do the actions and URLs show the steps required by the task intent?
3. Judge success from the trajectory and the task intent alone

Respond with: SUCCESS or FAILURE, followed by a brief explanation.
)";

inline constexpr char kConvertSystem[] =
    R"(You are an expert at converting natural language web action descriptions into standardized function calls.

Available Functions:
- click(text: string, element?: string) - Click on an element
- type(text: string, element?: string) - Type text into an input field
- scroll(direction: "up"|"down", amount?: number) - Scroll the page
- select(value: string, element?: string) - Select from dropdown
- hover(text: string, element?: string) - Hover over element
- wait(seconds: number) - Wait for specified time
- goto(url: string) - Navigate to URL
- back() - Go back in browser history
- refresh() - Refresh the page

Instructions:
1. Analyze the input action description carefully
2. Extract the key intent and parameters
3. Map to the most appropriate function from the available list
4. Use named parameters format: functionName(param1="value1", param2="value2")
5. If multiple interpretations are possible, choose the most likely one
6. Maintain high confidence for clear matches, lower for ambiguous cases
7. If no function matches well, return confidence < 0.5
8. ALSO decide whether the action is necessary for accomplishing the task (boolean necessary)
9. If the action depends on earlier steps, include a nested pre field: {id:"<step id>", pre:{...}}
10. If the input describes multiple discrete actions, split them and output a JSON array

Output Format (JSON):
{
  "functionName": "click",
  "parameters": ["Submit", "button"],
  "namedParameters": {"text": "Submit", "element": "button"},
  "confidence": 0.95,
  "necessary": true,
  "pre": { "id": "step 2" },
  "reasoning": "Clear click action on a button element"
}

Important:
- Always include both "parameters" (array) and "namedParameters" (object)
- Always include "necessary"
- Always include "pre" (null if no dependency)

Always output valid JSON. Be concise but accurate.
)";

inline constexpr char kConvertUser[] =
    R"(You are given a natural language description that may contain multiple action sentences. First split the text into individual sentences by period (.), exclamation (!), or question mark (?). For each non-empty sentence, produce a standardized function call. Output a JSON array of conversion objects, one per sentence.

Description:
"{action}"

Task Context: {task_description}

Previous Steps:
{previous_steps}
)";

}  // namespace wge::prompts
