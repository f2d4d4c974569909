#include "dlcot/prompts.hpp"

#include <cstdio>

#include "dlcot/errors.hpp"

namespace dlcot {

const char* kQwqSystemPrompt =
    "You are a helpful and harmless assistant. You are Qwen developed by "
    "Alibaba. You should think step-by-step.";

namespace {

constexpr const char* kMacroParseTemplate = R"PROMPT(You are a mathematical solution structure decomposition agent. Your task is to analyze a mathematical problem's solution, then restructure it into a specific format following these rules:

1. Split the solution into exactly 5 sequential components:

   - Question_Repeat: The initial statement of the problem, including the "let's break this down step by step" part

   - Problem_Understand: Only the initial high-level analysis before diving into calculations (if present, otherwise skip)

   - Approach_Explore: The main solution process, including all calculations and intermediate steps up to finding the first answer

   - Verify: Include ALL verification steps, alternative approaches, and checking calculations after the initial approach (if present, otherwise skip)

   - Conclusion: Include both the final concluding statement AND the boxed answer

2. Natural Transition Points:

   - Question_Repeat -> Problem_Understand: Break after the problem is stated and before analysis begins

   - Problem_Understand -> Approach_Explore: Break after conceptual analysis and before first calculations

   - Approach_Explore -> Verify: Break after obtaining first answer and before starting verification

   - Verify -> Conclusion: Break after all checking is complete and before final statement

3. Format Requirements:

   - Present the output in two main sections: "# Answer Split" and "# Structure"

   - Under "Answer Split", use "##" headings for each component (Question_Repeat, Problem_Understand, etc.)

   - Include the exact original text under each heading, preserving all line breaks and formatting

   - After all components, add the "# Structure" section with the array of component names

   - Ensure no text is truncated or modified from the original

4. Content Distribution Guidelines:

   - Question_Repeat must include both the problem statement AND any initial "let's break this down" statement

   - Problem_Understand should be limited to only the initial analysis before any calculations

   - Approach_Explore should contain all mathematical steps, intermediate checking and calculations

   - Place ALL verification steps, alternative approach, and checking calculations in the Verify section

   - Conclusion should contain only the final answer with proper \boxed{} notation

5. Critical Requirements:

   - Preserve all original mathematical notation exactly, especially \boxed{} notation

   - Maintain all line breaks as they appear in the original text

   - Include all text exactly as written without any modifications

   - Ensure each section break occurs at natural transition points in the approach

   - Ensure all verification steps are in the Verify section

# Input

## 1. The mathematics question's solution

[solution input here]

## Output
)PROMPT";

constexpr const char* kApproachParseTemplate = R"PROMPT(As an AI assistant, your task is to restructure mathematical solution text into a hierarchical format. Follow these steps:

1. Parse the input text and organize it into the following structure:

   - Top level: "Approach Explore Split" (main heading)

   - Second level: Approach (## Approach1, ## Approach2, etc.)

   - Third level: Analysis components

2. Format Rules:

   - Use # for main heading

   - Use ## for Approach level

   - Use ### for component headers

   - DO NOT use original text content as component headers

   - Preserve all mathematical notations and equations

   - Maintain original text content within appropriate sections

3. After the main content, add a "structure" section that summarizes the hierarchy using: Approach[n]: [list of components]

4. Approach Separation Rules:

    - Start a new Approach section when a different approach to the same problem is attempted

    - The strategy fundamentally changes

    - Keywords: "alternatively", "Maybe there's a better way."

5. Content Preservation:

    - Keep all mathematical notations (\( \) and LaTeX)

    - Use exact text as it appears

    - Maintain all numerical values and equations

    - Keep logical flow intact

    - Include all text exactly as written without any modifications

Please format the following mathematical solution accordingly :

# Mathematical Approach:

[solution input here]

Remember double check original mathematical solution hasn't been rewritten.
)PROMPT";

constexpr const char* kVerifyParseTemplate = R"PROMPT(Given a mathematical solution and its reflection text, identify and categorize the verification steps into specific categories. The output should contain two parts:

1. A formatted section titled "# Verify Split" containing:

   - Each verification step as a second-level heading (##)

   - The relevant text under each category keeping the mathematical notation intact

   - Separate the content of the self-talk affirmation and negation programs into the self-affirmation/self-negation

   - "self-affirmation" example: I think this is solid/ Yes, that checks out

   - "self-negation" example: We already did that / but that might be too complicated

2. A section titled "# structure" containing:

   - A simple list of the verification categories in the exact order they appear in the text

   - Format: ["category1", "category2", ...]

Key Guidelines:

- Include complete verification sequences even when they span multiple paragraphs

- Keep all mathematical notation and calculations exactly as they appear

- Maintain the logical flow of verification steps

- Focus on numerical verification and constraint checking

- Include all text exactly as written without any modifications

- Include complete verification sequences even when they span multiple paragraphs

Format the output exactly as shown:

# Verify Split

## [Category_Name]

[Complete verification text with all calculations]

## [Next_Category_Name]

[Complete verification text with all calculations]

# structure

["category1", "category2", ...]

Important: Only INCLUDE the mathematical REFLECTION TEXT, NOT the SOLUTION TEXT itself.

## Input

### 1. Solution Text:

[solution input here]

### 2. Please split the following mathematical reflection text:

[reflection input here]

## Output:
)PROMPT";

constexpr const char* kRedundancyGradeTemplate = R"PROMPT(You are a professional mathematics teacher tasked with evaluating student solutions to mathematical problems. I will provide you with:

1. A mathematical problem

2. The standard solution for this problem

3. Multiple solutions that need evaluation

For each solution, you need to carefully analyze and provide two labels:

# Label 1: Evaluate Completeness and Correctness

Analyze whether each solution fully derives the final answer to the question and whether the final answer matches the final answer marked with \boxed in the standard solution.
Note that in label 1, we only care about whether the final answer in solution matches the final answer marked with \boxed in the standard solution. There could be errors in the solution, but as long as the final answer matches, it is considered correct.

- If the solution fully derives the final answer to the question, and matches the final answer marked with \boxed in the standard solution, output: <label1>Correct</label1>

- If the solution fully derives a final answer to the question, but differs from the final answer marked with \boxed in the standard solution, output: <label1>Incorrect</label1>

- If the solution is not complete and does not fully derive the final answer to the question, output: <label1>Incomplete</label1>

- Note that the format of the final answer in the solution may have slightly different representations compared to the final answer in the standard solution. For numerical or formula solutions, if they are mathematically equivalent, they are considered correct. For example, 109.2 and \frac{546}{5} are equivalent and thus correct.

# Label 2: Evaluate Calculation and Derivation Errors

Even though the solution may be correct, incorrect, or incomplete as defined above, there might still be Calculation and Derivation Errors in its derivation process.

- If there are calculation and derivation errors, output: <label2>Calculation and Derivation Error</label2>,

- Then in the next line, talk about the explanation for the Calculation and Derivation Error.

- Then in the next line, quote the erroneous parts from the solution completely and exactly without omitting any words. An erroneous part could be a step or several steps. You should fully include where the error starts and ends.

- Note that the part you quote must exactly match a portion of the solution. Do not add any extra characters, including newline characters, spaces, etc.

- if the the solution does not contain any calculation and derivation errors, output: <label2>No Calculation and Derivation Error</label2>

# Output Format

For each solution, provide output in the following format:

## Solution X (where X is the solution number)

[Label 1]

Explanation for label1: [Detailed explanation of the reason for Label 1]

[Label 2]

Explanation for label2: [Detailed explanation of the reason for Label 2]

Quoted erroneous parts: [Quoted erroneous parts from the solution]

# Evaluation Principles

1. Examine each step of every solution carefully

2. Provide specific and clear explanations, avoiding vague statements

3. Note when evaluating solutions, treat each solution as a complete independent answer. Do not make connections between multiple solutions.

4. You must strictly follow the format of the output

Remember to maintain consistency in your evaluation across all solutions while being thorough in your analysis of each specific case.

# Input

Question:

[question input here]

Standard solution:

[standard solution input here]

Solutions to be evaluated:

[solution input here]

# Output:
)PROMPT";

constexpr const char* kCoherenceRewriteTemplate = R"PROMPT(You are polishing a shortened mathematical reasoning trace. Some passages were removed, and the text before and after the removal point must read fluently.

Write a single short transition sentence to insert between the two excerpts below. Requirements:

- At most one sentence, no more than 60 tokens.

- Do not introduce any numbers, equations, or mathematical claims that are not already present in the excerpts.

- Do not restate or summarize the removed content.

- Change nothing else; output only the transition sentence, with no headings or quotes.

- If the excerpts already read fluently together, output nothing.

Text before the removal point:

[preceding context here]

Text after the removal point:

[following context here]

Transition sentence:
)PROMPT";

struct TemplateSpec {
  const char* text;
  std::vector<std::pair<std::string, std::string>> slot_anchors;  // slot -> anchor
};

const TemplateSpec& template_spec(TemplateId id) {
  static const TemplateSpec macro{
      kMacroParseTemplate, {{"solution", "[solution input here]"}}};
  static const TemplateSpec approach{
      kApproachParseTemplate, {{"solution", "[solution input here]"}}};
  static const TemplateSpec verify{kVerifyParseTemplate,
                                   {{"solution", "[solution input here]"},
                                    {"reflection", "[reflection input here]"}}};
  static const TemplateSpec grade{
      kRedundancyGradeTemplate,
      {{"question", "[question input here]"},
       {"standard_solution", "[standard solution input here]"},
       {"solutions", "[solution input here]"}}};
  static const TemplateSpec rewrite{kCoherenceRewriteTemplate,
                                    {{"before", "[preceding context here]"},
                                     {"after", "[following context here]"}}};
  switch (id) {
    case TemplateId::macro_parse: return macro;
    case TemplateId::approach_parse: return approach;
    case TemplateId::verify_parse: return verify;
    case TemplateId::redundancy_grade: return grade;
    case TemplateId::coherence_rewrite: return rewrite;
  }
  throw FatalError("unknown template id");
}

}  // namespace

void DecodingParams::validate() const {
  if (temperature < 0.0) throw FatalError("decoding: temperature must be >= 0");
  if (top_p <= 0.0 || top_p > 1.0) throw FatalError("decoding: top_p must be in (0, 1]");
  if (top_k.has_value() && *top_k < 1) throw FatalError("decoding: top_k must be >= 1");
  if (max_new_tokens <= 0) throw FatalError("decoding: max_new_tokens must be > 0");
}

std::string DecodingParams::canonical() const {
  char buffer[160];
  std::snprintf(buffer, sizeof(buffer),
                "temperature=%.6g;top_p=%.6g;top_k=%s;max_new_tokens=%d",
                temperature, top_p,
                top_k ? std::to_string(*top_k).c_str() : "none", max_new_tokens);
  return buffer;
}

const char* template_name(TemplateId id) {
  switch (id) {
    case TemplateId::macro_parse: return "macro_parse";
    case TemplateId::approach_parse: return "approach_parse";
    case TemplateId::verify_parse: return "verify_parse";
    case TemplateId::redundancy_grade: return "redundancy_grade";
    case TemplateId::coherence_rewrite: return "coherence_rewrite";
  }
  return "unknown";
}

std::vector<std::string> template_slots(TemplateId id) {
  std::vector<std::string> names;
  for (const auto& [slot, anchor] : template_spec(id).slot_anchors) {
    names.push_back(slot);
  }
  return names;
}

std::string render(const PromptRequest& request) {
  request.decoding.validate();
  const TemplateSpec& spec = template_spec(request.template_id);

  for (const auto& [slot, value] : request.slots) {
    bool known = false;
    for (const auto& [name, anchor] : spec.slot_anchors) {
      if (name == slot) known = true;
    }
    if (!known) {
      throw FatalError(std::string("render: unused slot '") + slot + "' for template " +
                       template_name(request.template_id));
    }
  }

  std::string text = spec.text;
  for (const auto& [name, anchor] : spec.slot_anchors) {
    const auto it = request.slots.find(name);
    if (it == request.slots.end()) {
      throw FatalError(std::string("render: missing slot '") + name + "' for template " +
                       template_name(request.template_id));
    }
    const std::size_t pos = text.find(anchor);
    if (pos == std::string::npos) {
      throw FatalError(std::string("render: template anchor not found: ") + anchor);
    }
    text.replace(pos, std::string(anchor).size(), it->second);
  }

  if (request.correction.has_value()) {
    text += "\n\n# Correction\n\nThe previous output failed validation: " +
            *request.correction + "\nRe-emit the full output following the format exactly.\n";
  }
  return text;
}

}  // namespace dlcot
