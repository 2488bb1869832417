#include "evpv/prompts.hpp"

#include <stdexcept>

namespace evpv {

namespace {

constexpr const char* kStage1 = R"(You are a top-tier image analyst and mathematics education expert. Your task is to create a clear, accurate, and solution-critical description of the image provided alongside a math question.

Focus on analyzing the image and generating a structured natural-language description, as if explaining the diagram to a student. Your description must cover the following points in one coherent paragraph:

1. [What is it?] One sentence summarizing the image type and topic (for example: "This is a geometric figure showing a combined cone and cylinder.").

2. [Key elements and data?] Identify the main mathematical objects (points, lines, shapes, graphs) and list all directly visible numbers, labels, and symbols.

3. [Important relationships?] Describe the spatial layout and the geometric relationships that are critical for solving the problem.

Output format: a strict JSON code block. The root object must contain a single key "image_description" whose value is the complete description string. Do NOT add any explanatory text outside the JSON block.

---

Question text:

{question_text}

Image: [image token]
)";

constexpr const char* kStage2 = R"(### Fair Visual Checklist Audit: Penalize Direct Contradictions

[Role and Task]

You are a fair and objective AI auditor. Your sole task is to compare two description lists about the same image: a "Ground-Truth Checklist" (provably correct) and a "Candidate Checklist" (a model's visual understanding), and evaluate the factual accuracy of the Candidate Checklist.

[Core Evaluation Principle]

"Incomplete" is NOT "incorrect". Only a direct contradiction counts as an error. Strictly ignore all omissions and missing details.

[Inputs]

1. [Ground-Truth Checklist]: verified, correct factual statements about the image.
2. [Candidate Checklist]: model-generated visual statements to be audited.

[Output Format]

Output a strict JSON code block with exactly three keys:

- "errors_and_hallucinations": an array of objects, one per direct contradiction, each with fields "faulty_statement", "correction_or_reason", and "severity" ("High" or "Low"). Use an empty array [] when no contradictions are found.
- "omissions": a string array. This field does NOT affect scoring and should almost always be [].
- "p_score": a float in [0.0, 1.0], the final reliability score.

[Scoring Rules]

- Start from 1.0.
- Deduct 0.5 for each High-severity contradiction.
- Deduct 0.2 for each Low-severity contradiction.
- The minimum score is 0.0.

[Severity Guide]

- High: contradicts a primary visual fact (object count, a key spatial relationship, the presence or absence of a main object).
- Low: contradicts a secondary detail (background color, a non-critical attribute).

---

[Ground-Truth Checklist]:

{golden_standard_text}

[Candidate Checklist]:

{checklist_to_review_text}
)";

constexpr const char* kStage3 = R"(You are a professional expert in mathematical reasoning.
You will judge whether the CURRENT solution step is correct, given the problem and the image.
You MUST output ONLY a JSON integer: 1 or -1.

- 1 means the step is correct.

- -1 means the step is incorrect (it contradicts the image, the question, or the previous steps, or the reasoning is invalid).

Important:

- Use the image, the question, and the previous steps as context.
- Judge ONLY the CURRENT step, relative to the solution so far.
- Do NOT output any other text, keys, markdown, or explanation.

Problem:

{question_text}

Image description:

{image_description_text}

Previous steps:

{history_steps_text}

CURRENT step to evaluate:

{current_step_text}

Problem image: [image token]
)";

constexpr const char* kPolicy = R"(You are a meticulous and precise AI assistant, an expert in visual mathematical reasoning. Your primary goal is to solve the user's query by providing a detailed step-by-step thought process.

You MUST provide your entire response in a single, valid JSON code block. Do not include any text, explanations, or markdown formatting outside of the JSON object.

---

### DIVERSITY REQUIREMENTS (VERY IMPORTANT)

- This is reasoning variant #{variant_id}. Your reasoning path should be meaningfully different from the other variants.
- Try a different logical decomposition, use different intermediate variables, or vary the order of non-dependent steps.
- Use this nonce strictly as a randomness anchor for this specific generation: {nonce}

---

### JSON OUTPUT SPECIFICATION (CRITICAL)

Your entire output must conform to this schema:

{
  "reasoningprocess": [
    {
      "steptext": "A single, clear step of reasoning...",
      "visualdependency": "A specific, observable fact taken from the image, or null."
    }
  ],
  "finalanswer": "The final answer."
}

Field-specific rules:

1. "reasoningprocess" (list of objects):
   - "steptext": each step should contain a single calculation, observation, or deduction.
   - "visualdependency" (string or null): include a description when the step directly reads a value, label, or relationship from the image. Use null ONLY for purely abstract steps. CRITICAL: use the JSON literal null, NEVER the empty string "".
2. "finalanswer" (string): for multiple choice, output the option letter only (for example "A"); for open-ended questions, output the numerical result only.

---

### USER QUERY

{user_query}
)";

struct TemplateInfo {
    const char* text;
    std::vector<std::string> placeholders;
};

const TemplateInfo& info(PromptTemplate t) {
    static const TemplateInfo stage1{kStage1, {"question_text"}};
    static const TemplateInfo stage2{kStage2, {"golden_standard_text", "checklist_to_review_text"}};
    static const TemplateInfo stage3{
        kStage3, {"question_text", "image_description_text", "history_steps_text", "current_step_text"}};
    static const TemplateInfo policy{kPolicy, {"variant_id", "nonce", "user_query"}};
    switch (t) {
        case PromptTemplate::Stage1Description: return stage1;
        case PromptTemplate::Stage2Audit: return stage2;
        case PromptTemplate::Stage3Judge: return stage3;
        case PromptTemplate::PolicyInference: return policy;
    }
    return stage1;
}

}  // namespace

std::string_view to_string(PromptTemplate t) {
    switch (t) {
        case PromptTemplate::Stage1Description: return "stage1_description";
        case PromptTemplate::Stage2Audit: return "stage2_audit";
        case PromptTemplate::Stage3Judge: return "stage3_judge";
        case PromptTemplate::PolicyInference: return "policy_inference";
    }
    return "?";
}

std::optional<PromptTemplate> prompt_template_from_string(std::string_view s) {
    if (s == "stage1_description") return PromptTemplate::Stage1Description;
    if (s == "stage2_audit") return PromptTemplate::Stage2Audit;
    if (s == "stage3_judge") return PromptTemplate::Stage3Judge;
    if (s == "policy_inference") return PromptTemplate::PolicyInference;
    return std::nullopt;
}

std::string_view prompt_template_text(PromptTemplate t) { return info(t).text; }

std::vector<std::string> prompt_placeholders(PromptTemplate t) { return info(t).placeholders; }

std::string render_prompt_template(PromptTemplate t,
                                   const std::map<std::string, std::string>& bindings) {
    const TemplateInfo& ti = info(t);
    for (const auto& [key, value] : bindings) {
        (void)value;
        bool known = false;
        for (const auto& p : ti.placeholders) known = known || p == key;
        if (!known)
            throw std::invalid_argument("render_prompt_template: unknown binding '" + key + "'");
    }

    std::string out = ti.text;
    for (const auto& name : ti.placeholders) {
        auto it = bindings.find(name);
        if (it == bindings.end())
            throw std::invalid_argument("render_prompt_template: unbound placeholder '" + name + "'");
        const std::string token = "{" + name + "}";
        std::size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), it->second);
            pos += it->second.size();
        }
    }
    return out;
}

}  // namespace evpv
