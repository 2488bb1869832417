#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evpv {

// ---------------------------------------------------------------------------
// Static prompt templates used by the data-generation and judging stages.
// Placeholders are written {like_this}; rendering substitutes every
// occurrence and fails loudly on anything left unbound.
// ---------------------------------------------------------------------------

enum class PromptTemplate {
    Stage1Description,  // image -> structured description
    Stage2Audit,        // checklist audit against a trusted reference
    Stage3Judge,        // single-step correctness judgement
    PolicyInference,    // diversified step-wise solving
};

std::string_view to_string(PromptTemplate t);
std::optional<PromptTemplate> prompt_template_from_string(std::string_view s);

// The raw template text, with placeholders intact.
std::string_view prompt_template_text(PromptTemplate t);

// Placeholder names the template requires, in order of first appearance.
std::vector<std::string> prompt_placeholders(PromptTemplate t);

// Substitutes all placeholders.  Throws std::invalid_argument naming the
// placeholder if one is unbound, or naming the key if a binding is unknown.
std::string render_prompt_template(PromptTemplate t,
                                   const std::map<std::string, std::string>& bindings);

}  // namespace evpv
