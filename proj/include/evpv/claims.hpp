#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "evpv/constraints.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Step-wise checklist extraction.  Each reasoning step may carry one explicit
// visual declaration; declarations are classified into typed claims by a
// fixed rule cascade (relational -> numeric -> structural -> unclassified).
// ---------------------------------------------------------------------------

enum class ClaimType { Numeric, Relational, Structural, Unclassified };

std::string_view to_string(ClaimType t);

struct NumericClaim {
    std::string entity;
    std::string attribute;  // inferred: unit/entity cues, default "length"
    double value = 0.0;
    std::optional<std::string> unit;
};

struct RelationalClaim {
    RelationType type = RelationType::Equal;
    std::vector<std::string> entities;  // >= 2 operand labels
};

struct StructuralClaim {
    std::vector<std::string> parts;  // canonical part labels, >= 1
};

struct ChecklistClaim {
    int origin_step = 0;  // 1-based step index the declaration came from
    std::string raw;      // the declaration text as written
    std::variant<std::monostate, NumericClaim, RelationalClaim, StructuralClaim> payload;

    ClaimType type() const {
        switch (payload.index()) {
            case 1: return ClaimType::Numeric;
            case 2: return ClaimType::Relational;
            case 3: return ClaimType::Structural;
            default: return ClaimType::Unclassified;
        }
    }
    const NumericClaim* numeric() const { return std::get_if<NumericClaim>(&payload); }
    const RelationalClaim* relational() const { return std::get_if<RelationalClaim>(&payload); }
    const StructuralClaim* structural() const { return std::get_if<StructuralClaim>(&payload); }
};

struct StepRecord {
    int index = 0;  // 1-based
    std::string text;
    std::optional<std::string> declaration;  // absent or empty => non-visual step

    bool has_declaration() const { return declaration && !declaration->empty(); }
};

// Maps surface forms ("orthogonal", "⊥", "same", ...) to canonical relation
// types.  The builtin table covers the eight canonical relations; extra
// synonyms can be registered at runtime.
class SynonymTable {
public:
    static const SynonymTable& builtin();
    SynonymTable();  // starts from the builtin entries

    void add(std::string surface, RelationType type);
    std::optional<RelationType> lookup(std::string_view surface) const;

    struct Entry {
        std::string surface;  // lowercase word, phrase, or symbol
        RelationType type;
        bool symbol;  // symbols match as substrings, words at token boundaries
    };
    const std::vector<Entry>& entries() const { return entries_; }

private:
    std::vector<Entry> entries_;
};

// Classifies one declaration.  Never throws on ordinary text; anything the
// rules cannot type becomes an Unclassified claim.
ChecklistClaim classify_claim(std::string_view declaration,
                              const SynonymTable& synonyms = SynonymTable::builtin());

// One claim per declaring step, in step order.
std::vector<ChecklistClaim> extract_checklist(const std::vector<StepRecord>& steps,
                                              const SynonymTable& synonyms = SynonymTable::builtin());

}  // namespace evpv
