#include "evpv/claims.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <cstring>
#include <regex>
#include <set>

#include "evpv/tokens.hpp"

namespace evpv {

std::string_view to_string(ClaimType t) {
    switch (t) {
        case ClaimType::Numeric: return "numeric";
        case ClaimType::Relational: return "relational";
        case ClaimType::Structural: return "structural";
        case ClaimType::Unclassified: return "unclassified";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// synonym table
// ---------------------------------------------------------------------------

SynonymTable::SynonymTable() {
    struct Seed {
        const char* surface;
        RelationType type;
        bool symbol;
    };
    static const Seed seeds[] = {
        {"parallel", RelationType::Parallel, false},
        {"\xE2\x88\xA5", RelationType::Parallel, true},  // ∥
        {"perpendicular", RelationType::Perpendicular, false},
        {"orthogonal", RelationType::Perpendicular, false},
        {"\xE2\x8A\xA5", RelationType::Perpendicular, true},  // ⊥
        {"equal", RelationType::Equal, false},
        {"equals", RelationType::Equal, false},
        {"=", RelationType::Equal, true},
        {"same", RelationType::Equal, false},
        {"congruent", RelationType::Equal, false},
        {"subset", RelationType::Subset, false},
        {"inside", RelationType::Subset, false},
        {"contained", RelationType::Subset, false},
        {"incident", RelationType::Incident, false},
        {"on", RelationType::Incident, false},
        {"through", RelationType::Incident, false},
        {"adjacent", RelationType::Adjacent, false},
        {"next to", RelationType::Adjacent, false},
        {"greater", RelationType::Greater, false},
        {"larger", RelationType::Greater, false},
        {"more", RelationType::Greater, false},
        {">", RelationType::Greater, true},
        {"less", RelationType::Less, false},
        {"smaller", RelationType::Less, false},
        {"fewer", RelationType::Less, false},
        {"<", RelationType::Less, true},
    };
    for (const auto& s : seeds) entries_.push_back({s.surface, s.type, s.symbol});
}

const SynonymTable& SynonymTable::builtin() {
    static const SynonymTable t;
    return t;
}

void SynonymTable::add(std::string surface, RelationType type) {
    std::transform(surface.begin(), surface.end(), surface.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    bool symbol = !surface.empty() && !std::isalnum(static_cast<unsigned char>(surface[0])) &&
                  static_cast<unsigned char>(surface[0]) < 0x80;
    entries_.push_back({std::move(surface), type, symbol});
}

std::optional<RelationType> SynonymTable::lookup(std::string_view surface) const {
    std::string s(surface);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (const auto& e : entries_)
        if (e.surface == s) return e.type;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// classifier internals
// ---------------------------------------------------------------------------

namespace {

std::string lowercase(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    auto junk = [](unsigned char c) {
        return std::isspace(c) || c == ',' || c == '.' || c == ';' || c == ':';
    };
    while (b < e && junk(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && junk(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

bool boundary(const std::string& text, std::size_t pos) {
    if (pos == 0 || pos >= text.size()) return true;
    unsigned char c = static_cast<unsigned char>(text[pos]);
    return !(std::isalnum(c) || c >= 0x80);
}

const std::set<std::string>& unit_lexicon() {
    static const std::set<std::string> units = {
        "cm", "mm", "m",  "km",      "in",      "inch",    "inches", "ft",     "feet",
        "foot", "yd", "deg", "degree", "degrees", "\xC2\xB0", "rad",   "radian", "radians",
        "unit", "units", "percent", "%", "px", "pixel", "pixels", "cm2", "m2", "cm3",
        "m3", "kg", "g", "s", "sec", "seconds", "h", "hr", "hours", "min", "minutes",
        "l", "liter", "liters",
    };
    return units;
}

bool is_unit_word(std::string word) {
    while (!word.empty() && word.back() == '.') word.pop_back();
    return unit_lexicon().count(lowercase(word)) > 0;
}

// "65", "65 degrees", "-2", "4.2 cm" -- a bare number with at most one
// trailing unit word.  Such a phrase cannot stand as a relation operand.
bool pure_numeric(const std::string& operand) {
    static const std::regex re(R"(^\s*([-+]?[0-9]+(?:\.[0-9]+)?)\s*(\S+)?\s*$)");
    std::smatch m;
    std::string s = trim(operand);
    if (!std::regex_match(s, m, re)) return false;
    if (m[2].matched && !is_unit_word(m[2].str())) return false;
    return true;
}

std::string strip_trailing_copula(std::string operand) {
    static const char* copulas[] = {"is", "are", "was", "were", "be", "being"};
    std::string t = trim(operand);
    for (const char* c : copulas) {
        std::string suffix = std::string(" ") + c;
        std::string low = lowercase(t);
        if (low.size() > suffix.size() && low.compare(low.size() - suffix.size(), suffix.size(), suffix) == 0) {
            t = trim(t.substr(0, t.size() - suffix.size()));
            break;
        }
    }
    return t;
}

std::string strip_leading_filler(std::string operand) {
    static const char* fillers[] = {"than", "to", "with", "as"};
    std::string t = trim(operand);
    for (const char* f : fillers) {
        std::string prefix = std::string(f) + " ";
        std::string low = lowercase(t);
        if (low.size() > prefix.size() && low.compare(0, prefix.size(), prefix) == 0) {
            t = trim(t.substr(prefix.size()));
            break;
        }
    }
    return t;
}

std::vector<std::string> split_on_commas_and(const std::string& text) {
    std::vector<std::string> out;
    std::string lower = lowercase(text);
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = lower.find(',', pos);
        std::size_t conj = lower.find(" and ", pos);
        std::size_t cut = std::min(comma, conj);
        if (cut == std::string::npos) {
            out.push_back(text.substr(pos));
            break;
        }
        out.push_back(text.substr(pos, cut - pos));
        pos = cut + (cut == comma ? 1 : 5);
    }
    std::vector<std::string> trimmed;
    for (auto& p : out) {
        std::string t = trim(p);
        if (!t.empty()) trimmed.push_back(t);
    }
    return trimmed;
}

// --- rule 1: relational ----------------------------------------------------

// "on" is only relational when it is not part of the structural idiom
// "on top of".
bool is_on_top_of(const std::string& lower, std::size_t pos) {
    return lower.compare(pos, 9, "on top of") == 0;
}

bool try_relational(const std::string& raw, const SynonymTable& table, ChecklistClaim& out) {
    const std::string lower = lowercase(raw);

    // leftmost surface occurrence wins; ties broken by table order
    std::size_t best_pos = std::string::npos;
    const SynonymTable::Entry* best = nullptr;
    for (const auto& e : table.entries()) {
        std::size_t from = 0;
        while (true) {
            std::size_t p = lower.find(e.surface, from);
            if (p == std::string::npos) break;
            bool ok = e.symbol || (boundary(lower, p == 0 ? 0 : p - 1) && p + e.surface.size() <= lower.size() &&
                                   boundary(lower, p + e.surface.size()) &&
                                   (p == 0 || !std::isalnum(static_cast<unsigned char>(lower[p - 1]))));
            if (ok && e.surface == "on" && is_on_top_of(lower, p)) ok = false;
            if (ok) {
                if (p < best_pos) {
                    best_pos = p;
                    best = &e;
                }
                break;
            }
            from = p + 1;
        }
    }
    if (!best) return false;

    // operands: split on every occurrence for symbols (handles chained
    // equalities), single split for words
    std::vector<std::string> operands;
    if (best->symbol) {
        std::size_t pos = 0;
        while (true) {
            std::size_t p = lower.find(best->surface, pos);
            if (p == std::string::npos) {
                operands.push_back(raw.substr(pos));
                break;
            }
            operands.push_back(raw.substr(pos, p - pos));
            pos = p + best->surface.size();
        }
    } else {
        operands.push_back(raw.substr(0, best_pos));
        operands.push_back(raw.substr(best_pos + best->surface.size()));
    }

    std::vector<std::string> entities;
    for (std::size_t i = 0; i < operands.size(); ++i) {
        std::string op = trim(operands[i]);
        if (i == 0) op = strip_trailing_copula(op);
        if (i > 0) op = strip_leading_filler(op);
        if (!op.empty() && !canonicalize_tokens(op).empty()) entities.push_back(op);
    }

    // "AB and CD are parallel": keyword at the end, everything on the left
    if (entities.size() == 1) {
        auto parts = split_on_commas_and(entities[0]);
        if (parts.size() >= 2) entities = parts;
    }
    if (entities.size() < 2) return false;

    // a bare number as operand means this is a measurement, not a relation
    for (const auto& e : entities)
        if (pure_numeric(e)) return false;

    RelationalClaim claim;
    claim.type = best->type;
    claim.entities = std::move(entities);
    out.payload = std::move(claim);
    return true;
}

// --- rule 2: numeric ---------------------------------------------------------

std::string infer_attribute(const std::vector<std::string>& entity_tokens,
                            const std::optional<std::string>& unit) {
    static const std::set<std::string> angle_units = {"deg", "degree", "degrees", "\xC2\xB0",
                                                      "rad", "radian", "radians"};
    if (unit && angle_units.count(lowercase(*unit))) return "angle";
    auto has = [&](const char* t) {
        return std::find(entity_tokens.begin(), entity_tokens.end(), t) != entity_tokens.end();
    };
    if (has("angle")) return "angle";
    if (has("count") || has("number")) return "count";
    if (has("area")) return "area";
    return "length";
}

bool try_numeric(const std::string& raw, ChecklistClaim& out) {
    // value position: a trigger word/sign immediately followed by a literal
    static const std::regex re(
        R"((\bis\b|\bare\b|\bwas\b|\bequals\b|\bmeasures\b|\bat\b|=)\s*([-+]?[0-9]+(?:\.[0-9]+)?)\s*(\S*))",
        std::regex::icase);
    std::smatch m;
    if (!std::regex_search(raw, m, re)) return false;

    std::string entity = trim(raw.substr(0, static_cast<std::size_t>(m.position(0))));
    entity = strip_trailing_copula(entity);
    auto tokens = canonicalize_tokens(entity);
    if (tokens.empty()) return false;

    NumericClaim claim;
    claim.entity = entity;
    claim.value = std::strtod(m[2].str().c_str(), nullptr);
    if (m[3].matched && is_unit_word(m[3].str())) {
        std::string u = m[3].str();
        while (!u.empty() && u.back() == '.') u.pop_back();
        claim.unit = lowercase(u);
    }
    claim.attribute = infer_attribute(tokens, claim.unit);
    out.payload = std::move(claim);
    return true;
}

// --- rule 3: structural -------------------------------------------------------

bool try_structural(const std::string& raw, ChecklistClaim& out) {
    const std::string lower = lowercase(raw);

    static const char* vocab[] = {"part", "parts", "attached", "composed", "on top of", "connected"};
    bool hit = false;
    for (const char* v : vocab) {
        std::size_t p = lower.find(v);
        while (p != std::string::npos) {
            if (boundary(lower, p == 0 ? 0 : p - 1) && boundary(lower, p + std::strlen(v)) &&
                (p == 0 || !std::isalnum(static_cast<unsigned char>(lower[p - 1])))) {
                hit = true;
                break;
            }
            p = lower.find(v, p + 1);
        }
        if (hit) break;
    }
    if (!hit) return false;

    // split at the connective; the right side lists components
    static const char* connectives[] = {
        "is composed of", "composed of", "is attached by", "is attached to", "attached by",
        "attached to",    "on top of",   "is connected to", "connected to",  "part of",
    };
    std::size_t cut = std::string::npos;
    std::size_t cut_len = 0;
    for (const char* c : connectives) {
        std::size_t p = lower.find(c);
        if (p != std::string::npos && p < cut) {
            cut = p;
            cut_len = std::strlen(c);
        }
    }
    if (cut == std::string::npos) return false;

    std::vector<std::string> parts;
    std::string left = trim(raw.substr(0, cut));
    left = strip_trailing_copula(left);
    if (!left.empty() && !canonicalize_tokens(left).empty()) parts.push_back(canonical_label(left));
    for (const auto& piece : split_on_commas_and(raw.substr(cut + cut_len))) {
        std::string c = canonical_label(piece);
        if (!c.empty()) parts.push_back(c);
    }
    if (parts.empty()) return false;

    StructuralClaim claim;
    claim.parts = std::move(parts);
    out.payload = std::move(claim);
    return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// public API
// ---------------------------------------------------------------------------

ChecklistClaim classify_claim(std::string_view declaration, const SynonymTable& synonyms) {
    ChecklistClaim claim;
    claim.raw = std::string(declaration);
    const std::string raw = claim.raw;
    if (try_relational(raw, synonyms, claim)) return claim;
    if (try_numeric(raw, claim)) return claim;
    if (try_structural(raw, claim)) return claim;
    claim.payload = std::monostate{};
    return claim;
}

std::vector<ChecklistClaim> extract_checklist(const std::vector<StepRecord>& steps,
                                              const SynonymTable& synonyms) {
    std::vector<ChecklistClaim> out;
    for (const auto& s : steps) {
        if (!s.has_declaration()) continue;
        ChecklistClaim c = classify_claim(*s.declaration, synonyms);
        c.origin_step = s.index;
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace evpv
