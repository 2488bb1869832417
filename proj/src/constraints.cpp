#include "evpv/constraints.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

namespace evpv {

using ordered_json = nlohmann::ordered_json;

Category Constraint::category() const {
    switch (fact.index()) {
        case 0: return Category::Numeric;
        case 1: return Category::Relation;
        case 2: return Category::Structure;
        default: return Category::Caption;
    }
}

bool ConstraintSet::degenerate() const {
    for (const auto& c : constraints)
        if (c.category() == Category::Caption) return true;
    return false;
}

// ---------------------------------------------------------------------------
// enum <-> string
// ---------------------------------------------------------------------------

std::string_view to_string(Category c) {
    switch (c) {
        case Category::Numeric: return "numeric";
        case Category::Relation: return "relation";
        case Category::Structure: return "structure";
        case Category::Caption: return "caption";
    }
    return "?";
}

std::string_view to_string(RelationType t) {
    switch (t) {
        case RelationType::Parallel: return "parallel";
        case RelationType::Perpendicular: return "perpendicular";
        case RelationType::Equal: return "equal";
        case RelationType::Subset: return "subset";
        case RelationType::Incident: return "incident";
        case RelationType::Adjacent: return "adjacent";
        case RelationType::Greater: return "greater";
        case RelationType::Less: return "less";
    }
    return "?";
}

std::string_view to_string(StructureType t) {
    switch (t) {
        case StructureType::Composite: return "composite";
        case StructureType::Graph: return "graph";
        case StructureType::Table: return "table";
        case StructureType::Sequence: return "sequence";
    }
    return "?";
}

std::string_view to_string(Source s) {
    switch (s) {
        case Source::Predicted: return "predicted";
        case Source::Gold: return "gold";
        case Source::Corrupted: return "corrupted";
    }
    return "?";
}

const std::vector<RelationType>& all_relation_types() {
    static const std::vector<RelationType> v = {
        RelationType::Parallel, RelationType::Perpendicular, RelationType::Equal,
        RelationType::Subset,   RelationType::Incident,      RelationType::Adjacent,
        RelationType::Greater,  RelationType::Less,
    };
    return v;
}

const std::vector<StructureType>& all_structure_types() {
    static const std::vector<StructureType> v = {
        StructureType::Composite, StructureType::Graph,
        StructureType::Table,     StructureType::Sequence,
    };
    return v;
}

std::optional<RelationType> relation_type_from_string(std::string_view s) {
    for (RelationType t : all_relation_types())
        if (to_string(t) == s) return t;
    return std::nullopt;
}

std::optional<StructureType> structure_type_from_string(std::string_view s) {
    for (StructureType t : all_structure_types())
        if (to_string(t) == s) return t;
    return std::nullopt;
}

std::optional<Source> source_from_string(std::string_view s) {
    if (s == "predicted") return Source::Predicted;
    if (s == "gold") return Source::Gold;
    if (s == "corrupted") return Source::Corrupted;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

// null, "" and [] count as absent wherever a field is optional.
bool is_absent(const ordered_json& j) {
    return j.is_null() || (j.is_string() && j.get_ref<const std::string&>().empty()) ||
           (j.is_array() && j.empty());
}

std::string require_string(const ordered_json& obj, const char* key, std::size_t idx) {
    if (!obj.contains(key) || !obj[key].is_string() || obj[key].get_ref<const std::string&>().empty())
        throw SchemaError(idx, std::string("missing or empty string field '") + key + "'");
    return obj[key].get<std::string>();
}

double require_number(const ordered_json& obj, const char* key, std::size_t idx) {
    if (!obj.contains(key) || !obj[key].is_number())
        throw SchemaError(idx, std::string("missing numeric field '") + key + "'");
    double v = obj[key].get<double>();
    if (!std::isfinite(v)) throw SchemaError(idx, std::string("non-finite value in '") + key + "'");
    return v;
}

std::optional<std::string> optional_string(const ordered_json& obj, const char* key, std::size_t idx) {
    if (!obj.contains(key) || is_absent(obj[key])) return std::nullopt;
    if (!obj[key].is_string()) throw SchemaError(idx, std::string("field '") + key + "' must be a string");
    return obj[key].get<std::string>();
}

std::vector<std::string> string_array(const ordered_json& obj, const char* key, std::size_t idx,
                                      std::size_t min_len) {
    if (!obj.contains(key) || !obj[key].is_array())
        throw SchemaError(idx, std::string("missing array field '") + key + "'");
    std::vector<std::string> out;
    for (const auto& e : obj[key]) {
        if (!e.is_string() || e.get_ref<const std::string&>().empty())
            throw SchemaError(idx, std::string("'") + key + "' entries must be non-empty strings");
        out.push_back(e.get<std::string>());
    }
    if (out.size() < min_len)
        throw SchemaError(idx, std::string("'") + key + "' needs at least " + std::to_string(min_len) +
                                   " entries");
    return out;
}

std::vector<std::string> optional_string_array(const ordered_json& obj, const char* key,
                                               std::size_t idx) {
    if (!obj.contains(key) || is_absent(obj[key])) return {};
    return string_array(obj, key, idx, 0);
}

double parse_confidence(const ordered_json& obj, std::size_t idx) {
    double c = require_number(obj, "confidence", idx);
    if (c < 0.0 || c > 1.0)
        throw SchemaError(idx, "confidence " + std::to_string(c) + " outside [0, 1]");
    return c;
}

Constraint parse_element(const ordered_json& obj, std::size_t idx) {
    if (!obj.is_object()) throw SchemaError(idx, "element is not an object");
    const std::string cat = require_string(obj, "category", idx);
    Constraint out;
    if (cat == "numeric") {
        NumericFact f;
        f.entity = require_string(obj, "entity", idx);
        f.attribute = require_string(obj, "attribute", idx);
        f.value = require_number(obj, "value", idx);
        f.unit = optional_string(obj, "unit", idx);
        out.fact = std::move(f);
    } else if (cat == "relation") {
        RelationFact f;
        const std::string ty = require_string(obj, "type", idx);
        auto t = relation_type_from_string(ty);
        if (!t) throw SchemaError(idx, "unknown relation type '" + ty + "'");
        f.type = *t;
        f.entities = string_array(obj, "entities", idx, 2);
        f.direction = optional_string(obj, "direction", idx);
        out.fact = std::move(f);
    } else if (cat == "structure") {
        StructureFact f;
        const std::string ty = require_string(obj, "type", idx);
        auto t = structure_type_from_string(ty);
        if (!t) throw SchemaError(idx, "unknown structure type '" + ty + "'");
        f.type = *t;
        f.parts = string_array(obj, "parts", idx, 1);
        f.attachment = optional_string_array(obj, "attachment", idx);
        f.adjacency = optional_string_array(obj, "adjacency", idx);
        out.fact = std::move(f);
    } else if (cat == "caption") {
        CaptionFact f;
        f.text = require_string(obj, "text", idx);
        out.fact = std::move(f);
    } else {
        throw SchemaError(idx, "unknown category '" + cat + "'");
    }
    out.confidence = parse_confidence(obj, idx);
    return out;
}

}  // namespace

ConstraintSet parse_constraints(std::string_view json_text, std::string instance_id, Source source,
                                ParseMode mode, ParseReport* report) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw SyntaxError(std::string("malformed JSON: ") + e.what());
    }
    if (!doc.is_array()) throw SyntaxError("constraint document must be a JSON array");

    ConstraintSet set;
    set.instance_id = std::move(instance_id);
    set.source = source;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        try {
            set.constraints.push_back(parse_element(doc[i], i));
        } catch (const SchemaError& e) {
            if (mode == ParseMode::Strict) throw;
            if (report) report->dropped.push_back({e.element_index, e.what()});
        }
    }
    return set;
}

std::string emit_constraints(const ConstraintSet& set, int indent) {
    ordered_json arr = ordered_json::array();
    for (const auto& c : set.constraints) {
        ordered_json o;
        o["category"] = std::string(to_string(c.category()));
        if (const auto* n = c.numeric()) {
            o["entity"] = n->entity;
            o["attribute"] = n->attribute;
            o["value"] = n->value;
            if (n->unit) o["unit"] = *n->unit;
        } else if (const auto* r = c.relation()) {
            o["type"] = std::string(to_string(r->type));
            o["entities"] = r->entities;
            if (r->direction) o["direction"] = *r->direction;
        } else if (const auto* s = c.structure()) {
            o["type"] = std::string(to_string(s->type));
            o["parts"] = s->parts;
            if (!s->attachment.empty()) o["attachment"] = s->attachment;
            if (!s->adjacency.empty()) o["adjacency"] = s->adjacency;
        } else if (const auto* t = c.caption()) {
            o["text"] = t->text;
        }
        o["confidence"] = c.confidence;
        arr.push_back(std::move(o));
    }
    return arr.dump(indent);
}

}  // namespace evpv
