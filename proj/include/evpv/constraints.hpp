#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evpv {

// ---------------------------------------------------------------------------
// Structured visual facts ("constraints").  Three first-class kinds plus a
// degenerate caption pseudo-fact used by the caption-only ablation.
// ---------------------------------------------------------------------------

enum class Category { Numeric, Relation, Structure, Caption };

enum class RelationType {
    Parallel,
    Perpendicular,
    Equal,
    Subset,
    Incident,
    Adjacent,
    Greater,
    Less,
};

enum class StructureType { Composite, Graph, Table, Sequence };

enum class Source { Predicted, Gold, Corrupted };

struct NumericFact {
    std::string entity;                 // free-text label, e.g. "cylinder base radius"
    std::string attribute;              // open vocabulary; "length", "angle", "count", "area", ...
    double value = 0.0;
    std::optional<std::string> unit;    // absent and "" are equivalent; we normalise to absent
};

struct RelationFact {
    RelationType type = RelationType::Equal;
    std::vector<std::string> entities;  // >= 2
    std::optional<std::string> direction;
};

struct StructureFact {
    StructureType type = StructureType::Composite;
    std::vector<std::string> parts;     // >= 1
    std::vector<std::string> attachment;  // optional; empty == absent
    std::vector<std::string> adjacency;   // optional; empty == absent
};

// Free-text stand-in emitted by the caption-only ablation.  Never matchable.
struct CaptionFact {
    std::string text;
};

struct Constraint {
    std::variant<NumericFact, RelationFact, StructureFact, CaptionFact> fact;
    double confidence = 1.0;  // in [0, 1]

    Category category() const;
    const NumericFact* numeric() const { return std::get_if<NumericFact>(&fact); }
    const RelationFact* relation() const { return std::get_if<RelationFact>(&fact); }
    const StructureFact* structure() const { return std::get_if<StructureFact>(&fact); }
    const CaptionFact* caption() const { return std::get_if<CaptionFact>(&fact); }
};

struct ConstraintSet {
    std::string instance_id;
    Source source = Source::Predicted;
    std::vector<Constraint> constraints;

    // True when the set contains caption pseudo-facts and therefore cannot
    // support typed matching.
    bool degenerate() const;
};

// ---------------------------------------------------------------------------
// Parsing / emission
// ---------------------------------------------------------------------------

// Malformed document (not a JSON array, unreadable JSON, ...).
struct SyntaxError : std::runtime_error {
    explicit SyntaxError(const std::string& msg) : std::runtime_error(msg) {}
};

// Element violates the schema (unknown category, missing field, value out of
// range, wrong type).  Carries the index of the offending array element.
struct SchemaError : std::runtime_error {
    SchemaError(std::size_t element, const std::string& msg)
        : std::runtime_error("element " + std::to_string(element) + ": " + msg),
          element_index(element) {}
    std::size_t element_index;
};

enum class ParseMode {
    Strict,   // first invalid element throws SchemaError
    Lenient,  // invalid elements are dropped and reported
};

struct ParseIssue {
    std::size_t element_index;
    std::string message;
};

struct ParseReport {
    std::vector<ParseIssue> dropped;
};

// Parses a JSON array of fact objects.  `report`, when given, receives the
// elements dropped in lenient mode (strict mode never drops anything: the
// whole document parses or an exception is raised).
ConstraintSet parse_constraints(std::string_view json_text,
                                std::string instance_id = "",
                                Source source = Source::Predicted,
                                ParseMode mode = ParseMode::Strict,
                                ParseReport* report = nullptr);

// Serialises back to the same JSON shape.  Absent optional fields are omitted
// entirely.  parse(emit(s)) reproduces s exactly.
std::string emit_constraints(const ConstraintSet& set, int indent = 2);

// Enum <-> string helpers (used by serialisation, the CLI and corruption).
std::string_view to_string(Category c);
std::string_view to_string(RelationType t);
std::string_view to_string(StructureType t);
std::string_view to_string(Source s);
std::optional<RelationType> relation_type_from_string(std::string_view s);
std::optional<StructureType> structure_type_from_string(std::string_view s);
std::optional<Source> source_from_string(std::string_view s);

// All members of the closed enums, in declaration order.
const std::vector<RelationType>& all_relation_types();
const std::vector<StructureType>& all_structure_types();

}  // namespace evpv
