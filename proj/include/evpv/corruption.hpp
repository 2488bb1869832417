#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "evpv/constraints.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Seeded corruption of constraint sets.  Used to measure how much the
// downstream verifier actually depends on the evidence it is handed.
// ---------------------------------------------------------------------------

enum class CorruptionMode {
    FlipFields,   // flip ceil(ratio * F) of the F mutable fields
    ShuffleFacts, // permute labels across facts, breaking associations
    DropFacts,    // remove ceil(ratio * K) of the K facts
    CaptionOnly,  // replace everything with one free-text caption pseudo-fact
    EmptyFacts,   // remove everything
};

std::string_view to_string(CorruptionMode m);
std::optional<CorruptionMode> corruption_mode_from_string(std::string_view s);

struct CorruptionSpec {
    CorruptionMode mode = CorruptionMode::FlipFields;
    double ratio = 0.0;       // used by flip_fields and drop_facts
    std::uint64_t seed = 0;
};

// Number of fields flip_fields may touch: numeric {value, entity}, relation
// {type, each entity label}, structure {each part label}.  Confidences are
// never corrupted.
std::size_t mutable_field_count(const ConstraintSet& set);

// Same instance, source marked corrupted.  Identical (set, spec) inputs give
// byte-identical emitted output.
ConstraintSet corrupt_constraints(const ConstraintSet& set, const CorruptionSpec& spec);

}  // namespace evpv
