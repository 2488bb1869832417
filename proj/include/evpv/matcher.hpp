#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "evpv/claims.hpp"
#include "evpv/constraints.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Deterministic matching of checklist claims against a constraint set.
// Every claim receives a support value in [0, 1] plus an explanation of how
// it was produced.
// ---------------------------------------------------------------------------

inline constexpr double kDefaultDelta = 0.15;  // relative numeric tolerance

enum class MatchRationale {
    NumericHit,            // candidate found, deviation under tolerance
    NumericMiss,           // candidate found, deviation at/over tolerance
    RelationOverlap,       // scored by entity-token overlap
    StructuralOverlap,     // scored by part-label overlap
    FallbackUnclassified,  // untypable claim, neutral 0.5
    NoCandidate,           // nothing to compare against
};

std::string_view to_string(MatchRationale r);

struct MatchResult {
    std::size_t claim_index = 0;
    double support = 0.0;
    std::optional<std::size_t> matched_constraint;  // index into the set, when one contributed
    MatchRationale rationale = MatchRationale::NoCandidate;
};

// Per-claim matching.  Typed claims with no candidate (including an empty
// set) get support 0; unclassified claims always get the neutral 0.5.
MatchResult match_claim(const ChecklistClaim& claim, const ConstraintSet& set,
                        double delta = kDefaultDelta);

MatchResult match_numeric(const NumericClaim& claim, const ConstraintSet& set,
                          double delta = kDefaultDelta);
MatchResult match_relation(const RelationalClaim& claim, const ConstraintSet& set);
MatchResult match_structural(const StructuralClaim& claim, const ConstraintSet& set);

// match_claim over a whole checklist; claim_index is filled with the claim's
// position.
std::vector<MatchResult> match_checklist(const std::vector<ChecklistClaim>& claims,
                                         const ConstraintSet& set, double delta = kDefaultDelta);

}  // namespace evpv
