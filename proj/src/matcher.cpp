#include "evpv/matcher.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "evpv/tokens.hpp"

namespace evpv {

std::string_view to_string(MatchRationale r) {
    switch (r) {
        case MatchRationale::NumericHit: return "numeric_hit";
        case MatchRationale::NumericMiss: return "numeric_miss";
        case MatchRationale::RelationOverlap: return "relation_overlap";
        case MatchRationale::StructuralOverlap: return "structural_overlap";
        case MatchRationale::FallbackUnclassified: return "fallback_unclassified";
        case MatchRationale::NoCandidate: return "no_candidate";
    }
    return "?";
}

namespace {

std::string lower_unit(const std::optional<std::string>& u) {
    if (!u) return "";
    std::string s = *u;
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> part_labels(const std::vector<std::string>& parts) {
    std::vector<std::string> out;
    out.reserve(parts.size());
    for (const auto& p : parts) out.push_back(canonical_label(p));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace

MatchResult match_numeric(const NumericClaim& claim, const ConstraintSet& set, double delta) {
    const auto claim_tokens = canonicalize_tokens(claim.entity);
    const std::string claim_attr = canonical_label(claim.attribute);
    const std::string claim_unit = lower_unit(claim.unit);

    // candidate filter: same attribute, entity overlap >= 0.5, units must
    // agree when both sides carry one
    std::optional<std::size_t> best;
    double best_conf = -1.0;
    double best_dev = 0.0;
    for (std::size_t i = 0; i < set.constraints.size(); ++i) {
        const auto* n = set.constraints[i].numeric();
        if (!n) continue;
        if (canonical_label(n->attribute) != claim_attr) continue;
        if (jaccard(claim_tokens, canonicalize_tokens(n->entity)) < 0.5) continue;
        const std::string cunit = lower_unit(n->unit);
        if (!claim_unit.empty() && !cunit.empty() && claim_unit != cunit) continue;

        const double dev = std::abs(claim.value - n->value) / std::max(std::abs(claim.value), 1.0);
        const double conf = set.constraints[i].confidence;
        if (!best || conf > best_conf || (conf == best_conf && dev < best_dev)) {
            best = i;
            best_conf = conf;
            best_dev = dev;
        }
    }

    MatchResult r;
    if (!best) {
        r.rationale = MatchRationale::NoCandidate;
        return r;
    }
    r.matched_constraint = best;
    if (best_dev < delta) {
        r.support = best_conf;
        r.rationale = MatchRationale::NumericHit;
    } else {
        r.support = 0.0;
        r.rationale = MatchRationale::NumericMiss;
    }
    return r;
}

MatchResult match_relation(const RelationalClaim& claim, const ConstraintSet& set) {
    const auto claim_tokens = token_union(claim.entities);

    MatchResult r;
    bool any = false;
    for (std::size_t i = 0; i < set.constraints.size(); ++i) {
        const auto* rel = set.constraints[i].relation();
        if (!rel || rel->type != claim.type) continue;
        any = true;
        const double s = jaccard(claim_tokens, token_union(rel->entities)) * set.constraints[i].confidence;
        if (s > r.support) {
            r.support = s;
            r.matched_constraint = i;
        }
    }
    r.rationale = any ? MatchRationale::RelationOverlap : MatchRationale::NoCandidate;
    if (r.support == 0.0) r.matched_constraint.reset();
    return r;
}

MatchResult match_structural(const StructuralClaim& claim, const ConstraintSet& set) {
    const auto claim_parts = part_labels(claim.parts);

    MatchResult r;
    bool any = false;
    for (std::size_t i = 0; i < set.constraints.size(); ++i) {
        const auto* st = set.constraints[i].structure();
        if (!st) continue;
        any = true;
        const double s = jaccard(claim_parts, part_labels(st->parts)) * set.constraints[i].confidence;
        if (s > r.support) {
            r.support = s;
            r.matched_constraint = i;
        }
    }
    r.rationale = any ? MatchRationale::StructuralOverlap : MatchRationale::NoCandidate;
    if (r.support == 0.0) r.matched_constraint.reset();
    return r;
}

MatchResult match_claim(const ChecklistClaim& claim, const ConstraintSet& set, double delta) {
    MatchResult r;
    switch (claim.type()) {
        case ClaimType::Numeric:
            r = match_numeric(*claim.numeric(), set, delta);
            break;
        case ClaimType::Relational:
            r = match_relation(*claim.relational(), set);
            break;
        case ClaimType::Structural:
            r = match_structural(*claim.structural(), set);
            break;
        case ClaimType::Unclassified:
            // neutral: an untypable declaration is neither confirmed nor refuted
            r.support = 0.5;
            r.rationale = set.constraints.empty() ? MatchRationale::NoCandidate
                                                  : MatchRationale::FallbackUnclassified;
            break;
    }
    return r;
}

std::vector<MatchResult> match_checklist(const std::vector<ChecklistClaim>& claims,
                                         const ConstraintSet& set, double delta) {
    std::vector<MatchResult> out;
    out.reserve(claims.size());
    for (std::size_t i = 0; i < claims.size(); ++i) {
        MatchResult r = match_claim(claims[i], set, delta);
        r.claim_index = i;
        out.push_back(r);
    }
    return out;
}

}  // namespace evpv
