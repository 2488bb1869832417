#pragma once

#include <span>
#include <cstddef>
#include <vector>

#include "evpv/constraints.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Reference implementations of the verifier / extractor training objectives.
// These are scoring functions only; no optimisation loop lives here.
// ---------------------------------------------------------------------------

// Binary cross-entropy summed over the steps; probabilities are clamped to
// [1e-12, 1 - 1e-12] before the logs.  gold entries are 0/1.
double bce_loss(std::span<const int> gold, std::span<const double> probs);

// -log sigmoid(beta * (logp_preferred - logp_rejected))
double dpo_loss(double logp_preferred, double logp_rejected, double beta = 0.1);

// l_consistency + lambda * l_dpo
double combined_extractor_loss(double l_consistency, double l_dpo, double lambda = 0.1);

struct SchemaDistanceWeights {
    double recall = 1.0;     // gold facts recovered by the candidate
    double numeric = 1.0;    // numeric deviation over recovered pairs
    double relation = 1.0;   // relation-type precision
};

// Distance in [0, 1] between a candidate extraction and the gold facts.
// 0 iff the candidate recovers gold exactly (by these components); an empty
// candidate against non-empty gold is maximally wrong (exactly 1).
double schema_distance(const ConstraintSet& candidate, const ConstraintSet& gold,
                       double delta = 0.15, const SchemaDistanceWeights& w = {});

struct PreferencePair {
    std::size_t preferred = 0;  // candidate indices
    std::size_t rejected = 0;
    double preferred_distance = 0.0;
    double rejected_distance = 0.0;
    bool degenerate = false;  // all candidates equally distant
};

// Picks the closest and farthest candidates (ties to the lowest index).
// Throws std::invalid_argument with fewer than two candidates.
PreferencePair build_preference_pair(std::span<const ConstraintSet> candidates,
                                     const ConstraintSet& gold, double delta = 0.15);

}  // namespace evpv
