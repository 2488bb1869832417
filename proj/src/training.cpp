#include "evpv/training.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "evpv/tokens.hpp"

namespace evpv {

namespace {

// log(1 + e^x) without overflow; dpo_loss(a, b) = softplus(-beta * (a - b))
double softplus(double x) {
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

}  // namespace

double bce_loss(std::span<const int> gold, std::span<const double> probs) {
    if (gold.empty() || gold.size() != probs.size())
        throw std::invalid_argument("bce_loss: inputs empty or length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
        if (gold[i] != 0 && gold[i] != 1)
            throw std::invalid_argument("bce_loss: gold labels must be 0/1");
        const double p = std::clamp(probs[i], 1e-12, 1.0 - 1e-12);
        acc -= gold[i] == 1 ? std::log(p) : std::log(1.0 - p);
    }
    return acc;
}

double dpo_loss(double logp_preferred, double logp_rejected, double beta) {
    return softplus(-beta * (logp_preferred - logp_rejected));
}

double combined_extractor_loss(double l_consistency, double l_dpo, double lambda) {
    return l_consistency + lambda * l_dpo;
}

// ---------------------------------------------------------------------------
// schema distance
// ---------------------------------------------------------------------------

namespace {

std::string lower(const std::optional<std::string>& u) {
    if (!u) return "";
    std::string s = *u;
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool numeric_slot_match(const NumericFact& cand, const NumericFact& gold) {
    if (canonical_label(cand.attribute) != canonical_label(gold.attribute)) return false;
    if (jaccard(canonicalize_tokens(cand.entity), canonicalize_tokens(gold.entity)) < 0.5)
        return false;
    const std::string cu = lower(cand.unit), gu = lower(gold.unit);
    if (!cu.empty() && !gu.empty() && cu != gu) return false;
    return true;
}

double numeric_deviation(const NumericFact& cand, const NumericFact& gold) {
    return std::abs(cand.value - gold.value) / std::max(std::abs(gold.value), 1.0);
}

bool relation_recovered(const RelationFact& cand, const RelationFact& gold) {
    if (cand.type != gold.type) return false;
    return jaccard(token_union(cand.entities), token_union(gold.entities)) >= 0.5;
}

std::vector<std::string> labels(const std::vector<std::string>& parts) {
    std::vector<std::string> out;
    for (const auto& p : parts) out.push_back(canonical_label(p));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool structure_recovered(const StructureFact& cand, const StructureFact& gold) {
    if (cand.type != gold.type) return false;
    return jaccard(labels(cand.parts), labels(gold.parts)) >= 0.5;
}

}  // namespace

double schema_distance(const ConstraintSet& candidate, const ConstraintSet& gold, double delta,
                       const SchemaDistanceWeights& w) {
    if (gold.constraints.empty()) return candidate.constraints.empty() ? 0.0 : 1.0;
    if (candidate.constraints.empty()) return 1.0;  // nothing recovered at all

    // component 1: how much of gold was recovered (confidence plays no role)
    std::size_t recovered = 0;
    std::vector<double> matched_devs;  // numeric slot matches, any deviation
    for (const auto& g : gold.constraints) {
        bool hit = false;
        if (const auto* gn = g.numeric()) {
            std::optional<double> best_dev;
            for (const auto& c : candidate.constraints) {
                const auto* cn = c.numeric();
                if (!cn || !numeric_slot_match(*cn, *gn)) continue;
                const double dev = numeric_deviation(*cn, *gn);
                if (!best_dev || dev < *best_dev) best_dev = dev;
            }
            if (best_dev) {
                matched_devs.push_back(std::min(*best_dev, 1.0));
                hit = *best_dev < delta;
            }
        } else if (const auto* gr = g.relation()) {
            for (const auto& c : candidate.constraints)
                if (c.relation() && relation_recovered(*c.relation(), *gr)) {
                    hit = true;
                    break;
                }
        } else if (const auto* gs = g.structure()) {
            for (const auto& c : candidate.constraints)
                if (c.structure() && structure_recovered(*c.structure(), *gs)) {
                    hit = true;
                    break;
                }
        } else if (const auto* gc = g.caption()) {
            for (const auto& c : candidate.constraints)
                if (c.caption() && canonical_label(c.caption()->text) == canonical_label(gc->text)) {
                    hit = true;
                    break;
                }
        }
        if (hit) ++recovered;
    }
    const double recall_q = static_cast<double>(recovered) / static_cast<double>(gold.constraints.size());

    // component 2: value agreement over the slot-matched numeric pairs
    std::optional<double> numeric_q;
    if (!matched_devs.empty()) {
        double acc = 0.0;
        for (double d : matched_devs) acc += d;
        numeric_q = 1.0 - acc / static_cast<double>(matched_devs.size());
    }

    // component 3: do the candidate's relation types exist in gold at all
    std::optional<double> relation_q;
    {
        std::size_t n_rel = 0, ok = 0;
        for (const auto& c : candidate.constraints) {
            const auto* cr = c.relation();
            if (!cr) continue;
            ++n_rel;
            for (const auto& g : gold.constraints)
                if (g.relation() && g.relation()->type == cr->type) {
                    ++ok;
                    break;
                }
        }
        if (n_rel > 0) relation_q = static_cast<double>(ok) / static_cast<double>(n_rel);
    }

    double wsum = w.recall, qsum = w.recall * recall_q;
    if (numeric_q) {
        wsum += w.numeric;
        qsum += w.numeric * *numeric_q;
    }
    if (relation_q) {
        wsum += w.relation;
        qsum += w.relation * *relation_q;
    }
    return std::clamp(1.0 - qsum / wsum, 0.0, 1.0);
}

PreferencePair build_preference_pair(std::span<const ConstraintSet> candidates,
                                     const ConstraintSet& gold, double delta) {
    if (candidates.size() < 2)
        throw std::invalid_argument("build_preference_pair: need at least two candidates");
    std::vector<double> d(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i)
        d[i] = schema_distance(candidates[i], gold, delta);

    PreferencePair pair;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (d[i] < d[pair.preferred]) pair.preferred = i;
        if (d[i] > d[pair.rejected]) pair.rejected = i;
    }
    pair.preferred_distance = d[pair.preferred];
    pair.rejected_distance = d[pair.rejected];
    pair.degenerate = pair.preferred_distance == pair.rejected_distance;
    return pair;
}

}  // namespace evpv
