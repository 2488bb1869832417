#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace evpv {

// ---------------------------------------------------------------------------
// Trajectory scoring and best-of-N selection over calibrated step rewards.
// ---------------------------------------------------------------------------

enum class Aggregation {
    GeometricMean,       // exp(mean log g_t), g_t = 1.0 if R_t > 0 else 0.1
    CorrectnessRate,     // fraction of steps with R_t > 0
    StreakScore,         // run-length bonus, normalised by T(T+1)/2
    WeightedCorrectness, // position-weighted, magnitude-sensitive
    FirstErrorPosition,  // i*/T for the first step with R_t <= 0, else 1
};

std::string_view to_string(Aggregation a);
std::optional<Aggregation> aggregation_from_string(std::string_view s);
const std::vector<Aggregation>& all_aggregations();

// Scores one trajectory of step rewards in [-1, 1].  Empty input -> 0.
double score_trajectory(std::span<const double> rewards, Aggregation strategy);

struct ScoredTrace {
    std::size_t candidate = 0;       // position in the original candidate list
    std::vector<double> rewards;     // calibrated step rewards
    double score = 0.0;
    bool selected = false;
};

// Index of the winner among the first k traces: highest score, ties to the
// lowest index.  Throws std::invalid_argument unless 1 <= k <= traces.size().
std::size_t select_best_of_n(std::span<const ScoredTrace> traces, std::size_t k);

}  // namespace evpv
