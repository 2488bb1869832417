#include "evpv/reranker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evpv {

std::string_view to_string(Aggregation a) {
    switch (a) {
        case Aggregation::GeometricMean: return "geometric_mean";
        case Aggregation::CorrectnessRate: return "correctness_rate";
        case Aggregation::StreakScore: return "streak_score";
        case Aggregation::WeightedCorrectness: return "weighted_correctness";
        case Aggregation::FirstErrorPosition: return "first_error_position";
    }
    return "?";
}

const std::vector<Aggregation>& all_aggregations() {
    static const std::vector<Aggregation> v = {
        Aggregation::GeometricMean,       Aggregation::CorrectnessRate,
        Aggregation::StreakScore,         Aggregation::WeightedCorrectness,
        Aggregation::FirstErrorPosition,
    };
    return v;
}

std::optional<Aggregation> aggregation_from_string(std::string_view s) {
    for (Aggregation a : all_aggregations())
        if (to_string(a) == s) return a;
    return std::nullopt;
}

namespace {

double geometric_mean(std::span<const double> r) {
    double acc = 0.0;
    for (double x : r) acc += std::log(x > 0.0 ? 1.0 : 0.1);
    return std::exp(acc / static_cast<double>(r.size()));
}

double correctness_rate(std::span<const double> r) {
    std::size_t pos = 0;
    for (double x : r)
        if (x > 0.0) ++pos;
    return static_cast<double>(pos) / static_cast<double>(r.size());
}

double streak_score(std::span<const double> r) {
    // growing bonus for consecutive correct steps, flat penalty on a break
    double raw = 0.0;
    double streak = 0.0;
    for (double x : r) {
        if (x > 0.0) {
            streak += 1.0;
            raw += streak;
        } else {
            streak = 0.0;
            raw -= 1.0;
        }
    }
    const double T = static_cast<double>(r.size());
    const double denom = T * (T + 1.0) / 2.0;
    return std::min(std::max(raw, 0.0) / denom, 1.0);
}

double weighted_correctness(std::span<const double> r) {
    // later steps weigh more; the only strategy that uses reward magnitudes,
    // which is what lets the gate shift rankings
    const double T = static_cast<double>(r.size());
    const double W = T * (T + 1.0) / 2.0;
    double s = 0.0;
    for (std::size_t t = 0; t < r.size(); ++t) s += static_cast<double>(t + 1) * r[t];
    return (s + W) / (2.0 * W);
}

double first_error_position(std::span<const double> r) {
    for (std::size_t t = 0; t < r.size(); ++t)
        if (r[t] <= 0.0) return static_cast<double>(t + 1) / static_cast<double>(r.size());
    return 1.0;
}

}  // namespace

double score_trajectory(std::span<const double> rewards, Aggregation strategy) {
    if (rewards.empty()) return 0.0;
    switch (strategy) {
        case Aggregation::GeometricMean: return geometric_mean(rewards);
        case Aggregation::CorrectnessRate: return correctness_rate(rewards);
        case Aggregation::StreakScore: return streak_score(rewards);
        case Aggregation::WeightedCorrectness: return weighted_correctness(rewards);
        case Aggregation::FirstErrorPosition: return first_error_position(rewards);
    }
    return 0.0;
}

std::size_t select_best_of_n(std::span<const ScoredTrace> traces, std::size_t k) {
    if (k < 1 || k > traces.size())
        throw std::invalid_argument("k must be in [1, len(traces)]");
    std::size_t best = 0;
    for (std::size_t i = 1; i < k; ++i)
        if (traces[i].score > traces[best].score) best = i;
    return best;
}

}  // namespace evpv
