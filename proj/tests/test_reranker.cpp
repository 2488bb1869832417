#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "evpv/reranker.hpp"
#include "evpv/rng.hpp"

using namespace evpv;

namespace {

std::vector<ScoredTrace> make_traces(const std::vector<double>& scores) {
    std::vector<ScoredTrace> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i].candidate = i;
        out[i].score = scores[i];
    }
    return out;
}

}  // namespace

TEST_CASE("geometric mean of step outcomes") {
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, 1.0}, Aggregation::GeometricMean) == 1.0);
    // one bad step out of three: cbrt(1 * 1 * 0.1)
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, -1.0}, Aggregation::GeometricMean) ==
          doctest::Approx(std::cbrt(0.1)).epsilon(1e-12));
    CHECK(score_trajectory(std::vector<double>{-1.0, -1.0}, Aggregation::GeometricMean) ==
          doctest::Approx(0.1).epsilon(1e-12));
    // zero reward counts as not-positive
    CHECK(score_trajectory(std::vector<double>{0.0}, Aggregation::GeometricMean) ==
          doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("correctness rate") {
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, -1.0}, Aggregation::CorrectnessRate) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(score_trajectory(std::vector<double>{-1.0}, Aggregation::CorrectnessRate) == 0.0);
    CHECK(score_trajectory(std::vector<double>{0.5, 0.5}, Aggregation::CorrectnessRate) == 1.0);
    CHECK(score_trajectory(std::vector<double>{0.0, 1.0}, Aggregation::CorrectnessRate) == 0.5);
}

TEST_CASE("streak score rewards uninterrupted runs") {
    // 1 + 2 + 3 over a denominator of 6
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, 1.0}, Aggregation::StreakScore) == 1.0);
    // broken run: 1, reset (-1), 1 -> raw 1 over 6
    CHECK(score_trajectory(std::vector<double>{1.0, -1.0, 1.0}, Aggregation::StreakScore) ==
          doctest::Approx(1.0 / 6.0));
    // the same multiset in another order scores differently: 1 + 2 - 1 = 2
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, -1.0}, Aggregation::StreakScore) ==
          doctest::Approx(2.0 / 6.0));
    // negative raw clamps to zero
    CHECK(score_trajectory(std::vector<double>{-1.0, -1.0}, Aggregation::StreakScore) == 0.0);
}

TEST_CASE("weighted correctness uses positions and magnitudes") {
    // W = 3; (1*1 + 2*(-1) + 3) / 6
    CHECK(score_trajectory(std::vector<double>{1.0, -1.0}, Aggregation::WeightedCorrectness) ==
          doctest::Approx(1.0 / 3.0));
    CHECK(score_trajectory(std::vector<double>{-1.0, 1.0}, Aggregation::WeightedCorrectness) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0}, Aggregation::WeightedCorrectness) == 1.0);
    CHECK(score_trajectory(std::vector<double>{-1.0, -1.0}, Aggregation::WeightedCorrectness) ==
          0.0);
    // magnitude sensitivity: attenuating a reward moves the score
    const double full =
        score_trajectory(std::vector<double>{1.0, -1.0}, Aggregation::WeightedCorrectness);
    const double damped =
        score_trajectory(std::vector<double>{1.0, -0.1}, Aggregation::WeightedCorrectness);
    CHECK(damped > full);
}

TEST_CASE("first error position") {
    CHECK(score_trajectory(std::vector<double>{1.0, -1.0, 1.0},
                           Aggregation::FirstErrorPosition) == doctest::Approx(2.0 / 3.0));
    CHECK(score_trajectory(std::vector<double>{-1.0, 1.0}, Aggregation::FirstErrorPosition) == 0.5);
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, 1.0}, Aggregation::FirstErrorPosition) ==
          1.0);
    // an error on the very last step is indistinguishable from a clean run
    CHECK(score_trajectory(std::vector<double>{1.0, -1.0}, Aggregation::FirstErrorPosition) == 1.0);
    // zero counts as an error
    CHECK(score_trajectory(std::vector<double>{0.0, 1.0}, Aggregation::FirstErrorPosition) == 0.5);
}

TEST_CASE("an empty trajectory scores zero under every strategy") {
    for (Aggregation a : all_aggregations())
        CHECK(score_trajectory(std::vector<double>{}, a) == 0.0);
}

TEST_CASE("scores stay inside [0, 1] for rewards in [-1, 1]") {
    Rng rng(21);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t t = 1 + rng.bounded(12);
        std::vector<double> rewards(t);
        for (auto& r : rewards) r = 2.0 * rng.unit() - 1.0;
        for (Aggregation a : all_aggregations()) {
            const double s = score_trajectory(rewards, a);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
        }
    }
}

TEST_CASE("pointwise-greater rewards never score lower") {
    Rng rng(22);
    for (int iter = 0; iter < 300; ++iter) {
        const std::size_t t = 1 + rng.bounded(8);
        std::vector<double> low(t), high(t);
        for (std::size_t i = 0; i < t; ++i) {
            low[i] = 2.0 * rng.unit() - 1.0;
            high[i] = low[i] + (1.0 - low[i]) * rng.unit();
        }
        for (Aggregation a : all_aggregations())
            CHECK(score_trajectory(high, a) >= score_trajectory(low, a) - 1e-12);
    }
}

TEST_CASE("order sensitivity differs by strategy") {
    Rng rng(23);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t t = 2 + rng.bounded(6);
        std::vector<double> rewards(t);
        for (auto& r : rewards) r = 2.0 * rng.unit() - 1.0;
        std::vector<double> shuffled = rewards;
        // deterministic shuffle
        for (std::size_t i = shuffled.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.bounded(i)]);

        // these two only look at the multiset of signs
        CHECK(score_trajectory(rewards, Aggregation::GeometricMean) ==
              doctest::Approx(score_trajectory(shuffled, Aggregation::GeometricMean))
                  .epsilon(1e-12));
        CHECK(score_trajectory(rewards, Aggregation::CorrectnessRate) ==
              score_trajectory(shuffled, Aggregation::CorrectnessRate));
    }

    // the other three genuinely depend on order (witness pairs)
    CHECK(score_trajectory(std::vector<double>{1.0, -1.0}, Aggregation::WeightedCorrectness) !=
          score_trajectory(std::vector<double>{-1.0, 1.0}, Aggregation::WeightedCorrectness));
    CHECK(score_trajectory(std::vector<double>{-1.0, 1.0}, Aggregation::FirstErrorPosition) !=
          score_trajectory(std::vector<double>{1.0, -1.0}, Aggregation::FirstErrorPosition));
    CHECK(score_trajectory(std::vector<double>{1.0, 1.0, -1.0}, Aggregation::StreakScore) !=
          score_trajectory(std::vector<double>{1.0, -1.0, 1.0}, Aggregation::StreakScore));
}

TEST_CASE("only weighted correctness reacts to attenuation without a sign flip") {
    const std::vector<double> raw = {0.8, -0.6, 0.9};
    std::vector<double> attenuated = raw;
    for (auto& r : attenuated) r *= 0.25;

    for (Aggregation a : {Aggregation::GeometricMean, Aggregation::CorrectnessRate,
                          Aggregation::StreakScore, Aggregation::FirstErrorPosition})
        CHECK(score_trajectory(raw, a) == score_trajectory(attenuated, a));

    CHECK(score_trajectory(raw, Aggregation::WeightedCorrectness) !=
          score_trajectory(attenuated, Aggregation::WeightedCorrectness));
}

TEST_CASE("strategy names round trip") {
    CHECK(all_aggregations().size() == 5);
    for (Aggregation a : all_aggregations()) {
        auto back = aggregation_from_string(to_string(a));
        REQUIRE(back.has_value());
        CHECK(*back == a);
    }
    CHECK(aggregation_from_string("geometric_mean") == Aggregation::GeometricMean);
    CHECK(aggregation_from_string("weighted_correctness") == Aggregation::WeightedCorrectness);
    CHECK_FALSE(aggregation_from_string("mean").has_value());
    CHECK_FALSE(aggregation_from_string("").has_value());
}

TEST_CASE("best-of-N selection") {
    SUBCASE("highest score among the first k wins") {
        const auto traces = make_traces({0.2, 0.9, 0.9});
        CHECK(select_best_of_n(traces, 3) == 1);  // tie goes to the lower index
        CHECK(select_best_of_n(traces, 2) == 1);
        CHECK(select_best_of_n(traces, 1) == 0);
    }
    SUBCASE("candidates past k are invisible") {
        const auto traces = make_traces({0.1, 0.2, 0.95});
        CHECK(select_best_of_n(traces, 2) == 1);
    }
    SUBCASE("k bounds are enforced") {
        const auto traces = make_traces({0.5, 0.6});
        CHECK_THROWS_AS(select_best_of_n(traces, 0), std::invalid_argument);
        CHECK_THROWS_AS(select_best_of_n(traces, 3), std::invalid_argument);
        CHECK_THROWS_AS(select_best_of_n({}, 1), std::invalid_argument);
    }
    SUBCASE("all-equal scores select the first candidate") {
        CHECK(select_best_of_n(make_traces({0.4, 0.4, 0.4, 0.4}), 4) == 0);
    }
}
