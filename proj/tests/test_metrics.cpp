#include <doctest.h>

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "evpv/metrics.hpp"
#include "evpv/rng.hpp"

using namespace evpv;

namespace {

constexpr StepLabel C = StepLabel::Correct;
constexpr StepLabel I = StepLabel::Incorrect;

std::vector<StepPrediction> zip(const std::vector<StepLabel>& predicted,
                                const std::vector<StepLabel>& gold) {
    REQUIRE(predicted.size() == gold.size());
    std::vector<StepPrediction> out(predicted.size());
    for (std::size_t i = 0; i < predicted.size(); ++i) out[i] = {predicted[i], gold[i]};
    return out;
}

}  // namespace

TEST_CASE("macro F1 on a half-right prediction") {
    const auto preds = zip({C, I, C, I}, {C, C, I, I});
    const MacroF1Result r = macro_f1(preds);
    CHECK(r.class_f1[0] == doctest::Approx(50.0));
    CHECK(r.class_f1[1] == doctest::Approx(50.0));
    CHECK(r.macro_f1 == doctest::Approx(50.0));
    CHECK(r.accuracy == doctest::Approx(50.0));
    CHECK_FALSE(r.degenerate_class);
}

TEST_CASE("perfect and inverted predictions") {
    const auto perfect = macro_f1(zip({C, I, C, I}, {C, I, C, I}));
    CHECK(perfect.macro_f1 == doctest::Approx(100.0));
    CHECK(perfect.accuracy == doctest::Approx(100.0));
    CHECK_FALSE(perfect.degenerate_class);

    const auto inverted = macro_f1(zip({I, I, C, C}, {C, C, I, I}));
    CHECK(inverted.macro_f1 == doctest::Approx(0.0));
    CHECK(inverted.accuracy == doctest::Approx(0.0));
}

TEST_CASE("a class absent everywhere is flagged, not averaged away silently") {
    const auto r = macro_f1(zip({C, C, C}, {C, C, C}));
    CHECK(r.class_f1[0] == doctest::Approx(100.0));
    CHECK(r.class_f1[1] == 0.0);
    CHECK(r.macro_f1 == doctest::Approx(50.0));
    CHECK(r.accuracy == doctest::Approx(100.0));
    CHECK(r.degenerate_class);
}

TEST_CASE("macro F1 rejects empty input") {
    CHECK_THROWS_AS(macro_f1({}), std::invalid_argument);
}

TEST_CASE("macro F1 is order-invariant") {
    Rng rng(31);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<StepPrediction> preds(3 + rng.bounded(20));
        for (auto& p : preds) p = {rng.coin(0.6) ? C : I, rng.coin(0.5) ? C : I};
        const MacroF1Result before = macro_f1(preds);
        for (std::size_t i = preds.size(); i > 1; --i)
            std::swap(preds[i - 1], preds[rng.bounded(i)]);
        const MacroF1Result after = macro_f1(preds);
        CHECK(before.macro_f1 == after.macro_f1);
        CHECK(before.accuracy == after.accuracy);
        CHECK(before.class_f1 == after.class_f1);
    }
}

TEST_CASE("relabelling both classes swaps the per-class F1s") {
    Rng rng(32);
    for (int iter = 0; iter < 50; ++iter) {
        std::vector<StepPrediction> preds(2 + rng.bounded(20));
        bool any_c = false, any_i = false;
        for (auto& p : preds) {
            p = {rng.coin(0.5) ? C : I, rng.coin(0.5) ? C : I};
            any_c = any_c || p.gold == C;
            any_i = any_i || p.gold == I;
        }
        if (!any_c || !any_i) continue;  // keep the comparison non-degenerate

        std::vector<StepPrediction> flipped = preds;
        for (auto& p : flipped) {
            p.predicted = p.predicted == C ? I : C;
            p.gold = p.gold == C ? I : C;
        }
        const MacroF1Result a = macro_f1(preds);
        const MacroF1Result b = macro_f1(flipped);
        CHECK(a.macro_f1 == doctest::Approx(b.macro_f1).epsilon(1e-12));
        CHECK(a.accuracy == b.accuracy);
        CHECK(a.class_f1[0] == doctest::Approx(b.class_f1[1]).epsilon(1e-12));
        CHECK(a.class_f1[1] == doctest::Approx(b.class_f1[0]).epsilon(1e-12));
    }
}

TEST_CASE("selection metrics on a two-question pool") {
    std::vector<SelectionOutcome> outcomes;
    outcomes.push_back({"q1", {true, false}, 0, 2});
    outcomes.push_back({"q2", {false, false}, 0, 2});
    const SelectionMetrics m = selection_metrics(outcomes);
    CHECK(m.pass_at_1 == doctest::Approx(50.0));
    CHECK(m.bon_at_k == doctest::Approx(50.0));
    CHECK(m.delta_k == doctest::Approx(0.0));
    CHECK(m.std_pass_at_k == doctest::Approx(50.0));
}

TEST_CASE("selection can beat the first candidate") {
    std::vector<SelectionOutcome> outcomes;
    outcomes.push_back({"q1", {false, true}, 1, 2});
    const SelectionMetrics m = selection_metrics(outcomes);
    CHECK(m.pass_at_1 == 0.0);
    CHECK(m.bon_at_k == 100.0);
    CHECK(m.delta_k == 100.0);
    CHECK(m.std_pass_at_k == 100.0);
}

TEST_CASE("selection metrics validate their input") {
    CHECK_THROWS_AS(selection_metrics({}), std::invalid_argument);

    std::vector<SelectionOutcome> bad;
    bad.push_back({"q", {}, 0, 1});
    CHECK_THROWS_AS(selection_metrics(bad), std::invalid_argument);

    bad.clear();
    bad.push_back({"q", {true, true}, 0, 0});  // k below 1
    CHECK_THROWS_AS(selection_metrics(bad), std::invalid_argument);

    bad.clear();
    bad.push_back({"q", {true, true}, 0, 3});  // k beyond the pool
    CHECK_THROWS_AS(selection_metrics(bad), std::invalid_argument);

    bad.clear();
    bad.push_back({"q", {true, true}, 1, 1});  // selected outside the first k
    CHECK_THROWS_AS(selection_metrics(bad), std::invalid_argument);
}

TEST_CASE("oracle pass rate never drops when k grows") {
    Rng rng(33);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t pool = 2 + rng.bounded(7);
        std::vector<bool> correct(pool);
        for (std::size_t i = 0; i < pool; ++i) correct[i] = rng.coin(0.3);

        double prev = 0.0;
        for (std::size_t k = 1; k <= pool; ++k) {
            std::vector<SelectionOutcome> one;
            one.push_back({"q", correct, 0, k});
            const double cur = selection_metrics(one).std_pass_at_k;
            CHECK(cur >= prev);
            prev = cur;
        }
    }
}

TEST_CASE("answer equivalence folds case and whitespace") {
    CHECK(answers_equal(" C ", "c"));
    CHECK(answers_equal("ABC", "abc"));
    CHECK(answers_equal("", "  "));
    CHECK_FALSE(answers_equal("B", "D"));
    CHECK_FALSE(answers_equal("3 cm", "3"));
}

TEST_CASE("numeric answers compare within a relative tolerance") {
    CHECK(answers_equal("0.5", "0.50"));
    CHECK(answers_equal("1e3", "1000"));
    CHECK(answers_equal("-2", "-2.00"));
    CHECK(answers_equal("2", "2.000001"));
    CHECK_FALSE(answers_equal("2", "2.00001"));
    CHECK_FALSE(answers_equal("2", "2.1"));
    CHECK(answers_equal("0", "-0"));
    CHECK_FALSE(answers_equal("1", "-1"));
}
