#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evpv {

// ---------------------------------------------------------------------------
// Step-level and answer-level evaluation.  All rates are reported on a
// 0..100 percent scale.
// ---------------------------------------------------------------------------

enum class StepLabel { Correct, Incorrect };

struct StepPrediction {
    StepLabel predicted = StepLabel::Correct;
    StepLabel gold = StepLabel::Correct;
};

struct MacroF1Result {
    double macro_f1 = 0.0;                    // unweighted mean of the two class F1s
    double accuracy = 0.0;
    std::array<double, 2> class_f1 = {0.0, 0.0};  // [correct, incorrect]
    bool degenerate_class = false;  // a class absent from both gold and predictions
};

// Throws std::invalid_argument on empty input.
MacroF1Result macro_f1(std::span<const StepPrediction> preds);

// One question's candidate pool: whether each candidate's final answer is
// right, and which candidate the reranker picked.
struct SelectionOutcome {
    std::string question_id;
    std::vector<bool> candidate_correct;
    std::size_t selected = 0;
    std::size_t k = 1;  // pool size the selection was made from
};

struct SelectionMetrics {
    double pass_at_1 = 0.0;     // first candidate correct
    double bon_at_k = 0.0;      // selected candidate correct
    double delta_k = 0.0;       // bon_at_k - pass_at_1
    double std_pass_at_k = 0.0; // any of the first k correct (oracle upper bound)
};

// Throws std::invalid_argument on empty input, a selected index outside the
// first k, or k exceeding the candidate count.
SelectionMetrics selection_metrics(std::span<const SelectionOutcome> outcomes);

// Final-answer equivalence: whitespace-trimmed, case-folded exact match;
// numeric strings compare within 1e-6 relative tolerance.
bool answers_equal(std::string_view a, std::string_view b);

}  // namespace evpv
