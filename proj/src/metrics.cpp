#include "evpv/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace evpv {

MacroF1Result macro_f1(std::span<const StepPrediction> preds) {
    if (preds.empty()) throw std::invalid_argument("macro_f1: empty input");

    // per class: 0 = correct, 1 = incorrect
    std::array<std::size_t, 2> tp = {0, 0}, fp = {0, 0}, fn = {0, 0};
    std::size_t hits = 0;
    for (const auto& p : preds) {
        const int g = p.gold == StepLabel::Correct ? 0 : 1;
        const int q = p.predicted == StepLabel::Correct ? 0 : 1;
        if (g == q) {
            ++tp[g];
            ++hits;
        } else {
            ++fp[q];
            ++fn[g];
        }
    }

    MacroF1Result out;
    for (int c = 0; c < 2; ++c) {
        const std::size_t denom = 2 * tp[c] + fp[c] + fn[c];
        if (tp[c] + fp[c] + fn[c] == 0) {
            // class never occurs in gold or predictions; counted as 0 and flagged
            out.class_f1[c] = 0.0;
            out.degenerate_class = true;
        } else {
            out.class_f1[c] = denom == 0 ? 0.0 : 100.0 * 2.0 * tp[c] / static_cast<double>(denom);
        }
    }
    out.macro_f1 = (out.class_f1[0] + out.class_f1[1]) / 2.0;
    out.accuracy = 100.0 * static_cast<double>(hits) / static_cast<double>(preds.size());
    return out;
}

SelectionMetrics selection_metrics(std::span<const SelectionOutcome> outcomes) {
    if (outcomes.empty()) throw std::invalid_argument("selection_metrics: empty input");

    double p1 = 0, bon = 0, std_k = 0;
    for (const auto& o : outcomes) {
        if (o.candidate_correct.empty())
            throw std::invalid_argument("selection_metrics: outcome with no candidates");
        if (o.k < 1 || o.k > o.candidate_correct.size())
            throw std::invalid_argument("selection_metrics: k outside candidate range");
        if (o.selected >= o.k)
            throw std::invalid_argument("selection_metrics: selected index outside the first k");
        p1 += o.candidate_correct[0] ? 1.0 : 0.0;
        bon += o.candidate_correct[o.selected] ? 1.0 : 0.0;
        bool any = false;
        for (std::size_t i = 0; i < o.k; ++i) any = any || o.candidate_correct[i];
        std_k += any ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(outcomes.size());
    SelectionMetrics m;
    m.pass_at_1 = 100.0 * p1 / n;
    m.bon_at_k = 100.0 * bon / n;
    m.delta_k = m.bon_at_k - m.pass_at_1;
    m.std_pass_at_k = 100.0 * std_k / n;
    return m;
}

namespace {

std::string normalize_answer(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out;
    out.reserve(e - b);
    for (std::size_t i = b; i < e; ++i)
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i]))));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    out = std::strtod(begin, &end);
    return end == begin + s.size();
}

}  // namespace

bool answers_equal(std::string_view a, std::string_view b) {
    const std::string na = normalize_answer(a);
    const std::string nb = normalize_answer(b);
    if (na == nb) return true;
    double da = 0, db = 0;
    if (parse_double(na, da) && parse_double(nb, db)) {
        const double scale = std::max({std::abs(da), std::abs(db), 1e-12});
        return std::abs(da - db) / scale <= 1e-6;
    }
    return false;
}

}  // namespace evpv
