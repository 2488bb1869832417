#include "evpv/synth.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "evpv/rng.hpp"

namespace evpv {

namespace {

struct ShapePair {
    const char* base;
    const char* top;
};

constexpr ShapePair kShapes[] = {
    {"cylinder", "cone"},
    {"prism", "pyramid"},
    {"cube", "sphere"},
    {"cuboid", "hemisphere"},
};

std::string fmt_int(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

double draw_conf(Rng& rng) { return static_cast<double>(90 + rng.bounded(10)) / 100.0; }

enum class CandKind { Correct, PremiseError, LogicError };

TraceCandidate make_candidate(Rng& rng, CandKind kind, const std::string& base,
                              const std::string& top, double v1, double v2) {
    double x1 = v1, x2 = v2;
    std::size_t misread = 0;
    if (kind == CandKind::PremiseError) {
        misread = rng.bounded(2);
        (misread == 0 ? x1 : x2) *= 2.0;  // well past the matching tolerance
    }
    double ans = x1 + x2;
    if (kind == CandKind::LogicError) ans += 2.0;

    const std::string s1_val = fmt_int(x1), s2_val = fmt_int(x2), ans_s = fmt_int(ans);

    TraceCandidate c;
    std::vector<int> labels;

    // two measurement reads
    for (int which = 0; which < 2; ++which) {
        const std::string& obj = which == 0 ? base : top;
        const std::string& val = which == 0 ? s1_val : s2_val;
        TraceStep s;
        s.text = "From the figure, the " + obj + " height is " + val + ".";
        s.declaration = "the " + obj + " height is " + val + " cm";
        const bool bad = kind == CandKind::PremiseError && misread == static_cast<std::size_t>(which);
        if (bad) s.judge = 1;  // fluent misread: a step-level judge waves it through
        labels.push_back(bad ? -1 : 1);
        c.steps.push_back(std::move(s));
    }

    // shape decomposition (visual, scored by its own evidence support)
    {
        TraceStep s;
        s.text = "The solid is composed of a " + base + " and a " + top + ".";
        s.declaration = "composed of a " + base + " and a " + top;
        labels.push_back(1);
        c.steps.push_back(std::move(s));
    }

    // arithmetic and final statement (abstract steps)
    {
        TraceStep s;
        s.text = "Total height = " + s1_val + " + " + s2_val + " = " + ans_s + ".";
        s.judge = kind == CandKind::LogicError ? -1 : 1;
        labels.push_back(kind == CandKind::Correct ? 1 : -1);
        c.steps.push_back(std::move(s));
    }
    {
        TraceStep s;
        s.text = "The answer is " + ans_s + ".";
        s.judge = kind == CandKind::LogicError ? -1 : 1;
        labels.push_back(kind == CandKind::Correct ? 1 : -1);
        c.steps.push_back(std::move(s));
    }

    c.final_answer = ans_s;
    c.step_labels = std::move(labels);
    return c;
}

}  // namespace

Suite gen_synthetic_suite(const SynthSpec& spec) {
    Suite suite;
    for (std::size_t q = 0; q < spec.questions; ++q) {
        Rng rng(mix_seed(spec.seed, q));

        const ShapePair shapes = kShapes[rng.bounded(std::size(kShapes))];
        const std::string base = shapes.base, top = shapes.top;
        const double v0 = static_cast<double>(2 + rng.bounded(8));  // base radius
        const double v1 = static_cast<double>(2 + rng.bounded(9));  // base height
        const double v2 = static_cast<double>(2 + rng.bounded(9));  // top height

        char idbuf[32];
        std::snprintf(idbuf, sizeof idbuf, "synth-%05zu", q);

        TraceRecord rec;
        rec.instance_id = idbuf;
        rec.question = "The figure shows a " + top + " placed on top of a " + base +
                       ". The total height of the solid is the sum of the two heights. What is it?";
        rec.image_ref = rec.instance_id + ".png";
        rec.gold_answer = fmt_int(v1 + v2);
        rec.benchmark = q % 2 == 0 ? "synth-a" : "synth-b";

        ConstraintSet gold;
        gold.instance_id = rec.instance_id;
        gold.source = Source::Gold;
        gold.constraints.push_back({NumericFact{base + " base radius", "length", v0, "cm"},
                                    draw_conf(rng)});
        gold.constraints.push_back({NumericFact{base + " height", "length", v1, "cm"},
                                    draw_conf(rng)});
        gold.constraints.push_back({NumericFact{top + " height", "length", v2, "cm"},
                                    draw_conf(rng)});
        gold.constraints.push_back(
            {RelationFact{RelationType::Equal, {top + " base radius", base + " base radius"}, {}},
             draw_conf(rng)});
        gold.constraints.push_back(
            {StructureFact{StructureType::Composite, {base, top}, {top + " placed on top of " + base}, {}},
             draw_conf(rng)});

        for (std::size_t c = 0; c < spec.candidates; ++c) {
            const double u = rng.unit();
            CandKind kind = CandKind::Correct;
            if (u < spec.premise_error_rate)
                kind = CandKind::PremiseError;
            else if (u < spec.premise_error_rate + spec.logic_error_rate)
                kind = CandKind::LogicError;
            rec.candidates.push_back(make_candidate(rng, kind, base, top, v1, v2));
        }

        suite.evidence.emplace(rec.instance_id, std::move(gold));
        suite.traces.push_back(std::move(rec));
    }
    return suite;
}

void write_suite(const std::filesystem::path& dir, const Suite& suite) {
    std::filesystem::create_directories(dir / "constraints");
    write_trace_file(dir / "trace.jsonl", suite.traces);
    for (const auto& [id, set] : suite.evidence) {
        std::ofstream out(dir / "constraints" / (id + ".constraints.json"), std::ios::binary);
        if (!out) throw std::runtime_error("cannot write constraints for " + id);
        out << emit_constraints(set) << "\n";
    }
}

Suite read_suite(const std::filesystem::path& dir) {
    Suite suite;
    TraceFile tf = read_trace_file(dir / "trace.jsonl");
    if (!tf.errors.empty())
        throw std::runtime_error("suite trace has " + std::to_string(tf.errors.size()) +
                                 " malformed lines; first: " + tf.errors.front().message);
    suite.traces = std::move(tf.records);
    for (const auto& rec : suite.traces) {
        const auto path = dir / "constraints" / (rec.instance_id + ".constraints.json");
        std::ifstream in(path);
        if (!in) throw std::runtime_error("missing constraints file: " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        suite.evidence.emplace(rec.instance_id,
                               parse_constraints(buf.str(), rec.instance_id, Source::Gold));
    }
    return suite;
}

}  // namespace evpv
