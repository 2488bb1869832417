#include "evpv/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <semaphore>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "evpv/rng.hpp"

namespace evpv {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(ParseFailurePolicy p) {
    switch (p) {
        case ParseFailurePolicy::NegOne: return "neg_one";
        case ParseFailurePolicy::PosOne: return "pos_one";
        case ParseFailurePolicy::Random: return "random";
    }
    return "?";
}

std::optional<ParseFailurePolicy> parse_failure_policy_from_string(std::string_view s) {
    if (s == "neg_one") return ParseFailurePolicy::NegOne;
    if (s == "pos_one") return ParseFailurePolicy::PosOne;
    if (s == "random") return ParseFailurePolicy::Random;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// per-candidate scoring
// ---------------------------------------------------------------------------

namespace {

ScoredCandidate score_parse_failure(const TraceRecord& rec, std::size_t cand_index,
                                    const TraceCandidate& cand, const RunConfig& cfg) {
    ScoredCandidate out;
    out.instance_id = rec.instance_id;
    out.candidate = cand_index;
    out.parse_failed = true;
    out.degraded = true;

    const std::size_t T = std::max<std::size_t>(cand.declared_steps, 1);
    Rng rng(mix_seed(mix_seed(cfg.parse_failure_seed, hash_string(rec.instance_id)), cand_index));

    std::vector<double> rewards(T, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        double r = -1.0;
        switch (cfg.parse_failure) {
            case ParseFailurePolicy::NegOne: r = -1.0; break;
            case ParseFailurePolicy::PosOne: r = 1.0; break;
            case ParseFailurePolicy::Random: r = rng.coin(0.5) ? 1.0 : -1.0; break;
        }
        rewards[t] = r;
        ScoredStep s;
        s.index = static_cast<int>(t + 1);
        s.nu = 0;
        s.base = r;
        s.gated = r;  // no declarations, so the gate does not apply
        out.steps.push_back(s);
    }

    out.r = 1.0;  // empty checklist
    out.alpha = cfg.force_alpha_one || cfg.evidence == EvidenceMode::None ? 1.0 : gate(out.r, cfg.gate);
    out.score = score_trajectory(rewards, cfg.strategy);
    return out;
}

ScoredCandidate score_candidate(const TraceRecord& rec, std::size_t cand_index,
                                const TraceCandidate& cand, const ConstraintSet* evidence,
                                const RunConfig& cfg) {
    if (cand.parse_failed) return score_parse_failure(rec, cand_index, cand, cfg);

    ScoredCandidate out;
    out.instance_id = rec.instance_id;
    out.candidate = cand_index;

    const auto steps = to_step_records(cand);
    const auto claims = extract_checklist(steps);
    out.degraded = claims.empty();

    // claim supports; a literally empty evidence set falls back to neutral
    if (cfg.evidence == EvidenceMode::Provider && evidence) {
        const auto results = match_checklist(claims, *evidence, cfg.delta);
        std::vector<double> supports;
        supports.reserve(results.size());
        for (const auto& m : results) supports.push_back(m.support);
        out.supports = apply_empty_evidence_fallback(std::move(supports),
                                                     evidence->constraints.empty());
    }

    out.r = aggregate_reliability(out.supports, cfg.gate.epsilon);
    out.alpha = cfg.force_alpha_one || cfg.evidence == EvidenceMode::None
                    ? 1.0
                    : gate(out.r, cfg.gate);

    // map checklist position back to its step
    std::vector<std::optional<std::size_t>> claim_of_step(cand.steps.size());
    for (std::size_t j = 0; j < claims.size(); ++j)
        claim_of_step[static_cast<std::size_t>(claims[j].origin_step - 1)] = j;

    std::vector<double> gated;
    gated.reserve(cand.steps.size());
    for (std::size_t t = 0; t < cand.steps.size(); ++t) {
        const TraceStep& st = cand.steps[t];
        ScoredStep s;
        s.index = static_cast<int>(t + 1);
        s.nu = claim_of_step[t] ? 1 : 0;
        if (claim_of_step[t] && !out.supports.empty()) s.p_ref = claim_of_step[t];

        // step correctness u: explicit probability > external judge >
        // the claim's own evidential support > benefit of the doubt
        double u;
        if (st.base_u) {
            u = *st.base_u;
        } else if (st.judge) {
            u = *st.judge == 1 ? 1.0 : 0.0;
        } else if (s.p_ref) {
            u = out.supports[*s.p_ref];
        } else {
            u = 1.0;
        }
        s.base = base_reward(u);
        s.gated = s.nu ? out.alpha * s.base : s.base;
        gated.push_back(s.gated);
        out.steps.push_back(s);
    }

    out.score = score_trajectory(gated, cfg.strategy);
    return out;
}

struct InstanceResult {
    std::vector<ScoredCandidate> records;
    std::optional<RunError> error;
};

InstanceResult score_instance(const TraceRecord& rec, EvidenceProvider& provider,
                              const RunConfig& cfg) {
    InstanceResult res;

    std::optional<ConstraintSet> evidence;
    if (cfg.evidence == EvidenceMode::Provider) {
        try {
            ConstraintSet fetched = provider.fetch(rec.instance_id, rec.question, rec.image_ref);
            if (cfg.corruption) fetched = corrupt_constraints(fetched, *cfg.corruption);
            evidence = std::move(fetched);
        } catch (const std::exception& e) {
            res.error = RunError{rec.instance_id, e.what()};
            return res;
        }
    }

    for (std::size_t i = 0; i < rec.candidates.size(); ++i)
        res.records.push_back(
            score_candidate(rec, i, rec.candidates[i], evidence ? &*evidence : nullptr, cfg));

    // best-of-N among the first k (clamped to the pool size)
    if (!res.records.empty()) {
        std::vector<ScoredTrace> traces(res.records.size());
        for (std::size_t i = 0; i < res.records.size(); ++i) {
            traces[i].candidate = i;
            traces[i].score = res.records[i].score;
        }
        const std::size_t k = std::max<std::size_t>(1, std::min(cfg.k, traces.size()));
        res.records[select_best_of_n(traces, k)].selected = true;
    }
    return res;
}

}  // namespace

RunOutput run_verify_pipeline(const std::vector<TraceRecord>& traces, EvidenceProvider& provider,
                              const RunConfig& cfg) {
    cfg.gate.validate();
    CachingProvider cached(provider);

    std::vector<InstanceResult> results(traces.size());
    const std::size_t workers =
        std::max<std::size_t>(1, std::min({cfg.max_in_flight, traces.size(),
                                           static_cast<std::size_t>(64)}));

    if (workers <= 1) {
        for (std::size_t i = 0; i < traces.size(); ++i)
            results[i] = score_instance(traces[i], cached, cfg);
    } else {
        std::atomic<std::size_t> next{0};
        std::counting_semaphore<256> gate_sem(
            static_cast<std::ptrdiff_t>(std::min<std::size_t>(cfg.max_in_flight, 256)));
        auto work = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= traces.size()) return;
                gate_sem.acquire();
                results[i] = score_instance(traces[i], cached, cfg);
                gate_sem.release();
            }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

    RunOutput out;
    for (auto& r : results) {
        if (r.error) out.errors.push_back(std::move(*r.error));
        for (auto& rec : r.records) out.records.push_back(std::move(rec));
    }
    return out;
}

void rerank_scored(std::vector<ScoredCandidate>& records, Aggregation strategy, std::size_t k) {
    // group contiguous runs of the same instance, preserving order
    std::size_t begin = 0;
    while (begin < records.size()) {
        std::size_t end = begin + 1;
        while (end < records.size() && records[end].instance_id == records[begin].instance_id) ++end;

        std::vector<ScoredTrace> traces(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            auto& rec = records[i];
            rec.selected = false;
            std::vector<double> gated;
            gated.reserve(rec.steps.size());
            for (const auto& s : rec.steps) gated.push_back(s.gated);
            rec.score = score_trajectory(gated, strategy);
            traces[i - begin].candidate = i - begin;
            traces[i - begin].score = rec.score;
        }
        const std::size_t keff = std::max<std::size_t>(1, std::min(k, traces.size()));
        records[begin + select_best_of_n(traces, keff)].selected = true;
        begin = end;
    }
}

// ---------------------------------------------------------------------------
// scored-file JSONL
// ---------------------------------------------------------------------------

std::string scored_candidate_to_json(const ScoredCandidate& rec) {
    ordered_json j;
    j["instance_id"] = rec.instance_id;
    j["candidate"] = rec.candidate;
    ordered_json steps = ordered_json::array();
    for (const auto& s : rec.steps) {
        ordered_json sj;
        sj["index"] = s.index;
        sj["nu"] = s.nu;
        sj["p_refs"] = s.p_ref ? ordered_json::array({*s.p_ref}) : ordered_json::array();
        sj["base"] = s.base;
        sj["gated"] = s.gated;
        steps.push_back(std::move(sj));
    }
    j["steps"] = std::move(steps);
    j["supports"] = rec.supports;
    j["r"] = rec.r;
    j["alpha"] = rec.alpha;
    j["score"] = rec.score;
    j["selected"] = rec.selected;
    if (rec.parse_failed) j["parse_failed"] = true;
    if (rec.degraded) j["degraded"] = true;
    return j.dump();
}

void write_scored_file(const std::filesystem::path& path,
                       const std::vector<ScoredCandidate>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scored file: " + path.string());
    for (const auto& r : records) out << scored_candidate_to_json(r) << "\n";
}

std::vector<ScoredCandidate> read_scored_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scored file: " + path.string());

    std::vector<ScoredCandidate> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("scored file line " + std::to_string(lineno) + ": " + e.what());
        }
        ScoredCandidate rec;
        rec.instance_id = j.at("instance_id").get<std::string>();
        rec.candidate = j.at("candidate").get<std::size_t>();
        for (const auto& sj : j.at("steps")) {
            ScoredStep s;
            s.index = sj.at("index").get<int>();
            s.nu = sj.at("nu").get<int>();
            const auto& refs = sj.at("p_refs");
            if (!refs.empty()) s.p_ref = refs[0].get<std::size_t>();
            s.base = sj.at("base").get<double>();
            s.gated = sj.at("gated").get<double>();
            rec.steps.push_back(s);
        }
        rec.supports = j.at("supports").get<std::vector<double>>();
        rec.r = j.at("r").get<double>();
        rec.alpha = j.at("alpha").get<double>();
        rec.score = j.at("score").get<double>();
        rec.selected = j.at("selected").get<bool>();
        rec.parse_failed = j.value("parse_failed", false);
        rec.degraded = j.value("degraded", false);
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

// scored records grouped by instance id, in file order
std::map<std::string, std::vector<const ScoredCandidate*>> group_records(
    const std::vector<ScoredCandidate>& records) {
    std::map<std::string, std::vector<const ScoredCandidate*>> by_id;
    for (const auto& r : records) by_id[r.instance_id].push_back(&r);
    return by_id;
}

double mean_of(const std::vector<double>& xs) {
    double acc = 0.0;
    for (double x : xs) acc += x;
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

}  // namespace

StepEval evaluate_steps(const std::vector<TraceRecord>& traces,
                        const std::vector<ScoredCandidate>& records) {
    const auto by_id = group_records(records);

    std::map<std::string, std::vector<StepPrediction>> pools;  // benchmark -> pairs
    std::vector<StepPrediction> all;

    for (const auto& rec : traces) {
        auto it = by_id.find(rec.instance_id);
        if (it == by_id.end()) continue;
        const std::string bench = rec.benchmark.value_or("default");
        for (const auto* scored : it->second) {
            if (scored->candidate >= rec.candidates.size()) continue;
            const auto& cand = rec.candidates[scored->candidate];
            if (!cand.step_labels) continue;
            const std::size_t n = std::min(cand.step_labels->size(), scored->steps.size());
            for (std::size_t t = 0; t < n; ++t) {
                StepPrediction p;
                p.gold = (*cand.step_labels)[t] == 1 ? StepLabel::Correct : StepLabel::Incorrect;
                p.predicted =
                    scored->steps[t].gated > 0.0 ? StepLabel::Correct : StepLabel::Incorrect;
                pools[bench].push_back(p);
                all.push_back(p);
            }
        }
    }

    if (all.empty()) throw std::invalid_argument("evaluate_steps: no labelled steps to evaluate");

    StepEval out;
    out.pairs = all.size();
    out.micro = macro_f1(all);
    std::vector<double> benches;
    for (const auto& [name, pool] : pools) {
        out.per_benchmark.emplace_back(name, macro_f1(pool));
        benches.push_back(out.per_benchmark.back().second.macro_f1);
    }
    out.macro_over_benchmarks = mean_of(benches);
    return out;
}

BonEval evaluate_bon(const std::vector<TraceRecord>& traces,
                     const std::vector<ScoredCandidate>& records, std::size_t k) {
    const auto by_id = group_records(records);

    std::map<std::string, std::vector<SelectionOutcome>> pools;
    std::vector<SelectionOutcome> all;

    for (const auto& rec : traces) {
        auto it = by_id.find(rec.instance_id);
        if (it == by_id.end()) continue;
        SelectionOutcome o;
        o.question_id = rec.instance_id;
        for (const auto& cand : rec.candidates)
            o.candidate_correct.push_back(answers_equal(cand.final_answer, rec.gold_answer));
        o.k = std::max<std::size_t>(1, std::min(k, o.candidate_correct.size()));
        o.selected = 0;
        for (const auto* scored : it->second)
            if (scored->selected) o.selected = scored->candidate;
        if (o.selected >= o.k) o.selected = 0;  // selection made under another k; fall back
        pools[rec.benchmark.value_or("default")].push_back(o);
        all.push_back(std::move(o));
    }

    if (all.empty()) throw std::invalid_argument("evaluate_bon: no scored questions to evaluate");

    BonEval out;
    out.questions = all.size();
    out.micro = selection_metrics(all);
    std::vector<double> p1, bon, dk, sp;
    for (const auto& [name, pool] : pools) {
        const SelectionMetrics m = selection_metrics(pool);
        out.per_benchmark.emplace_back(name, m);
        p1.push_back(m.pass_at_1);
        bon.push_back(m.bon_at_k);
        dk.push_back(m.delta_k);
        sp.push_back(m.std_pass_at_k);
    }
    out.macro = {mean_of(p1), mean_of(bon), mean_of(dk), mean_of(sp)};
    return out;
}

// ---------------------------------------------------------------------------
// causal curve
// ---------------------------------------------------------------------------

std::vector<CausalCurvePoint> causal_curve(const Suite& suite, const std::vector<double>& ratios,
                                           const std::vector<std::uint64_t>& seeds,
                                           const RunConfig& cfg) {
    if (ratios.empty() || seeds.empty())
        throw std::invalid_argument("causal_curve: need at least one ratio and one seed");

    std::vector<CausalCurvePoint> out;
    for (double ratio : ratios) {
        std::vector<double> f1s;
        for (std::uint64_t seed : seeds) {
            // per-instance reseeding so every instance gets its own flips
            std::map<std::string, ConstraintSet> corrupted;
            for (const auto& [id, set] : suite.evidence) {
                CorruptionSpec spec;
                spec.mode = CorruptionMode::FlipFields;
                spec.ratio = ratio;
                spec.seed = mix_seed(seed, hash_string(id));
                corrupted.emplace(id, corrupt_constraints(set, spec));
            }
            MapProvider provider(std::move(corrupted));
            const RunOutput run = run_verify_pipeline(suite.traces, provider, cfg);
            f1s.push_back(evaluate_steps(suite.traces, run.records).micro.macro_f1);
        }
        CausalCurvePoint p;
        p.ratio = ratio;
        p.mean_macro_f1 = mean_of(f1s);
        if (f1s.size() > 1) {
            double acc = 0.0;
            for (double x : f1s) acc += (x - p.mean_macro_f1) * (x - p.mean_macro_f1);
            p.stddev_macro_f1 = std::sqrt(acc / static_cast<double>(f1s.size() - 1));
        }
        out.push_back(p);
    }
    return out;
}

}  // namespace evpv
