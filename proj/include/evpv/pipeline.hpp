#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evpv/corruption.hpp"
#include "evpv/matcher.hpp"
#include "evpv/metrics.hpp"
#include "evpv/provider.hpp"
#include "evpv/reliability.hpp"
#include "evpv/reranker.hpp"
#include "evpv/trace.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// End-to-end scoring: trace + evidence -> calibrated step rewards ->
// trajectory scores -> best-of-N selection.
// ---------------------------------------------------------------------------

enum class ParseFailurePolicy { NegOne, PosOne, Random };

std::string_view to_string(ParseFailurePolicy p);
std::optional<ParseFailurePolicy> parse_failure_policy_from_string(std::string_view s);

enum class EvidenceMode {
    Provider,  // fetch facts and gate on them
    None,      // no evidence at all: alpha pinned to 1, judges taken at face value
};

struct RunConfig {
    GateConfig gate;
    double delta = kDefaultDelta;
    Aggregation strategy = Aggregation::GeometricMean;
    std::size_t k = 8;  // clamped per-question to the candidate count
    ParseFailurePolicy parse_failure = ParseFailurePolicy::NegOne;
    std::uint64_t parse_failure_seed = 0;
    bool force_alpha_one = false;  // ablation: keep matching, disable the gate
    EvidenceMode evidence = EvidenceMode::Provider;
    std::optional<CorruptionSpec> corruption;  // applied to fetched evidence
    std::size_t max_in_flight = 4;  // parallel instances / provider calls
};

struct ScoredStep {
    int index = 0;  // 1-based
    int nu = 0;     // 1 when the step declared a visual premise
    std::optional<std::size_t> p_ref;  // index into supports, when matched
    double base = 0.0;
    double gated = 0.0;
};

struct ScoredCandidate {
    std::string instance_id;
    std::size_t candidate = 0;
    std::vector<ScoredStep> steps;
    std::vector<double> supports;  // one per checklist claim
    double r = 1.0;
    double alpha = 1.0;
    double score = 0.0;
    bool selected = false;
    bool parse_failed = false;
    bool degraded = false;  // scored without any visual declarations
};

struct RunError {
    std::string instance_id;
    std::string message;
};

struct RunOutput {
    std::vector<ScoredCandidate> records;  // input order, candidates grouped per instance
    std::vector<RunError> errors;
};

// Scores every candidate of every record.  Evidence is fetched exactly once
// per instance (the provider is wrapped in a cache) and instances are
// processed by up to max_in_flight workers; output order never depends on
// scheduling.
RunOutput run_verify_pipeline(const std::vector<TraceRecord>& traces, EvidenceProvider& provider,
                              const RunConfig& cfg);

// Re-derives trajectory scores from the stored gated rewards and redoes the
// per-instance selection; used to re-rank an existing scored file.
void rerank_scored(std::vector<ScoredCandidate>& records, Aggregation strategy, std::size_t k);

// --- scored-file JSONL -------------------------------------------------------

std::string scored_candidate_to_json(const ScoredCandidate& rec);
void write_scored_file(const std::filesystem::path& path,
                       const std::vector<ScoredCandidate>& records);
std::vector<ScoredCandidate> read_scored_file(const std::filesystem::path& path);

// --- evaluation over a scored run -------------------------------------------

// Pairs gated step signs against gold step labels.  Benchmarks (the optional
// per-record tag) are reported separately plus pooled ("micro") and averaged
// ("macro") overall rows.
struct StepEval {
    MacroF1Result micro;
    std::vector<std::pair<std::string, MacroF1Result>> per_benchmark;
    double macro_over_benchmarks = 0.0;  // mean of per-benchmark macro F1
    std::size_t pairs = 0;               // labelled steps evaluated
};

StepEval evaluate_steps(const std::vector<TraceRecord>& traces,
                        const std::vector<ScoredCandidate>& records);

struct BonEval {
    SelectionMetrics micro;
    std::vector<std::pair<std::string, SelectionMetrics>> per_benchmark;
    SelectionMetrics macro;  // unweighted mean over benchmarks
    std::size_t questions = 0;
};

BonEval evaluate_bon(const std::vector<TraceRecord>& traces,
                     const std::vector<ScoredCandidate>& records, std::size_t k);

// --- evidence ablation curve --------------------------------------------------

// In-memory evidence, keyed by instance id.
class MapProvider : public EvidenceProvider {
public:
    explicit MapProvider(std::map<std::string, ConstraintSet> sets) : sets_(std::move(sets)) {}
    ConstraintSet fetch(const std::string& instance_id, const std::string&,
                        const std::string&) override {
        auto it = sets_.find(instance_id);
        if (it == sets_.end()) throw ProviderError("no evidence for instance '" + instance_id + "'");
        return it->second;
    }

private:
    std::map<std::string, ConstraintSet> sets_;
};

struct Suite {
    std::vector<TraceRecord> traces;
    std::map<std::string, ConstraintSet> evidence;  // reference facts per instance
};

struct CausalCurvePoint {
    double ratio = 0.0;
    double mean_macro_f1 = 0.0;   // over seeds
    double stddev_macro_f1 = 0.0; // sample standard deviation (0 for one seed)
};

// For each corruption ratio: flip that share of evidence fields (re-seeded
// per instance), rerun the full matcher -> reliability -> gating chain, and
// measure step Macro-F1 against the trace's gold labels.
std::vector<CausalCurvePoint> causal_curve(const Suite& suite, const std::vector<double>& ratios,
                                           const std::vector<std::uint64_t>& seeds,
                                           const RunConfig& cfg);

}  // namespace evpv
