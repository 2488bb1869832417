// evpv: verify step-wise visual reasoning traces against structured evidence,
// calibrate step rewards, and rerank best-of-N candidates.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "evpv/corruption.hpp"
#include "evpv/matcher.hpp"
#include "evpv/pipeline.hpp"
#include "evpv/prompts.hpp"
#include "evpv/synth.hpp"
#include "evpv/training.hpp"

#include <nlohmann/json.hpp>

using namespace evpv;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct CommonOpts {
    double tau = 0.5;
    double beta = 10.0;
    double epsilon = 1e-6;
    double delta = kDefaultDelta;
    std::string strategy = "geometric_mean";
    std::size_t k = 8;
    std::string parse_failure = "neg_one";
    std::uint64_t seed = 0;
    std::size_t jobs = 4;
    bool no_gate = false;
    bool no_evidence = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--tau", o.tau, "gate midpoint");
    cmd->add_option("--beta", o.beta, "gate steepness");
    cmd->add_option("--epsilon", o.epsilon, "reliability log floor");
    cmd->add_option("--delta", o.delta, "numeric matching tolerance");
    cmd->add_option("--strategy", o.strategy, "trajectory aggregation strategy");
    cmd->add_option("--k", o.k, "best-of-N pool size");
    cmd->add_option("--parse-failure", o.parse_failure, "neg_one | pos_one | random");
    cmd->add_option("--seed", o.seed, "seed for seeded policies");
    cmd->add_option("--jobs", o.jobs, "parallel instances");
    cmd->add_flag("--no-gate", o.no_gate, "keep matching but pin alpha to 1");
    cmd->add_flag("--no-evidence", o.no_evidence, "skip evidence entirely (alpha = 1)");
}

RunConfig to_config(const CommonOpts& o) {
    RunConfig cfg;
    cfg.gate.tau = o.tau;
    cfg.gate.beta = o.beta;
    cfg.gate.epsilon = o.epsilon;
    cfg.delta = o.delta;
    auto st = aggregation_from_string(o.strategy);
    if (!st) throw CLI::ValidationError("--strategy", "unknown strategy '" + o.strategy + "'");
    cfg.strategy = *st;
    cfg.k = o.k;
    auto pf = parse_failure_policy_from_string(o.parse_failure);
    if (!pf) throw CLI::ValidationError("--parse-failure", "unknown policy '" + o.parse_failure + "'");
    cfg.parse_failure = *pf;
    cfg.parse_failure_seed = o.seed;
    cfg.force_alpha_one = o.no_gate;
    cfg.evidence = o.no_evidence ? EvidenceMode::None : EvidenceMode::Provider;
    cfg.max_in_flight = o.jobs;
    return cfg;
}

std::unique_ptr<EvidenceProvider> make_provider(const std::string& kind,
                                                const std::string& constraints_dir,
                                                const std::string& endpoint,
                                                const std::string& token, int timeout, int retries,
                                                std::uint64_t seed) {
    if (kind == "file") {
        if (constraints_dir.empty())
            throw CLI::ValidationError("--constraints", "file provider needs --constraints DIR");
        return std::make_unique<FileProvider>(constraints_dir);
    }
    if (kind == "mock") return std::make_unique<MockProvider>(seed);
    if (kind == "remote") {
        RemoteProvider::Config cfg;
        cfg.endpoint = endpoint;
        if (cfg.endpoint.empty())
            if (const char* env = std::getenv("EVPV_PROVIDER_URL")) cfg.endpoint = env;
        if (cfg.endpoint.empty())
            throw CLI::ValidationError("--endpoint",
                                       "remote provider needs --endpoint or EVPV_PROVIDER_URL");
        cfg.bearer_token = token;
        if (cfg.bearer_token.empty())
            if (const char* env = std::getenv("EVPV_PROVIDER_TOKEN")) cfg.bearer_token = env;
        cfg.timeout_seconds = timeout;
        cfg.retries = retries;
        return std::make_unique<RemoteProvider>(cfg);
    }
    throw CLI::ValidationError("--provider", "unknown provider '" + kind + "'");
}

std::vector<TraceRecord> load_trace(const std::string& path, bool quiet = false) {
    TraceFile tf = read_trace_file(path);
    if (!quiet)
        for (const auto& e : tf.errors)
            std::cerr << "warning: " << path << ":" << e.line << ": " << e.message << "\n";
    if (tf.records.empty()) throw std::runtime_error("no usable records in " + path);
    return tf.records;
}

void print_selection(const char* label, const SelectionMetrics& m) {
    std::cout << label << " pass@1=" << m.pass_at_1 << " bon@k=" << m.bon_at_k
              << " delta_k=" << m.delta_k << " std_pass@k=" << m.std_pass_at_k << "\n";
}

std::vector<double> parse_double_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& csv) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoull(item));
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"step-wise visual premise verification and reranking"};
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config file; flags override it");
    app.allow_config_extras(CLI::config_extras_mode::error);

    // --- validate-constraints -------------------------------------------------
    std::string vc_input;
    bool vc_lenient = false;
    auto* vc = app.add_subcommand("validate-constraints", "parse and validate a constraint file");
    vc->add_option("--input", vc_input, "constraint JSON file")->required();
    vc->add_flag("--lenient", vc_lenient, "drop bad elements instead of failing");

    // --- match ----------------------------------------------------------------
    std::string m_trace, m_constraints, m_out;
    CommonOpts m_opts;
    auto* mc = app.add_subcommand("match", "emit per-claim supports for every candidate");
    mc->add_option("--trace", m_trace, "trace JSONL")->required();
    mc->add_option("--constraints", m_constraints, "directory of {id}.constraints.json")->required();
    mc->add_option("--out", m_out, "output JSONL (default stdout)");
    add_common(mc, m_opts);

    // --- score / run ------------------------------------------------------------
    std::string r_trace, r_constraints, r_out, r_errors, r_provider = "file", r_endpoint, r_token;
    std::string r_corrupt_mode;
    double r_corrupt_ratio = 0.0;
    std::uint64_t r_corrupt_seed = 0;
    int r_timeout = 10, r_retries = 2;
    CommonOpts r_opts;
    auto* rc = app.add_subcommand("run", "score a trace end to end and select best-of-N");
    rc->add_option("--trace", r_trace, "trace JSONL")->required();
    rc->add_option("--provider", r_provider, "file | mock | remote");
    rc->add_option("--constraints", r_constraints, "directory for the file provider");
    rc->add_option("--endpoint", r_endpoint, "remote provider URL")->envname("EVPV_PROVIDER_URL");
    rc->add_option("--token", r_token, "remote bearer token")->envname("EVPV_PROVIDER_TOKEN");
    rc->add_option("--timeout", r_timeout, "remote timeout seconds");
    rc->add_option("--retries", r_retries, "remote retry count");
    rc->add_option("--out", r_out, "scored JSONL output")->required();
    rc->add_option("--errors", r_errors, "write per-instance errors to this JSONL");
    rc->add_option("--corrupt-mode", r_corrupt_mode, "corrupt fetched evidence first");
    rc->add_option("--corrupt-ratio", r_corrupt_ratio, "corruption ratio");
    rc->add_option("--corrupt-seed", r_corrupt_seed, "corruption seed");
    std::string r_tau_grid;
    rc->add_option("--tau-grid", r_tau_grid,
                   "comma-separated gate midpoints; prints one metrics line per value");
    add_common(rc, r_opts);

    auto* sc = app.add_subcommand("score", "alias of run for a file provider");
    sc->add_option("--trace", r_trace, "trace JSONL")->required();
    sc->add_option("--constraints", r_constraints, "directory of {id}.constraints.json")->required();
    sc->add_option("--out", r_out, "scored JSONL output")->required();
    add_common(sc, r_opts);

    // --- rerank -----------------------------------------------------------------
    std::string rr_scored, rr_out;
    CommonOpts rr_opts;
    auto* rr = app.add_subcommand("rerank", "rescore a scored file under another strategy/k");
    rr->add_option("--scored", rr_scored, "scored JSONL")->required();
    rr->add_option("--out", rr_out, "output JSONL")->required();
    add_common(rr, rr_opts);

    // --- corrupt ----------------------------------------------------------------
    std::string cr_input, cr_out, cr_mode = "flip_fields";
    double cr_ratio = 0.0;
    std::uint64_t cr_seed = 0;
    auto* cr = app.add_subcommand("corrupt", "corrupt a constraint file deterministically");
    cr->add_option("--input", cr_input, "constraint JSON file")->required();
    cr->add_option("--mode", cr_mode, "flip_fields | shuffle_facts | drop_facts | caption_only | empty_facts");
    cr->add_option("--ratio", cr_ratio, "share of fields/facts to touch");
    cr->add_option("--seed", cr_seed, "corruption seed");
    cr->add_option("--out", cr_out, "output file (default stdout)");

    // --- causal-curve -------------------------------------------------------------
    std::string cc_suite, cc_ratios = "0,0.25,0.5,0.75,1.0", cc_seeds = "1,2,3,4,5";
    std::string cc_out;
    CommonOpts cc_opts;
    auto* cc = app.add_subcommand("causal-curve",
                                  "step Macro-F1 as evidence corruption increases");
    cc->add_option("--suite", cc_suite, "suite directory (trace.jsonl + constraints/)")->required();
    cc->add_option("--ratios", cc_ratios, "comma-separated corruption ratios");
    cc->add_option("--seeds", cc_seeds, "comma-separated seeds");
    cc->add_option("--out", cc_out, "TSV output (default stdout)");
    add_common(cc, cc_opts);

    // --- eval-steps -----------------------------------------------------------------
    std::string es_scored, es_trace;
    auto* es = app.add_subcommand("eval-steps", "step-level Macro-F1 of a scored run");
    es->add_option("--scored", es_scored, "scored JSONL")->required();
    es->add_option("--trace", es_trace, "trace JSONL with step labels")->required();

    // --- eval-bon ---------------------------------------------------------------------
    std::string eb_scored, eb_trace;
    std::size_t eb_k = 8;
    auto* eb = app.add_subcommand("eval-bon", "answer-level selection metrics of a scored run");
    eb->add_option("--scored", eb_scored, "scored JSONL")->required();
    eb->add_option("--trace", eb_trace, "trace JSONL with gold answers")->required();
    eb->add_option("--k", eb_k, "pool size");

    // --- prefpair ---------------------------------------------------------------------
    std::string pp_gold;
    std::vector<std::string> pp_candidates;
    double pp_delta = kDefaultDelta;
    auto* pp = app.add_subcommand("prefpair", "build a preference pair from candidate extractions");
    pp->add_option("--gold", pp_gold, "gold constraint file")->required();
    pp->add_option("--candidates", pp_candidates, "two or more candidate constraint files")
        ->required()
        ->expected(-2);
    pp->add_option("--delta", pp_delta, "numeric matching tolerance");

    // --- gen-synth ---------------------------------------------------------------------
    std::string gs_out;
    SynthSpec gs_spec;
    auto* gs = app.add_subcommand("gen-synth", "generate a synthetic labelled suite");
    gs->add_option("--out", gs_out, "output directory")->required();
    gs->add_option("--questions", gs_spec.questions, "number of questions");
    gs->add_option("--candidates", gs_spec.candidates, "candidates per question");
    gs->add_option("--premise-rate", gs_spec.premise_error_rate, "premise-error probability");
    gs->add_option("--logic-rate", gs_spec.logic_error_rate, "logic-error probability");
    gs->add_option("--seed", gs_spec.seed, "generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (vc->parsed()) {
            ParseReport report;
            ConstraintSet set = parse_constraints(slurp(vc_input), "", Source::Predicted,
                                                  vc_lenient ? ParseMode::Lenient : ParseMode::Strict,
                                                  &report);
            std::cout << "ok: " << set.constraints.size() << " constraints";
            if (!report.dropped.empty()) std::cout << ", dropped " << report.dropped.size();
            std::cout << "\n";
            for (const auto& d : report.dropped)
                std::cerr << "dropped element " << d.element_index << ": " << d.message << "\n";
            return 0;
        }

        if (mc->parsed()) {
            const auto traces = load_trace(m_trace);
            FileProvider provider(m_constraints);
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!m_out.empty()) {
                file.open(m_out, std::ios::binary);
                if (!file) throw std::runtime_error("cannot write " + m_out);
                os = &file;
            }
            for (const auto& rec : traces) {
                ConstraintSet set;
                try {
                    set = provider.fetch(rec.instance_id, rec.question, rec.image_ref);
                } catch (const std::exception& e) {
                    std::cerr << "error: " << e.what() << "\n";
                    continue;
                }
                for (std::size_t ci = 0; ci < rec.candidates.size(); ++ci) {
                    const auto claims = extract_checklist(to_step_records(rec.candidates[ci]));
                    const auto results = match_checklist(claims, set, m_opts.delta);
                    for (std::size_t j = 0; j < claims.size(); ++j) {
                        ordered_json o;
                        o["instance_id"] = rec.instance_id;
                        o["candidate"] = ci;
                        o["claim"] = j;
                        o["origin_step"] = claims[j].origin_step;
                        o["raw"] = claims[j].raw;
                        o["type"] = std::string(to_string(claims[j].type()));
                        o["support"] = results[j].support;
                        if (results[j].matched_constraint)
                            o["matched_constraint"] = *results[j].matched_constraint;
                        o["rationale"] = std::string(to_string(results[j].rationale));
                        *os << o.dump() << "\n";
                    }
                }
            }
            return 0;
        }

        if (rc->parsed() || sc->parsed()) {
            const bool is_score = sc->parsed();
            const auto traces = load_trace(r_trace);
            RunConfig cfg = to_config(r_opts);
            if (!r_corrupt_mode.empty()) {
                auto mode = corruption_mode_from_string(r_corrupt_mode);
                if (!mode) throw std::runtime_error("unknown corruption mode: " + r_corrupt_mode);
                cfg.corruption = CorruptionSpec{*mode, r_corrupt_ratio, r_corrupt_seed};
            }
            auto provider = make_provider(is_score ? "file" : r_provider, r_constraints, r_endpoint,
                                          r_token, r_timeout, r_retries, r_opts.seed);
            const RunOutput out = run_verify_pipeline(traces, *provider, cfg);
            write_scored_file(r_out, out.records);
            if (!r_errors.empty()) {
                std::ofstream ef(r_errors, std::ios::binary);
                for (const auto& e : out.errors) {
                    ordered_json o;
                    o["instance_id"] = e.instance_id;
                    o["error"] = e.message;
                    ef << o.dump() << "\n";
                }
            }
            for (const auto& e : out.errors)
                std::cerr << "error: " << e.instance_id << ": " << e.message << "\n";
            std::cout << "scored " << out.records.size() << " candidates ("
                      << out.errors.size() << " instance errors) -> " << r_out << "\n";

            if (!is_score && !r_tau_grid.empty()) {
                CachingProvider shared(*provider);  // one fetch per instance across the grid
                for (const double tau : parse_double_list(r_tau_grid)) {
                    RunConfig sweep = cfg;
                    sweep.gate.tau = tau;
                    const RunOutput so = run_verify_pipeline(traces, shared, sweep);
                    std::cout << "tau=" << tau;
                    try {
                        const StepEval se = evaluate_steps(traces, so.records);
                        std::cout << " step_macro_f1=" << se.micro.macro_f1;
                    } catch (const std::exception&) {
                        // trace carries no step labels; selection metrics still apply
                    }
                    const BonEval be = evaluate_bon(traces, so.records, sweep.k);
                    std::cout << " bon@" << sweep.k << "=" << be.micro.bon_at_k
                              << " pass@1=" << be.micro.pass_at_1 << "\n";
                }
            }
            return out.errors.empty() ? 0 : 3;
        }

        if (rr->parsed()) {
            auto records = read_scored_file(rr_scored);
            auto st = aggregation_from_string(rr_opts.strategy);
            if (!st) throw std::runtime_error("unknown strategy: " + rr_opts.strategy);
            rerank_scored(records, *st, rr_opts.k);
            write_scored_file(rr_out, records);
            std::cout << "reranked " << records.size() << " candidates -> " << rr_out << "\n";
            return 0;
        }

        if (cr->parsed()) {
            auto mode = corruption_mode_from_string(cr_mode);
            if (!mode) throw std::runtime_error("unknown corruption mode: " + cr_mode);
            ConstraintSet set = parse_constraints(slurp(cr_input));
            const ConstraintSet out = corrupt_constraints(set, {*mode, cr_ratio, cr_seed});
            const std::string text = emit_constraints(out);
            if (cr_out.empty()) {
                std::cout << text << "\n";
            } else {
                std::ofstream f(cr_out, std::ios::binary);
                if (!f) throw std::runtime_error("cannot write " + cr_out);
                f << text << "\n";
            }
            return 0;
        }

        if (cc->parsed()) {
            const Suite suite = read_suite(cc_suite);
            const auto points =
                causal_curve(suite, parse_double_list(cc_ratios), parse_seed_list(cc_seeds),
                             to_config(cc_opts));
            std::ostream* os = &std::cout;
            std::ofstream file;
            if (!cc_out.empty()) {
                file.open(cc_out, std::ios::binary);
                os = &file;
            }
            *os << "ratio\tmean_macro_f1\tstddev\n";
            for (const auto& p : points)
                *os << p.ratio << "\t" << p.mean_macro_f1 << "\t" << p.stddev_macro_f1 << "\n";
            return 0;
        }

        if (es->parsed()) {
            const auto traces = load_trace(es_trace, true);
            const auto records = read_scored_file(es_scored);
            const StepEval eval = evaluate_steps(traces, records);
            std::cout << "pairs=" << eval.pairs << "\n";
            std::cout << "overall_micro macro_f1=" << eval.micro.macro_f1
                      << " accuracy=" << eval.micro.accuracy
                      << " f1_correct=" << eval.micro.class_f1[0]
                      << " f1_incorrect=" << eval.micro.class_f1[1]
                      << (eval.micro.degenerate_class ? " (degenerate class)" : "") << "\n";
            for (const auto& [name, m] : eval.per_benchmark)
                std::cout << name << " macro_f1=" << m.macro_f1 << " accuracy=" << m.accuracy
                          << "\n";
            std::cout << "overall_macro macro_f1=" << eval.macro_over_benchmarks << "\n";
            return 0;
        }

        if (eb->parsed()) {
            const auto traces = load_trace(eb_trace, true);
            const auto records = read_scored_file(eb_scored);
            const BonEval eval = evaluate_bon(traces, records, eb_k);
            std::cout << "questions=" << eval.questions << "\n";
            print_selection("overall_micro", eval.micro);
            for (const auto& [name, m] : eval.per_benchmark) print_selection(name.c_str(), m);
            print_selection("overall_macro", eval.macro);
            return 0;
        }

        if (pp->parsed()) {
            const ConstraintSet gold = parse_constraints(slurp(pp_gold), "", Source::Gold);
            std::vector<ConstraintSet> candidates;
            for (const auto& path : pp_candidates)
                candidates.push_back(parse_constraints(slurp(path)));
            const PreferencePair pair = build_preference_pair(candidates, gold, pp_delta);
            ordered_json o;
            o["preferred"] = pair.preferred;
            o["preferred_file"] = pp_candidates[pair.preferred];
            o["preferred_distance"] = pair.preferred_distance;
            o["rejected"] = pair.rejected;
            o["rejected_file"] = pp_candidates[pair.rejected];
            o["rejected_distance"] = pair.rejected_distance;
            o["degenerate"] = pair.degenerate;
            std::cout << o.dump(2) << "\n";
            return 0;
        }

        if (gs->parsed()) {
            const Suite suite = gen_synthetic_suite(gs_spec);
            write_suite(gs_out, suite);
            std::cout << "wrote " << suite.traces.size() << " questions to " << gs_out << "\n";
            return 0;
        }
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
