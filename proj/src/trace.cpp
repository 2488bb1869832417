#include "evpv/trace.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace evpv {

using ordered_json = nlohmann::ordered_json;

namespace {

// A malformed candidate is kept (flagged) rather than dropped, so that the
// parse-failure policy can still hand it a pseudo-trajectory.
TraceCandidate parse_candidate(const ordered_json& j, std::vector<std::string>& warnings,
                               std::size_t cand_index) {
    TraceCandidate c;
    auto fail = [&](const std::string& why) {
        warnings.push_back("candidate " + std::to_string(cand_index) + ": " + why);
        c.parse_failed = true;
        return c;
    };

    if (!j.is_object()) return fail("not an object");
    if (j.contains("steps") && j["steps"].is_array()) c.declared_steps = j["steps"].size();
    if (!j.contains("steps") || !j["steps"].is_array()) return fail("missing steps array");
    if (!j.contains("finalanswer") || !j["finalanswer"].is_string())
        return fail("missing finalanswer");
    c.final_answer = j["finalanswer"].get<std::string>();

    for (const auto& sj : j["steps"]) {
        if (!sj.is_object() || !sj.contains("steptext") || !sj["steptext"].is_string()) {
            c.steps.clear();
            return fail("malformed step entry");
        }
        TraceStep s;
        s.text = sj["steptext"].get<std::string>();
        if (sj.contains("visualdependency") && sj["visualdependency"].is_string()) {
            std::string d = sj["visualdependency"].get<std::string>();
            if (!d.empty()) s.declaration = std::move(d);
        }
        if (sj.contains("judge")) {
            if (sj["judge"].is_number_integer()) {
                const int v = sj["judge"].get<int>();
                if (v == 1 || v == -1)
                    s.judge = v;
                else
                    warnings.push_back("candidate " + std::to_string(cand_index) +
                                       ": judge must be 1 or -1, ignored");
            } else {
                warnings.push_back("candidate " + std::to_string(cand_index) +
                                   ": non-integer judge, ignored");
            }
        }
        if (sj.contains("base_u")) {
            if (sj["base_u"].is_number()) {
                double u = sj["base_u"].get<double>();
                s.base_u = std::min(std::max(u, 0.0), 1.0);
            } else {
                warnings.push_back("candidate " + std::to_string(cand_index) +
                                   ": non-numeric base_u, ignored");
            }
        }
        c.steps.push_back(std::move(s));
    }
    return c;
}

std::optional<std::vector<int>> parse_labels(const ordered_json& j) {
    // an empty list carries no information, same as an absent field
    if (!j.is_array() || j.empty()) return std::nullopt;
    std::vector<int> out;
    for (const auto& e : j) {
        if (!e.is_number_integer()) return std::nullopt;
        const int v = e.get<int>();
        if (v != 1 && v != -1) return std::nullopt;
        out.push_back(v);
    }
    return out;
}

}  // namespace

TraceFile parse_trace_text(const std::string& text) {
    TraceFile out;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            out.errors.push_back({lineno, std::string("bad JSON: ") + e.what()});
            continue;
        }
        if (!j.is_object() || !j.contains("instance_id") || !j["instance_id"].is_string()) {
            out.errors.push_back({lineno, "record must be an object with a string instance_id"});
            continue;
        }

        TraceRecord rec;
        rec.instance_id = j["instance_id"].get<std::string>();
        auto str_or_empty = [&](const char* key) {
            return j.contains(key) && j[key].is_string() ? j[key].get<std::string>() : std::string();
        };
        rec.question = str_or_empty("question");
        rec.image_ref = str_or_empty("image_ref");
        rec.gold_answer = str_or_empty("gold_answer");
        if (j.contains("benchmark") && j["benchmark"].is_string())
            rec.benchmark = j["benchmark"].get<std::string>();

        if (!j.contains("candidates") || !j["candidates"].is_array() || j["candidates"].empty()) {
            out.errors.push_back({lineno, rec.instance_id + ": missing candidates"});
            continue;
        }
        std::vector<std::string> warnings;
        for (std::size_t i = 0; i < j["candidates"].size(); ++i)
            rec.candidates.push_back(parse_candidate(j["candidates"][i], warnings, i));

        // gold labels: either a record-level list of lists, or a per-candidate field
        if (j.contains("step_labels") && j["step_labels"].is_array()) {
            const auto& L = j["step_labels"];
            for (std::size_t i = 0; i < rec.candidates.size() && i < L.size(); ++i)
                rec.candidates[i].step_labels = parse_labels(L[i]);
        }
        for (std::size_t i = 0; i < rec.candidates.size(); ++i) {
            const auto& cj = j["candidates"][i];
            if (cj.is_object() && cj.contains("step_labels"))
                rec.candidates[i].step_labels = parse_labels(cj["step_labels"]);
        }

        for (const auto& w : warnings) out.errors.push_back({lineno, rec.instance_id + ": " + w});
        out.records.push_back(std::move(rec));
    }
    return out;
}

TraceFile read_trace_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace_text(buf.str());
}

std::string trace_record_to_json(const TraceRecord& record) {
    ordered_json j;
    j["instance_id"] = record.instance_id;
    j["question"] = record.question;
    j["image_ref"] = record.image_ref;
    j["gold_answer"] = record.gold_answer;
    if (record.benchmark) j["benchmark"] = *record.benchmark;

    ordered_json cands = ordered_json::array();
    bool any_labels = false;
    for (const auto& c : record.candidates) {
        ordered_json cj;
        ordered_json steps = ordered_json::array();
        for (const auto& s : c.steps) {
            ordered_json sj;
            sj["steptext"] = s.text;
            sj["visualdependency"] = s.declaration ? ordered_json(*s.declaration) : ordered_json(nullptr);
            if (s.judge) sj["judge"] = *s.judge;
            if (s.base_u) sj["base_u"] = *s.base_u;
            steps.push_back(std::move(sj));
        }
        cj["steps"] = std::move(steps);
        cj["finalanswer"] = c.final_answer;
        cands.push_back(std::move(cj));
        any_labels = any_labels || c.step_labels.has_value();
    }
    j["candidates"] = std::move(cands);

    if (any_labels) {
        ordered_json labels = ordered_json::array();
        for (const auto& c : record.candidates)
            labels.push_back(c.step_labels ? ordered_json(*c.step_labels) : ordered_json::array());
        j["step_labels"] = std::move(labels);
    }
    return j.dump();
}

void write_trace_file(const std::filesystem::path& path, const std::vector<TraceRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path.string());
    for (const auto& r : records) out << trace_record_to_json(r) << "\n";
}

std::vector<StepRecord> to_step_records(const TraceCandidate& candidate) {
    std::vector<StepRecord> out;
    out.reserve(candidate.steps.size());
    for (std::size_t i = 0; i < candidate.steps.size(); ++i) {
        StepRecord s;
        s.index = static_cast<int>(i + 1);
        s.text = candidate.steps[i].text;
        s.declaration = candidate.steps[i].declaration;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace evpv
