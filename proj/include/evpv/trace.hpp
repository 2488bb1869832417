#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evpv/claims.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Reasoning-trace files: one JSON object per line, one object per question.
// Each candidate solution is a list of steps; a step may declare the visual
// fact it relies on.  Optional per-step fields carry an external judgement
// (judge: 1 / -1) or a direct correctness probability (base_u in [0, 1]).
// ---------------------------------------------------------------------------

struct TraceStep {
    std::string text;
    std::optional<std::string> declaration;  // "visualdependency"; null/absent => none
    std::optional<int> judge;                // external verdict for the step
    std::optional<double> base_u;            // overrides everything else when present
};

struct TraceCandidate {
    std::vector<TraceStep> steps;
    std::string final_answer;
    std::optional<std::vector<int>> step_labels;  // gold +-1 per step, when known
    bool parse_failed = false;     // malformed candidate; scored by the failure policy
    std::size_t declared_steps = 0;  // step count visible in the raw input
};

struct TraceRecord {
    std::string instance_id;
    std::string question;
    std::string image_ref;
    std::string gold_answer;
    std::optional<std::string> benchmark;
    std::vector<TraceCandidate> candidates;
};

struct TraceError {
    std::size_t line = 0;  // 1-based line number
    std::string message;
};

struct TraceFile {
    std::vector<TraceRecord> records;
    std::vector<TraceError> errors;
};

// Reads a JSONL trace.  Unreadable lines and malformed records are reported
// in `errors`; malformed candidates survive as parse_failed entries so the
// failure policy can score them.  Throws std::runtime_error if the file
// cannot be opened.
TraceFile read_trace_file(const std::filesystem::path& path);

TraceFile parse_trace_text(const std::string& text);

// Writes records back out, one per line, byte-deterministically.
void write_trace_file(const std::filesystem::path& path, const std::vector<TraceRecord>& records);

std::string trace_record_to_json(const TraceRecord& record);

// 1-based StepRecords for checklist extraction.
std::vector<StepRecord> to_step_records(const TraceCandidate& candidate);

}  // namespace evpv
