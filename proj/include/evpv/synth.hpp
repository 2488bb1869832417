#pragma once

#include <cstdint>
#include <filesystem>

#include "evpv/pipeline.hpp"

namespace evpv {

// ---------------------------------------------------------------------------
// Synthetic evaluation suites: composite-solid measurement questions with a
// known answer, gold facts, and candidate solutions planted with controlled
// error types.
//
//  - premise errors: a visual step misreads a quantity by a factor of two
//    but stays fluent (the planted judge still says the step is fine);
//  - logic errors: the reads are right, the arithmetic afterwards is wrong,
//    and the judge catches it.
//
// Every planted error flips the final answer, so answer-level and step-level
// ground truth stay consistent.
// ---------------------------------------------------------------------------

struct SynthSpec {
    std::size_t questions = 200;
    std::size_t candidates = 8;
    double premise_error_rate = 0.0;  // per-candidate probability
    double logic_error_rate = 0.0;
    std::uint64_t seed = 0;
};

Suite gen_synthetic_suite(const SynthSpec& spec);

// dir/trace.jsonl plus dir/constraints/{instance}.constraints.json
void write_suite(const std::filesystem::path& dir, const Suite& suite);
Suite read_suite(const std::filesystem::path& dir);

}  // namespace evpv
