#pragma once

#include <span>
#include <vector>

namespace evpv {

// ---------------------------------------------------------------------------
// Visual-reliability aggregation and reward gating.
//
//   r     = exp( (1/M) * sum_j log(eps + p_j) ),  clamped to [0, 1]
//   alpha = sigmoid( beta * (r - tau) )
//   base  = 2u - 1
//   gated = base            for steps without a visual declaration
//         = alpha * base    for steps with one
//
// The log-space form keeps r stable for long checklists; an empty checklist
// aggregates to r = 1 (nothing visual was asserted, nothing to distrust).
// ---------------------------------------------------------------------------

struct GateConfig {
    double tau = 0.5;      // gate midpoint
    double beta = 10.0;    // gate steepness
    double epsilon = 1e-6; // log floor

    void validate() const;  // throws std::invalid_argument
};

double aggregate_reliability(std::span<const double> supports, double epsilon = 1e-6);

double gate(double r, const GateConfig& cfg = {});

double sigmoid(double x);

// Maps a step-correctness probability u in [0, 1] to a reward in [-1, 1].
double base_reward(double u);

// Applies the gate to the visually-dependent steps only.
// visual_flags[t] != 0 marks step t as declaring a visual premise.
std::vector<double> calibrate_step_rewards(std::span<const double> base_rewards,
                                           std::span<const int> visual_flags, double alpha);

// When a provider returns a literally empty constraint set there is no
// evidence either way, so the whole checklist falls back to neutral 0.5
// support instead of the per-claim zeros strict matching would produce.
std::vector<double> apply_empty_evidence_fallback(std::vector<double> supports,
                                                  bool evidence_empty);

struct ReliabilityReport {
    std::vector<double> supports;
    double r = 1.0;
    double alpha = 1.0;
};

ReliabilityReport make_reliability_report(std::vector<double> supports, const GateConfig& cfg = {});

}  // namespace evpv
