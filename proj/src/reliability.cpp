#include "evpv/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evpv {

void GateConfig::validate() const {
    if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must be in [0, 1]");
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (!(epsilon > 0.0 && epsilon < 1e-3))
        throw std::invalid_argument("epsilon must be in (0, 1e-3)");
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double aggregate_reliability(std::span<const double> supports, double epsilon) {
    if (supports.empty()) return 1.0;
    double acc = 0.0;
    for (double p : supports) acc += std::log(epsilon + p);
    const double r = std::exp(acc / static_cast<double>(supports.size()));
    return std::clamp(r, 0.0, 1.0);
}

double gate(double r, const GateConfig& cfg) {
    cfg.validate();
    return sigmoid(cfg.beta * (r - cfg.tau));
}

double base_reward(double u) { return 2.0 * u - 1.0; }

std::vector<double> calibrate_step_rewards(std::span<const double> base_rewards,
                                           std::span<const int> visual_flags, double alpha) {
    if (base_rewards.size() != visual_flags.size())
        throw std::invalid_argument("base_rewards and visual_flags length mismatch");
    std::vector<double> out(base_rewards.begin(), base_rewards.end());
    for (std::size_t t = 0; t < out.size(); ++t)
        if (visual_flags[t]) out[t] *= alpha;
    return out;
}

std::vector<double> apply_empty_evidence_fallback(std::vector<double> supports,
                                                  bool evidence_empty) {
    if (evidence_empty)
        std::fill(supports.begin(), supports.end(), 0.5);
    return supports;
}

ReliabilityReport make_reliability_report(std::vector<double> supports, const GateConfig& cfg) {
    ReliabilityReport rep;
    rep.supports = std::move(supports);
    rep.r = aggregate_reliability(rep.supports, cfg.epsilon);
    rep.alpha = gate(rep.r, cfg);
    return rep;
}

}  // namespace evpv
