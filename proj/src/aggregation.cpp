#include "subsearch/aggregation.hpp"

#include <stdexcept>

namespace subsearch {

std::string_view aggregation_kind_name(AggregationKind kind) {
    switch (kind) {
    case AggregationKind::WeightedSum: return "weighted_sum";
    case AggregationKind::Residual: return "residual";
    case AggregationKind::AdaptiveResidual: return "adaptive_residual";
    }
    return "unknown";
}

AggregationKind aggregation_kind_from_name(std::string_view name) {
    if (name == "weighted_sum") return AggregationKind::WeightedSum;
    if (name == "residual") return AggregationKind::Residual;
    if (name == "adaptive_residual") return AggregationKind::AdaptiveResidual;
    throw std::invalid_argument("unknown aggregation policy \"" + std::string(name) +
                                "\" (valid: weighted_sum, residual, adaptive_residual)");
}

double intermediate_scalar(const RewardBreakdown& b) {
    return 0.5 * (b.avg_answerability + b.avg_decomposition);
}

double aggregate(const AggregationPolicy& policy, const RewardBreakdown& b) {
    const double intermediate = intermediate_scalar(b);
    switch (policy.kind) {
    case AggregationKind::WeightedSum:
        return policy.alpha_w * b.r_answer + policy.beta * intermediate + b.r_format;
    case AggregationKind::Residual:
        return b.r_answer + policy.beta * intermediate * (1.0 - b.r_answer) + b.r_format;
    case AggregationKind::AdaptiveResidual:
        return b.r_answer + policy.adaptive.beta_t() * intermediate * (1.0 - b.r_answer) +
               b.r_format;
    }
    throw std::logic_error("aggregate: unhandled policy kind");
}

AdaptiveBetaState advance_beta(const AdaptiveBetaState& state, double batch_mean_answer_reward) {
    if (!(batch_mean_answer_reward >= 0.0 && batch_mean_answer_reward <= 1.0)) {
        throw std::invalid_argument("advance_beta: batch mean answer reward must lie in [0, 1]");
    }
    AdaptiveBetaState next = state;
    next.ema = state.gamma * state.ema + (1.0 - state.gamma) * (1.0 - batch_mean_answer_reward);
    next.step = state.step + 1;
    return next;
}

} // namespace subsearch
