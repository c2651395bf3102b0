#pragma once

#include <string>
#include <string_view>

#include "subsearch/rewards.hpp"

namespace subsearch {

enum class AggregationKind { WeightedSum, Residual, AdaptiveResidual };

std::string_view aggregation_kind_name(AggregationKind kind);
AggregationKind aggregation_kind_from_name(std::string_view name);

// beta_t tracks an EMA of the batch failure rate (1 - mean answer reward),
// mapped affinely onto [beta_min, beta_max]. Single-writer: only
// advance_beta produces new states, once per scoring batch.
struct AdaptiveBetaState {
    double ema = 0.5;
    double gamma = 0.9;
    double beta_min = 0.0;
    double beta_max = 1.0;
    long step = 0;

    double beta_t() const { return beta_min + (beta_max - beta_min) * ema; }
};

struct AggregationPolicy {
    AggregationKind kind = AggregationKind::AdaptiveResidual;
    double alpha_w = 0.5; // answer weight, WeightedSum only
    double beta = 0.5;    // fixed beta, WeightedSum / Residual
    AdaptiveBetaState adaptive; // AdaptiveResidual only
};

// 1/2 (avg answerability + avg decomposition).
double intermediate_scalar(const RewardBreakdown& b);

// WeightedSum:      alpha_w * r_answer + beta * intermediate + r_format
// Residual:         r_answer + beta * intermediate * (1 - r_answer) + r_format
// AdaptiveResidual: Residual with beta_t from the adaptive state.
// Never advances the adaptive state.
double aggregate(const AggregationPolicy& policy, const RewardBreakdown& b);

// ema' = gamma * ema + (1 - gamma) * (1 - batch_mean_answer_reward).
// Throws std::invalid_argument outside [0, 1].
AdaptiveBetaState advance_beta(const AdaptiveBetaState& state, double batch_mean_answer_reward);

} // namespace subsearch
