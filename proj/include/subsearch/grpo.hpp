#pragma once

#include <string>
#include <vector>

#include "subsearch/rewards.hpp"

namespace subsearch {

struct Rollout {
    std::string raw;
    RewardBreakdown breakdown;
    double aggregated = 0.0;
    double advantage = 0.0;
    int perturbation_seed = 0;
};

// G rollouts for one question. |rollouts| >= 2.
struct RolloutGroup {
    std::string question;
    std::vector<std::string> golden;
    std::vector<Rollout> rollouts;
};

// Group-relative advantages: (r_i - mean) / (population std + epsilon).
// Throws std::invalid_argument for fewer than 2 rewards.
std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon = 1e-8);

} // namespace subsearch
