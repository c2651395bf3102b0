#include "subsearch/grpo.hpp"

#include <cmath>
#include <stdexcept>

namespace subsearch {

std::vector<double> group_advantages(const std::vector<double>& rewards, double epsilon) {
    if (rewards.size() < 2) {
        throw std::invalid_argument("group_advantages: needs >= 2 rewards, got " +
                                    std::to_string(rewards.size()));
    }
    const double n = static_cast<double>(rewards.size());
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= n;

    double variance = 0.0;
    for (double r : rewards) variance += (r - mean) * (r - mean);
    variance /= n; // population variance
    const double denom = std::sqrt(variance) + epsilon;

    std::vector<double> advantages;
    advantages.reserve(rewards.size());
    for (double r : rewards) advantages.push_back((r - mean) / denom);
    return advantages;
}

} // namespace subsearch
