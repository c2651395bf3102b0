#pragma once

#include <memory>
#include <string>

#include "subsearch/aggregation.hpp"
#include "subsearch/embedder.hpp"
#include "subsearch/rewards.hpp"

namespace subsearch {

struct EmbedderSection {
    std::string kind = "reference_hashed"; // reference_hashed | external_service
    int dim = 256;                          // reference_hashed only, >= 8
    std::string endpoint;                   // external_service only
    std::string model;
    int timeout_ms = 5000;
    int batch = 32;
};

struct AggregationSection {
    std::string policy = "adaptive_residual"; // weighted_sum | residual | adaptive_residual
    double alpha_w = 0.5;
    double beta = 0.5;
    double gamma = 0.9;
    double beta_min = 0.0;
    double beta_max = 1.0;
};

struct GrpoSection {
    int group_size = 5;
    double epsilon = 1e-8;
};

struct HarnessSection {
    int max_turns = 4;
    unsigned long long seed = 0;
    int doc_char_budget = 1200; // bytes per rendered doc group, 0 = unlimited
};

struct RunConfig {
    EmbedderSection embedder;
    RewardConfig reward;
    AggregationSection aggregation;
    GrpoSection grpo;
    HarnessSection harness;

    // Stable 64-bit digest of every resolved key, embedded in reports.
    std::string fingerprint() const;
};

// INI-style file with sections [embedder] [reward] [aggregation] [grpo]
// [harness]. Unknown sections or keys raise InputError naming the offender;
// omitted keys keep their defaults.
RunConfig load_config(const std::string& path);

// Environment variable that overrides [embedder].endpoint.
inline constexpr const char* kEmbedEndpointEnvVar = "SUBSEARCH_EMBED_ENDPOINT";

// Instantiates the configured provider, applying the endpoint override.
std::unique_ptr<EmbeddingProvider> make_provider(const EmbedderSection& section);

AggregationPolicy make_aggregation_policy(const AggregationSection& section);

} // namespace subsearch
