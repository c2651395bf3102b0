#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subsearch/aggregation.hpp"
#include "subsearch/config.hpp"
#include "subsearch/grpo.hpp"
#include "subsearch/search_env.hpp"

namespace subsearch {

enum class PolicyKind { Replay, TemplateDecompose, TemplateMonolithic };

std::string_view policy_kind_name(PolicyKind kind);
std::optional<PolicyKind> policy_kind_from_name(std::string_view name);
std::vector<std::string> policy_kind_names();

struct PolicyAction {
    TurnKind kind = TurnKind::Think;
    std::string text;                    // Think / Answer content
    std::vector<std::string> subqueries; // Search
    std::vector<DocGroup> doc_groups;    // Information supplied by the script
};

// Deterministic stand-ins for a trained policy. Replay re-emits a recorded
// trace (its information turns bypass retrieval); the template policies
// derive searches from the question and read their answer off the retrieved
// documents unless answer_slot is set. perturbation_seed varies phrasing
// (and, for Replay, occasionally blanks the answer) so rollout groups have
// spread.
struct ScriptedPolicy {
    PolicyKind kind = PolicyKind::TemplateDecompose;
    std::vector<PolicyAction> script; // Replay only; ends with exactly one Answer
    std::optional<std::string> answer_slot;
    int perturbation_seed = 0;

    // Throws std::invalid_argument unless the trace ends with exactly one
    // Answer action.
    static ScriptedPolicy replay_of(const ReasoningTrace& trace, int seed = 0);
    static ScriptedPolicy template_decompose(std::optional<std::string> answer = std::nullopt,
                                             int seed = 0);
    static ScriptedPolicy template_monolithic(std::optional<std::string> answer = std::nullopt,
                                              int seed = 0);
};

struct Episode {
    std::string question;
    ReasoningTrace trace; // parse of raw, by construction
    std::string raw;
    RewardBreakdown breakdown;
    double aggregated = 0.0;
};

// Drives one reasoning-search loop: policy action, then retrieval and
// information rendering after each search, until Answer or max_turns search
// rounds (then a forced empty answer). corpus may be null when every search
// is covered by scripted information.
Episode run_episode(const std::string& question, const std::vector<std::string>& golden,
                    const ScriptedPolicy& policy, const Corpus* corpus,
                    const EmbeddingProvider& provider, const RewardConfig& reward_cfg,
                    const AggregationPolicy& agg_policy, const HarnessSection& harness_cfg);

struct BatchReport {
    std::vector<RolloutGroup> groups;
    std::string policy_name;
    std::string config_fingerprint;
    int group_size = 5;
    unsigned long long seed = 0;
    double beta_t_used = 0.0; // beta_t every episode aggregated under
    AdaptiveBetaState beta_after;
    double mean_answer = 0.0;
    double mean_aggregated = 0.0;
};

// G episodes per dataset question (copies of prototype with per-episode
// perturbation seeds), advantages per group, and a single adaptive-beta
// advance after the whole batch is aggregated.
BatchReport run_batch(const std::string& dataset_path, const ScriptedPolicy& prototype,
                      const Corpus& corpus, const EmbeddingProvider& provider,
                      const RunConfig& cfg);

// Versioned report JSON (schema_version 1); stable key order and number
// formatting, so fixed seeds reproduce byte-identical files.
std::string report_to_json(const BatchReport& report);

} // namespace subsearch
