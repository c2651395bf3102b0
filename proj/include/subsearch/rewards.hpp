#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "subsearch/embedder.hpp"
#include "subsearch/parser.hpp"
#include "subsearch/trace.hpp"

namespace subsearch {

struct RewardConfig {
    int k = 3;                      // docs entering the answerability mean
    double alpha = 0.5;             // coverage weight
    double beta_split = 0.5;        // split weight
    double lambda_structure = 0.1;
    double lambda_retrieval = 0.1;
    bool clamp_negative_sims = true; // clamp cosines to [0,1] before use
};

struct LeafReward {
    std::string node_id;
    double value = 0.0;
};

struct EventReward {
    std::string parent_node_id;
    double r_coverage = 0.0;
    double r_split = 0.0;
    double r_decomp = 0.0;
};

struct RewardBreakdown {
    double r_answer = 0.0; // 0 or 1
    std::vector<LeafReward> answerability_per_leaf;
    std::vector<EventReward> decomposition_per_event;
    double r_format = 0.0;
    double avg_answerability = 0.0; // mean of leaves, 0 when none
    double avg_decomposition = 0.0; // mean of event r_decomp, 0 when none
    bool f_format = false;
    bool f_retrieval = false;
    bool has_answer = false;
    std::vector<std::string> notes;
};

// Open-domain QA answer normalization: lowercase, strip punctuation, drop
// the articles a/an/the, collapse whitespace.
std::string normalize_answer(std::string_view text);

// 1.0 iff the normalized generated answer equals any normalized gold answer.
double answer_reward(std::string_view generated, const std::vector<std::string>& golden);

// Mean cosine between the query vector and the first min(k, n) vectors of a
// ranked doc list; cosines clamped to [0,1] when clamp is set.
double answerability_from_embeddings(const Embedding& query,
                                     const std::vector<Embedding>& ranked_docs,
                                     int k, bool clamp);

struct DecompositionScore {
    double r_coverage = 0.0;
    double r_split = 0.0;
    double r_decomp = 0.0;
};

// Coverage: cosine(parent, normalized mean of children). Split: mean over
// children of relevance-to-parent times (1 - mean similarity to siblings),
// each term clamped to [0,1]. Requires >= 2 children.
DecompositionScore decomposition_from_embeddings(const Embedding& parent,
                                                 const std::vector<Embedding>& children,
                                                 const RewardConfig& cfg);

// Node-level wrappers. answerability_reward requires node.docs non-empty;
// doc text is title + " " + body and the list order is the rank order.
double answerability_reward(const DecompNode& node, const EmbeddingProvider& provider,
                            const RewardConfig& cfg);

DecompositionScore decomposition_reward(const DecompositionTree& tree, const DecompEvent& event,
                                        const EmbeddingProvider& provider,
                                        const RewardConfig& cfg);

// 0 / lambda_structure / lambda_structure + lambda_retrieval by flag pair.
double format_reward(const ParseReport& report, const RewardConfig& cfg);

// Full scoring pipeline over one raw rollout. Documents come from the
// trace's information turns, never from fresh retrieval, so the score
// reflects what the rollout actually conditioned on. Degenerate traces
// yield zeroed components plus notes; never throws on trace content.
RewardBreakdown score_trace(std::string_view raw, std::string_view question,
                            const std::vector<std::string>& golden,
                            const EmbeddingProvider& provider, const RewardConfig& cfg);

} // namespace subsearch
