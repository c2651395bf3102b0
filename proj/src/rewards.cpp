#include "subsearch/rewards.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace subsearch {

namespace {

bool is_ascii_punct(unsigned char c) {
    return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
           (c >= '{' && c <= '~');
}

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double maybe_clamp(double sim, bool clamp) { return clamp ? clamp01(sim) : sim; }

double mean_or_zero(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

std::string doc_text(const RetrievedDoc& doc) { return doc.title + " " + doc.body; }

} // namespace

std::string normalize_answer(std::string_view text) {
    // lowercase -> drop punctuation -> drop articles -> collapse whitespace
    std::string cleaned;
    cleaned.reserve(text.size());
    for (unsigned char c : text) {
        if (is_ascii_punct(c)) continue;
        if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c + ('a' - 'A'));
        cleaned.push_back(static_cast<char>(c));
    }

    std::string out;
    std::size_t i = 0;
    while (i < cleaned.size()) {
        while (i < cleaned.size() && is_ascii_space(static_cast<unsigned char>(cleaned[i]))) ++i;
        std::size_t j = i;
        while (j < cleaned.size() && !is_ascii_space(static_cast<unsigned char>(cleaned[j]))) ++j;
        const std::string_view token = std::string_view(cleaned).substr(i, j - i);
        if (!token.empty() && token != "a" && token != "an" && token != "the") {
            if (!out.empty()) out.push_back(' ');
            out.append(token);
        }
        i = j;
    }
    return out;
}

double answer_reward(std::string_view generated, const std::vector<std::string>& golden) {
    const std::string normalized = normalize_answer(generated);
    for (const std::string& gold : golden) {
        if (normalized == normalize_answer(gold)) return 1.0;
    }
    return 0.0;
}

double answerability_from_embeddings(const Embedding& query,
                                     const std::vector<Embedding>& ranked_docs, int k,
                                     bool clamp) {
    if (k < 1) throw std::invalid_argument("answerability: k must be >= 1");
    if (ranked_docs.empty()) throw std::invalid_argument("answerability: no documents");
    const std::size_t take = std::min(ranked_docs.size(), static_cast<std::size_t>(k));
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) {
        sum += maybe_clamp(cosine(query, ranked_docs[i]), clamp);
    }
    return sum / static_cast<double>(take);
}

DecompositionScore decomposition_from_embeddings(const Embedding& parent,
                                                 const std::vector<Embedding>& children,
                                                 const RewardConfig& cfg) {
    const std::size_t n = children.size();
    if (n < 2) throw std::invalid_argument("decomposition: needs >= 2 children");

    std::vector<double> mean(parent.dim(), 0.0);
    for (const Embedding& child : children) {
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += child.values[d];
    }
    for (double& x : mean) x /= static_cast<double>(n);

    DecompositionScore score;
    score.r_coverage =
        maybe_clamp(cosine(parent, Embedding::normalized(std::move(mean))), cfg.clamp_negative_sims);

    double split_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double relevance =
            maybe_clamp(cosine(parent, children[i]), cfg.clamp_negative_sims);
        double sibling_sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            sibling_sum += maybe_clamp(cosine(children[i], children[j]), cfg.clamp_negative_sims);
        }
        const double uniqueness = 1.0 - sibling_sum / static_cast<double>(n - 1);
        split_sum += clamp01(relevance * uniqueness); // term clamp is unconditional
    }
    score.r_split = split_sum / static_cast<double>(n);
    score.r_decomp = cfg.alpha * score.r_coverage + cfg.beta_split * score.r_split;
    return score;
}

double answerability_reward(const DecompNode& node, const EmbeddingProvider& provider,
                            const RewardConfig& cfg) {
    if (!node.docs.has_value() || node.docs->empty()) {
        throw std::invalid_argument("answerability_reward: node " + node.id() + " has no docs");
    }
    std::vector<std::string> texts;
    texts.reserve(node.docs->size() + 1);
    texts.push_back(node.query_text);
    for (const RetrievedDoc& doc : *node.docs) texts.push_back(doc_text(doc));
    const std::vector<Embedding> embeddings = provider.embed(texts);
    const std::vector<Embedding> doc_embeddings(embeddings.begin() + 1, embeddings.end());
    return answerability_from_embeddings(embeddings.front(), doc_embeddings, cfg.k,
                                         cfg.clamp_negative_sims);
}

DecompositionScore decomposition_reward(const DecompositionTree& tree, const DecompEvent& event,
                                        const EmbeddingProvider& provider,
                                        const RewardConfig& cfg) {
    std::vector<std::string> texts;
    texts.reserve(event.children.size() + 1);
    texts.push_back(tree.nodes[event.parent].query_text);
    for (std::size_t child : event.children) texts.push_back(tree.nodes[child].query_text);
    const std::vector<Embedding> embeddings = provider.embed(texts);
    const std::vector<Embedding> child_embeddings(embeddings.begin() + 1, embeddings.end());
    return decomposition_from_embeddings(embeddings.front(), child_embeddings, cfg);
}

double format_reward(const ParseReport& report, const RewardConfig& cfg) {
    if (!report.f_format) return 0.0;
    if (!report.f_retrieval) return cfg.lambda_structure;
    return cfg.lambda_structure + cfg.lambda_retrieval;
}

RewardBreakdown score_trace(std::string_view raw, std::string_view question,
                            const std::vector<std::string>& golden,
                            const EmbeddingProvider& provider, const RewardConfig& cfg) {
    const ParseReport report = parse_trace(raw, question);

    RewardBreakdown b;
    b.f_format = report.f_format;
    b.f_retrieval = report.f_retrieval;
    b.has_answer = report.trace.answer.has_value();
    if (b.has_answer) {
        b.r_answer = answer_reward(*report.trace.answer, golden);
    } else {
        b.r_answer = 0.0;
        b.notes.push_back("no answer turn; outcome reward 0");
    }
    b.r_format = format_reward(report, cfg);

    const DecompositionTree tree = build_decomposition_tree(report.trace, provider);
    b.notes.insert(b.notes.end(), tree.notes.begin(), tree.notes.end());

    std::vector<double> leaf_values;
    for (std::size_t node_idx : searched_leaves(tree)) {
        const DecompNode& node = tree.nodes[node_idx];
        double value = 0.0;
        if (node.docs->empty()) {
            b.notes.push_back("node " + node.id() + " has an empty doc group; answerability 0");
        } else {
            value = answerability_reward(node, provider, cfg);
        }
        b.answerability_per_leaf.push_back(LeafReward{node.id(), value});
        leaf_values.push_back(value);
    }
    b.avg_answerability = mean_or_zero(leaf_values);

    std::vector<double> event_values;
    for (const DecompEvent& event : decomposition_events(tree)) {
        const DecompositionScore score = decomposition_reward(tree, event, provider, cfg);
        b.decomposition_per_event.push_back(EventReward{tree.nodes[event.parent].id(),
                                                        score.r_coverage, score.r_split,
                                                        score.r_decomp});
        event_values.push_back(score.r_decomp);
    }
    b.avg_decomposition = mean_or_zero(event_values);
    return b;
}

} // namespace subsearch
