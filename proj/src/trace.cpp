#include "subsearch/trace.hpp"

#include <algorithm>

#include "subsearch/embedder.hpp"

namespace subsearch {

std::string DecompNode::id() const {
    return std::to_string(level) + "." + std::to_string(index);
}

namespace {

Embedding mean_embedding(const std::vector<Embedding>& embeddings) {
    std::vector<double> mean(embeddings.front().dim(), 0.0);
    for (const Embedding& e : embeddings) {
        for (std::size_t d = 0; d < mean.size(); ++d) mean[d] += e.values[d];
    }
    for (double& x : mean) x /= static_cast<double>(embeddings.size());
    return Embedding::normalized(std::move(mean));
}

} // namespace

DecompositionTree build_decomposition_tree(const ReasoningTrace& trace,
                                           const EmbeddingProvider& provider) {
    DecompositionTree tree;

    DecompNode root;
    root.level = 0;
    root.index = 1;
    root.query_text = trace.question;
    root.order = 0;
    tree.nodes.push_back(std::move(root));

    std::vector<int> level_counts{1}; // nodes per level, for index assignment
    std::size_t order = 1;
    std::size_t search_number = 0;

    for (std::size_t t = 0; t < trace.turns.size(); ++t) {
        const Turn& turn = trace.turns[t];
        if (turn.kind != TurnKind::Search || turn.subqueries.empty()) continue;
        ++search_number;

        // Attachment: first search refines the root; later searches refine
        // the prior searched node most similar to the mean of the new
        // subqueries, ties to the most recent.
        std::size_t parent_idx = 0;
        if (search_number > 1) {
            const Embedding target = mean_embedding(provider.embed(turn.subqueries));
            bool found = false;
            double best = 0.0;
            for (std::size_t n = 1; n < tree.nodes.size(); ++n) {
                const double sim = cosine(provider.embed_one(tree.nodes[n].query_text), target);
                if (!found || sim >= best) {
                    found = true;
                    best = sim;
                    parent_idx = n;
                }
            }
            if (tree.nodes.size() > 2) {
                tree.notes.push_back("search " + std::to_string(search_number) + " attached to " +
                                     tree.nodes[parent_idx].id() +
                                     " by refinement similarity (ties to most recent)");
            }
        }

        const std::vector<DocGroup>* groups = nullptr;
        if (t + 1 < trace.turns.size() && trace.turns[t + 1].kind == TurnKind::Information) {
            groups = &trace.turns[t + 1].doc_groups;
            if (groups->size() != turn.subqueries.size()) {
                tree.notes.push_back("search " + std::to_string(search_number) + ": " +
                                     std::to_string(turn.subqueries.size()) + " subqueries but " +
                                     std::to_string(groups->size()) + " doc groups");
            }
        } else {
            tree.notes.push_back("search " + std::to_string(search_number) +
                                 " has no information turn; nodes carry no docs");
        }

        const int child_level = tree.nodes[parent_idx].level + 1;
        if (static_cast<std::size_t>(child_level) >= level_counts.size()) {
            level_counts.resize(static_cast<std::size_t>(child_level) + 1, 0);
        }
        for (std::size_t s = 0; s < turn.subqueries.size(); ++s) {
            DecompNode node;
            node.level = child_level;
            node.index = ++level_counts[static_cast<std::size_t>(child_level)];
            node.query_text = turn.subqueries[s];
            node.parent = parent_idx;
            node.order = order++;
            if (groups && s < groups->size()) node.docs = (*groups)[s];
            tree.nodes.push_back(std::move(node));
            tree.nodes[parent_idx].children.push_back(tree.nodes.size() - 1);
        }
    }
    return tree;
}

std::vector<DecompEvent> decomposition_events(const DecompositionTree& tree) {
    std::vector<DecompEvent> events;
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        if (tree.nodes[n].children.size() >= 2) {
            events.push_back(DecompEvent{n, tree.nodes[n].children});
        }
    }
    return events;
}

std::vector<std::size_t> searched_leaves(const DecompositionTree& tree) {
    std::vector<std::size_t> leaves;
    for (std::size_t n = 0; n < tree.nodes.size(); ++n) {
        if (tree.nodes[n].docs.has_value()) leaves.push_back(n);
    }
    return leaves;
}

} // namespace subsearch
