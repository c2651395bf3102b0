#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace subsearch {

class EmbeddingProvider;

enum class TurnKind { Think, Search, Information, Answer };

struct RetrievedDoc {
    std::string doc_id;
    std::string title;
    std::string body;
    double score = 0.0; // retrieval similarity; non-increasing within a ranked list

    bool operator==(const RetrievedDoc&) const = default;
};

using DocGroup = std::vector<RetrievedDoc>;

// One turn of the reasoning-search loop. Which field carries the payload
// depends on kind: content (Think/Answer), subqueries (Search), doc_groups
// (Information, aligned 1:1 with the preceding Search's subqueries).
struct Turn {
    TurnKind kind = TurnKind::Think;
    std::string content;
    std::vector<std::string> subqueries;
    std::vector<DocGroup> doc_groups;

    bool operator==(const Turn&) const = default;
};

struct ReasoningTrace {
    std::string question;
    std::vector<Turn> turns;
    std::optional<std::string> answer; // content of the Answer turn, if any

    bool operator==(const ReasoningTrace&) const = default;
};

// Node of the decomposition tree. The root (level 0) holds the original
// question; children of a level-l node sit at level l+1, indexed from 1
// within their level. docs is present iff the node's text was issued as a
// search and paired with an information block.
struct DecompNode {
    int level = 0;
    int index = 1;
    std::string query_text;
    std::optional<std::size_t> parent; // absent iff root
    std::vector<std::size_t> children;
    std::optional<DocGroup> docs;
    std::size_t order = 0; // issue order: root 0, then subqueries as they appear

    // "level.index", e.g. "1.2"
    std::string id() const;
};

struct DecompositionTree {
    std::vector<DecompNode> nodes; // nodes[0] is the root
    std::vector<std::string> notes; // construction notes (attachment ambiguity etc.)

    const DecompNode& root() const { return nodes.front(); }
};

struct DecompEvent {
    std::size_t parent = 0;
    std::vector<std::size_t> children; // >= 2, in issue order
};

// Builds the tree for a parsed trace. The first Search turn's subqueries
// attach to the root; each later Search attaches to the prior searched node
// whose embedding is most similar to the mean embedding of the new
// subqueries, ties going to the most recent candidate.
DecompositionTree build_decomposition_tree(const ReasoningTrace& trace,
                                           const EmbeddingProvider& provider);

// Every node with >= 2 children, in issue order. Single-child chains are
// depth, not splits, and produce no event.
std::vector<DecompEvent> decomposition_events(const DecompositionTree& tree);

// Indices of nodes carrying a doc list, in issue order: the units
// answerability is averaged over.
std::vector<std::size_t> searched_leaves(const DecompositionTree& tree);

} // namespace subsearch
