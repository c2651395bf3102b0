#pragma once

#include <string>
#include <vector>

#include "subsearch/embedder.hpp"
#include "subsearch/trace.hpp"

namespace subsearch {

// Raised for malformed user input (files, config, flags). The CLI maps it to
// exit code 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// In-memory dense index: one unit embedding per document, built over
// title + " " + body. Immutable after ingestion.
struct Corpus {
    std::vector<RetrievedDoc> docs;       // score field unused here
    std::vector<Embedding> embeddings;    // aligned with docs
    std::string provider_fingerprint;

    std::size_t size() const { return docs.size(); }

    // Deterministic digest of ids, text, and the embedding matrix bytes.
    std::string content_digest() const;
};

// JSON-lines corpus file, keys: id, title, text. Malformed lines and
// duplicate ids raise InputError naming the line / id.
Corpus ingest_corpus(const std::string& path, const EmbeddingProvider& provider);

// Top-k by cosine(phi(subquery), phi(doc)), scores attached non-increasing,
// ties broken by ascending doc_id. Returns all docs when the corpus is
// smaller than k. An empty subquery retrieves over the uniform vector.
std::vector<RetrievedDoc> retrieve(const Corpus& corpus, const std::string& subquery, int k,
                                   const EmbeddingProvider& provider);

struct QaItem {
    std::string question;
    std::vector<std::string> golden_answers;
};

// JSON-lines QA file, keys: question, golden_answers. Errors name the line.
std::vector<QaItem> load_dataset(const std::string& path);

} // namespace subsearch
