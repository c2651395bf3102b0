#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace subsearch {

// Unit-norm dense vector. Every provider emits unit vectors; consumers may
// assume dot(a, b) == cosine(a, b).
struct Embedding {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }

    // L2-normalizes v. A (near-)zero vector maps to the uniform unit vector
    // 1/sqrt(dim), the documented zero-token case.
    static Embedding normalized(std::vector<double> v);

    bool operator==(const Embedding&) const = default;
};

// Dot product of two unit vectors. Throws std::invalid_argument on dimension
// mismatch.
double cosine(const Embedding& a, const Embedding& b);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    // One unit vector per input, order-preserving.
    virtual std::vector<Embedding> embed(const std::vector<std::string>& texts) const = 0;

    // Vector width, constant for the lifetime of the provider. An external
    // provider that has not served a request yet reports 0 (unknown).
    virtual std::size_t dim() const = 0;

    // Stable identity string, recorded in corpora and reports.
    virtual std::string fingerprint() const = 0;

    Embedding embed_one(const std::string& text) const;
};

// 64-bit FNV-1a, the published token hash of the reference embedder
// (offset 0xcbf29ce484222325, prime 0x100000001b3).
std::uint64_t fnv1a64(std::string_view bytes);

// Deterministic bag-of-words embedder: lowercase (ASCII), split on
// non-alphanumeric bytes, bucket each token by fnv1a64 mod dim, accumulate
// counts, L2-normalize. Tokenless input embeds to the uniform vector.
// Count vectors are non-negative, so cosines land in [0, 1].
class ReferenceHashedProvider final : public EmbeddingProvider {
public:
    explicit ReferenceHashedProvider(std::size_t dim = 256);

    std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;
    std::size_t dim() const override { return dim_; }
    std::string fingerprint() const override;

private:
    std::size_t dim_;
};

struct ExternalServiceConfig {
    std::string endpoint;   // "http://host:port/path"
    std::string model;
    int timeout_ms = 5000;
    int batch_size = 32;
    int max_retries = 3;
};

// Client for an embedding service speaking the JSON exchange documented in
// the README: POST {"model": ..., "texts": [...]} -> {"embeddings": [[...]]}.
// Responses are defensively re-normalized and cached by exact text for the
// lifetime of the provider, so repeated calls within a run are stable.
class ExternalServiceProvider final : public EmbeddingProvider {
public:
    explicit ExternalServiceProvider(ExternalServiceConfig cfg);
    ~ExternalServiceProvider() override;

    std::vector<Embedding> embed(const std::vector<std::string>& texts) const override;
    std::size_t dim() const override;
    std::string fingerprint() const override;

private:
    std::vector<Embedding> fetch_batch(const std::vector<std::string>& texts) const;

    ExternalServiceConfig cfg_;
    mutable std::mutex mutex_;
    mutable std::unordered_map<std::string, Embedding> cache_;
    mutable std::size_t locked_dim_ = 0;
};

} // namespace subsearch
