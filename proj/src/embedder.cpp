#include "subsearch/embedder.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace subsearch {

namespace {

constexpr double kZeroNormEps = 1e-12;

bool is_ascii_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c + ('a' - 'A')) : static_cast<char>(c);
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_ascii_alnum(c)) {
            current.push_back(ascii_lower(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

} // namespace

Embedding Embedding::normalized(std::vector<double> v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double norm = std::sqrt(sq);
    if (!(norm > kZeroNormEps)) {
        const double uniform = 1.0 / std::sqrt(static_cast<double>(v.size()));
        std::fill(v.begin(), v.end(), uniform);
        return Embedding{std::move(v)};
    }
    for (double& x : v) x /= norm;
    return Embedding{std::move(v)};
}

double cosine(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim()) {
        throw std::invalid_argument("cosine: dimension mismatch (" + std::to_string(a.dim()) +
                                    " vs " + std::to_string(b.dim()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
    return std::clamp(dot, -1.0, 1.0);
}

Embedding EmbeddingProvider::embed_one(const std::string& text) const {
    return embed({text}).front();
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

ReferenceHashedProvider::ReferenceHashedProvider(std::size_t dim) : dim_(dim) {
    if (dim_ < 8) {
        throw std::invalid_argument("ReferenceHashedProvider: dim must be >= 8, got " +
                                    std::to_string(dim_));
    }
}

std::vector<Embedding> ReferenceHashedProvider::embed(const std::vector<std::string>& texts) const {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const std::string& text : texts) {
        std::vector<double> counts(dim_, 0.0);
        for (const std::string& token : tokenize(text)) {
            counts[fnv1a64(token) % dim_] += 1.0;
        }
        out.push_back(Embedding::normalized(std::move(counts)));
    }
    return out;
}

std::string ReferenceHashedProvider::fingerprint() const {
    return "reference-hashed:fnv1a64:dim=" + std::to_string(dim_);
}

ExternalServiceProvider::ExternalServiceProvider(ExternalServiceConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty()) {
        throw std::invalid_argument("ExternalServiceProvider: endpoint must not be empty");
    }
    if (cfg_.batch_size < 1) {
        throw std::invalid_argument("ExternalServiceProvider: batch_size must be >= 1");
    }
}

ExternalServiceProvider::~ExternalServiceProvider() = default;

namespace {

// "http://host:port/path" -> ("http://host:port", "/path")
std::pair<std::string, std::string> split_endpoint(const std::string& endpoint) {
    const auto scheme_end = endpoint.find("://");
    const auto path_start =
        endpoint.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {endpoint, "/"};
    return {endpoint.substr(0, path_start), endpoint.substr(path_start)};
}

} // namespace

std::vector<Embedding> ExternalServiceProvider::fetch_batch(
    const std::vector<std::string>& texts) const {
    const auto [base, path] = split_endpoint(cfg_.endpoint);

    nlohmann::json request;
    request["model"] = cfg_.model;
    request["texts"] = texts;
    const std::string body = request.dump();

    std::string last_error;
    for (int attempt = 0; attempt < std::max(1, cfg_.max_retries); ++attempt) {
        httplib::Client client(base);
        client.set_connection_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
        client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
        client.set_write_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

        auto res = client.Post(path, body, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP status " + std::to_string(res->status);
            continue;
        }

        nlohmann::json response = nlohmann::json::parse(res->body, nullptr, false);
        if (response.is_discarded() || !response.contains("embeddings") ||
            !response["embeddings"].is_array()) {
            throw std::runtime_error("embedding service returned malformed response from " +
                                     cfg_.endpoint);
        }
        const auto& rows = response["embeddings"];
        if (rows.size() != texts.size()) {
            throw std::runtime_error("embedding service returned " + std::to_string(rows.size()) +
                                     " vectors for " + std::to_string(texts.size()) + " texts");
        }
        std::vector<Embedding> out;
        out.reserve(rows.size());
        for (const auto& row : rows) {
            if (!row.is_array() || row.empty()) {
                throw std::runtime_error("embedding service returned a non-numeric vector");
            }
            std::vector<double> values;
            values.reserve(row.size());
            for (const auto& x : row) {
                if (!x.is_number()) {
                    throw std::runtime_error("embedding service returned a non-numeric vector");
                }
                values.push_back(x.get<double>());
            }
            out.push_back(Embedding::normalized(std::move(values)));
        }
        return out;
    }
    throw std::runtime_error("embedding service unreachable after " +
                             std::to_string(std::max(1, cfg_.max_retries)) + " attempts (" +
                             cfg_.endpoint + "): " + last_error);
}

std::vector<Embedding> ExternalServiceProvider::embed(const std::vector<std::string>& texts) const {
    std::vector<std::string> misses;
    {
        std::lock_guard<std::mutex> lock(mutex_);
        for (const std::string& text : texts) {
            if (!cache_.contains(text)) misses.push_back(text);
        }
    }
    std::sort(misses.begin(), misses.end());
    misses.erase(std::unique(misses.begin(), misses.end()), misses.end());

    for (std::size_t start = 0; start < misses.size();
         start += static_cast<std::size_t>(cfg_.batch_size)) {
        const std::size_t stop =
            std::min(misses.size(), start + static_cast<std::size_t>(cfg_.batch_size));
        std::vector<std::string> chunk(misses.begin() + static_cast<std::ptrdiff_t>(start),
                                       misses.begin() + static_cast<std::ptrdiff_t>(stop));
        std::vector<Embedding> fetched = fetch_batch(chunk);

        std::lock_guard<std::mutex> lock(mutex_);
        for (std::size_t i = 0; i < chunk.size(); ++i) {
            if (locked_dim_ == 0) locked_dim_ = fetched[i].dim();
            if (fetched[i].dim() != locked_dim_) {
                throw std::runtime_error("embedding service changed dimension from " +
                                         std::to_string(locked_dim_) + " to " +
                                         std::to_string(fetched[i].dim()));
            }
            // First write wins so repeated texts stay stable within a run.
            cache_.emplace(chunk[i], std::move(fetched[i]));
        }
    }

    std::vector<Embedding> out;
    out.reserve(texts.size());
    std::lock_guard<std::mutex> lock(mutex_);
    for (const std::string& text : texts) out.push_back(cache_.at(text));
    return out;
}

std::size_t ExternalServiceProvider::dim() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return locked_dim_;
}

std::string ExternalServiceProvider::fingerprint() const {
    return "external-service:" + cfg_.endpoint + ":model=" + cfg_.model;
}

} // namespace subsearch
