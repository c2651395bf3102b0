#include "subsearch/search_env.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <fstream>
#include <unordered_set>

#include <json.hpp>

namespace subsearch {

namespace {

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::uint64_t fnv1a64_step(std::uint64_t hash, std::string_view bytes) {
    for (unsigned char c : bytes) {
        hash ^= static_cast<std::uint64_t>(c);
        hash *= 0x100000001b3ull;
    }
    return hash;
}

nlohmann::json parse_jsonl_line(const std::string& line, const std::string& path,
                                std::size_t line_no) {
    nlohmann::json parsed = nlohmann::json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw InputError(path + ":" + std::to_string(line_no) + ": malformed JSON object");
    }
    return parsed;
}

std::string require_string(const nlohmann::json& obj, const char* key, const std::string& path,
                           std::size_t line_no) {
    if (!obj.contains(key) || !obj[key].is_string()) {
        throw InputError(path + ":" + std::to_string(line_no) + ": missing string key \"" + key +
                         "\"");
    }
    return obj[key].get<std::string>();
}

} // namespace

std::string Corpus::content_digest() const {
    std::uint64_t hash = fnv1a64_step(0xcbf29ce484222325ull, provider_fingerprint);
    for (const RetrievedDoc& doc : docs) {
        hash = fnv1a64_step(hash, doc.doc_id);
        hash = fnv1a64_step(hash, {"\0", 1});
        hash = fnv1a64_step(hash, doc.title);
        hash = fnv1a64_step(hash, {"\0", 1});
        hash = fnv1a64_step(hash, doc.body);
        hash = fnv1a64_step(hash, {"\0", 1});
    }
    for (const Embedding& e : embeddings) {
        for (double v : e.values) {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            char bytes[8];
            for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
            hash = fnv1a64_step(hash, std::string_view(bytes, 8));
        }
    }
    return hex64(hash);
}

Corpus ingest_corpus(const std::string& path, const EmbeddingProvider& provider) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file: " + path);

    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::vector<std::string> texts;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json obj = parse_jsonl_line(line, path, line_no);
        RetrievedDoc doc;
        doc.doc_id = require_string(obj, "id", path, line_no);
        doc.title = require_string(obj, "title", path, line_no);
        doc.body = require_string(obj, "text", path, line_no);
        if (doc.doc_id.empty()) {
            throw InputError(path + ":" + std::to_string(line_no) + ": empty doc id");
        }
        if (!seen_ids.insert(doc.doc_id).second) {
            throw InputError(path + ":" + std::to_string(line_no) + ": duplicate doc id \"" +
                             doc.doc_id + "\"");
        }
        texts.push_back(doc.title + " " + doc.body);
        corpus.docs.push_back(std::move(doc));
    }
    corpus.embeddings = texts.empty() ? std::vector<Embedding>{} : provider.embed(texts);
    corpus.provider_fingerprint = provider.fingerprint();
    return corpus;
}

std::vector<RetrievedDoc> retrieve(const Corpus& corpus, const std::string& subquery, int k,
                                   const EmbeddingProvider& provider) {
    if (k < 1) throw std::invalid_argument("retrieve: k must be >= 1, got " + std::to_string(k));
    if (corpus.size() == 0) return {};

    const Embedding query = provider.embed_one(subquery);
    std::vector<std::size_t> order(corpus.size());
    std::vector<double> scores(corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        order[i] = i;
        scores[i] = cosine(query, corpus.embeddings[i]);
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return corpus.docs[a].doc_id < corpus.docs[b].doc_id;
    });

    const std::size_t take = std::min(corpus.size(), static_cast<std::size_t>(k));
    std::vector<RetrievedDoc> out;
    out.reserve(take);
    for (std::size_t r = 0; r < take; ++r) {
        RetrievedDoc doc = corpus.docs[order[r]];
        doc.score = scores[order[r]];
        out.push_back(std::move(doc));
    }
    return out;
}

std::vector<QaItem> load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset file: " + path);

    std::vector<QaItem> items;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const nlohmann::json obj = parse_jsonl_line(line, path, line_no);
        QaItem item;
        item.question = require_string(obj, "question", path, line_no);
        if (!obj.contains("golden_answers") || !obj["golden_answers"].is_array()) {
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": missing list key \"golden_answers\"");
        }
        for (const auto& g : obj["golden_answers"]) {
            if (!g.is_string()) {
                throw InputError(path + ":" + std::to_string(line_no) +
                                 ": golden_answers must hold strings");
            }
            item.golden_answers.push_back(g.get<std::string>());
        }
        items.push_back(std::move(item));
    }
    return items;
}

} // namespace subsearch
