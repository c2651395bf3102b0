#include <doctest.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "subsearch/embedder.hpp"

using subsearch::Embedding;
using subsearch::ReferenceHashedProvider;
using subsearch::cosine;
using subsearch::fnv1a64;

TEST_CASE("fnv1a64 matches the published constants") {
    // Offset basis: hash of the empty string.
    CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
    // One byte folds the prime in once: (basis ^ 'a') * prime (mod 2^64).
    std::uint64_t expected = (0xcbf29ce484222325ULL ^ 0x61ULL) * 0x100000001b3ULL;
    CHECK(fnv1a64("a") == expected);
}

TEST_CASE("embeddings are unit vectors and deterministic") {
    ReferenceHashedProvider provider(64);
    auto a = provider.embed_one("the quick brown fox");
    auto b = provider.embed_one("the quick brown fox");
    CHECK(a == b);
    double n = 0.0;
    for (double v : a.values) n += v * v;
    CHECK(std::abs(std::sqrt(n) - 1.0) < 1e-9);
    CHECK(cosine(a, b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("bag of words: token order does not matter") {
    ReferenceHashedProvider provider(32);
    CHECK(provider.embed_one("a b") == provider.embed_one("b a"));
    CHECK(provider.embed_one("one two two") == provider.embed_one("two one two"));
}

TEST_CASE("tokenization is case-insensitive and splits on non-alphanumerics") {
    ReferenceHashedProvider provider(32);
    CHECK(provider.embed_one("Hello, World!") == provider.embed_one("hello world"));
    CHECK(provider.embed_one("a-b_c") == provider.embed_one("a b c"));
}

TEST_CASE("empty and tokenless text embeds to the uniform vector") {
    ReferenceHashedProvider provider(16);
    auto e = provider.embed_one("");
    auto p = provider.embed_one("?!,.");
    CHECK(e == p);
    for (double v : e.values) {
        CHECK(v == doctest::Approx(1.0 / std::sqrt(16.0)).epsilon(1e-12));
    }
}

TEST_CASE("batch embed is order-preserving and permutation-equivariant") {
    ReferenceHashedProvider provider(32);
    std::vector<std::string> texts = {"alpha", "beta", "gamma"};
    auto out = provider.embed(texts);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == provider.embed_one("alpha"));
    CHECK(out[1] == provider.embed_one("beta"));
    CHECK(out[2] == provider.embed_one("gamma"));
    auto shuffled = provider.embed({"gamma", "alpha", "beta"});
    CHECK(shuffled[0] == out[2]);
    CHECK(shuffled[1] == out[0]);
    CHECK(shuffled[2] == out[1]);
}

TEST_CASE("dim-8 bank subquery cosine reproduces the hand-hashed value") {
    // With fnv1a64 mod 8: citic -> 3, bank -> 7, branches -> 1, unicredit -> 0.
    // Count vectors: {branches:1, citic:1, bank:1} and {unicredit:1, branches:1}
    // overlap only on "branches", so cosine = 1 / (sqrt(3) * sqrt(2)).
    ReferenceHashedProvider provider(8);
    double sim = cosine(provider.embed_one("citic bank branches"),
                        provider.embed_one("unicredit branches"));
    CHECK(sim == doctest::Approx(1.0 / std::sqrt(6.0)).epsilon(1e-9));
    CHECK(sim > 0.0);
    CHECK(sim < 1.0);
}

TEST_CASE("hand-built unit vectors give the textbook cosine") {
    Embedding x = Embedding::normalized({1.0, 0.0});
    Embedding y = Embedding::normalized({1.0, 1.0});
    CHECK(cosine(x, y) == doctest::Approx(0.70710678).epsilon(1e-8));
    Embedding e1 = Embedding::normalized({1.0, 0.0});
    Embedding e2 = Embedding::normalized({0.0, 1.0});
    CHECK(cosine(e1, e2) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("reference cosines stay within [0, 1] for arbitrary text") {
    ReferenceHashedProvider provider(16);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> len(0, 12);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int trial = 0; trial < 200; ++trial) {
        std::string s, t;
        for (int i = 0; i < len(rng); ++i) s.push_back(static_cast<char>(byte(rng)));
        for (int i = 0; i < len(rng); ++i) t.push_back(static_cast<char>(byte(rng)));
        double sim = cosine(provider.embed_one(s), provider.embed_one(t));
        CHECK(sim >= 0.0);
        CHECK(sim <= 1.0);
    }
}

TEST_CASE("provider rejects dims below 8; cosine rejects mismatched dims") {
    CHECK_THROWS_AS(ReferenceHashedProvider(4), std::invalid_argument);
    ReferenceHashedProvider a(8), b(16);
    CHECK_THROWS_AS(cosine(a.embed_one("x"), b.embed_one("x")), std::invalid_argument);
}

TEST_CASE("fingerprint names the scheme and dimension") {
    ReferenceHashedProvider provider(128);
    CHECK(provider.fingerprint() == "reference-hashed:fnv1a64:dim=128");
}
