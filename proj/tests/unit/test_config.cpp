#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <string>

#include "subsearch/config.hpp"
#include "subsearch/search_env.hpp"

using namespace subsearch;

namespace {

std::string fixture(const std::string& name) {
    const char* dir = std::getenv("SUBSEARCH_FIXTURES");
    REQUIRE(dir != nullptr);
    return std::string(dir) + "/" + name;
}

std::string temp_config(const std::string& name, const std::string& content) {
    std::string path = "/tmp/subsearch_cfg_" + name;
    std::ofstream out(path, std::ios::binary);
    out << content;
    return path;
}

} // namespace

TEST_CASE("defaults fixture resolves to the built-in defaults") {
    auto cfg = load_config(fixture("default.cfg"));
    RunConfig defaults;
    CHECK(cfg.embedder.kind == "reference_hashed");
    CHECK(cfg.embedder.dim == 256);
    CHECK(cfg.reward.k == 3);
    CHECK(cfg.reward.lambda_structure == 0.1);
    CHECK(cfg.aggregation.policy == "adaptive_residual");
    CHECK(cfg.grpo.group_size == 5);
    CHECK(cfg.harness.max_turns == 4);
    CHECK(cfg.harness.doc_char_budget == 1200);
    CHECK(cfg.fingerprint() == defaults.fingerprint());
}

TEST_CASE("the fingerprint tracks every resolved value") {
    RunConfig a, b;
    CHECK(a.fingerprint() == b.fingerprint());
    b.reward.k = 4;
    CHECK(a.fingerprint() != b.fingerprint());
    RunConfig c;
    c.aggregation.beta = 0.25;
    CHECK(a.fingerprint() != c.fingerprint());
    CHECK(a.fingerprint().size() == 16); // 64-bit hex digest
}

TEST_CASE("unknown keys and sections are rejected by name") {
    SUBCASE("unknown key") {
        auto path = temp_config("badkey.cfg", "[reward]\nbogus_key = 3\n");
        try {
            load_config(path);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("bogus_key") != std::string::npos);
        }
    }
    SUBCASE("unknown section") {
        auto path = temp_config("badsec.cfg", "[mystery]\nk = 3\n");
        try {
            load_config(path);
            FAIL("expected InputError");
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find("mystery") != std::string::npos);
        }
    }
    SUBCASE("key before any section") {
        auto path = temp_config("nosec.cfg", "k = 3\n");
        CHECK_THROWS_AS(load_config(path), InputError);
    }
}

TEST_CASE("range violations are input errors") {
    CHECK_THROWS_AS(load_config(temp_config("dim.cfg", "[embedder]\ndim = 4\n")), InputError);
    CHECK_THROWS_AS(load_config(temp_config("gamma.cfg", "[aggregation]\ngamma = 2.0\n")),
                    InputError);
    CHECK_THROWS_AS(load_config(temp_config("gsize.cfg", "[grpo]\ngroup_size = 1\n")), InputError);
    CHECK_THROWS_AS(load_config(temp_config("eps.cfg", "[grpo]\nepsilon = 0\n")), InputError);
    CHECK_THROWS_AS(load_config(temp_config("betas.cfg",
                                            "[aggregation]\nbeta_min = 0.9\nbeta_max = 0.1\n")),
                    InputError);
    CHECK_THROWS_AS(load_config(temp_config("kind.cfg", "[embedder]\nkind = quantum\n")),
                    InputError);
    CHECK_THROWS_AS(load_config(temp_config("policy.cfg", "[aggregation]\npolicy = maximal\n")),
                    InputError);
}

TEST_CASE("value parse errors name the file and line") {
    auto path = temp_config("parse.cfg", "[reward]\nk = not_a_number\n");
    try {
        load_config(path);
        FAIL("expected InputError");
    } catch (const InputError& e) {
        std::string what = e.what();
        CHECK(what.find(":2") != std::string::npos);
    }
}

TEST_CASE("comments and blank lines are ignored") {
    auto path = temp_config("comments.cfg",
                            "# leading comment\n\n[reward]\n; another comment\nk = 5\n");
    auto cfg = load_config(path);
    CHECK(cfg.reward.k == 5);
}

TEST_CASE("partial files keep defaults for omitted keys") {
    auto path = temp_config("partial.cfg", "[aggregation]\nbeta = 0.25\n");
    auto cfg = load_config(path);
    CHECK(cfg.aggregation.beta == 0.25);
    CHECK(cfg.aggregation.gamma == 0.9);
    CHECK(cfg.reward.k == 3);
}

TEST_CASE("make_provider builds the configured reference embedder") {
    EmbedderSection section;
    section.kind = "reference_hashed";
    section.dim = 32;
    auto provider = make_provider(section);
    CHECK(provider->dim() == 32);
    CHECK(provider->fingerprint() == "reference-hashed:fnv1a64:dim=32");
}

TEST_CASE("environment variable overrides the external endpoint only") {
    EmbedderSection section;
    section.kind = "external_service";
    section.endpoint = "http://configured:9999/embed";
    section.model = "demo";
    setenv(kEmbedEndpointEnvVar, "http://override:8080/embed", 1);
    auto provider = make_provider(section);
    unsetenv(kEmbedEndpointEnvVar);
    CHECK(provider->fingerprint().find("override:8080") != std::string::npos);
    // Without an endpoint from either source, construction is an input error.
    EmbedderSection empty;
    empty.kind = "external_service";
    CHECK_THROWS_AS(make_provider(empty), InputError);
}

TEST_CASE("make_aggregation_policy seeds the adaptive state from the section") {
    AggregationSection section;
    section.policy = "adaptive_residual";
    section.gamma = 0.8;
    section.beta_min = 0.2;
    section.beta_max = 0.6;
    auto policy = make_aggregation_policy(section);
    CHECK(policy.kind == AggregationKind::AdaptiveResidual);
    CHECK(policy.adaptive.gamma == 0.8);
    CHECK(policy.adaptive.beta_min == 0.2);
    CHECK(policy.adaptive.beta_max == 0.6);
    CHECK(policy.adaptive.ema == 0.5);
    CHECK(policy.adaptive.beta_t() == doctest::Approx(0.4));
}
