#include "subsearch/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "subsearch/search_env.hpp"

namespace subsearch {

namespace {

constexpr std::string_view kWhitespace = " \t\r\n";

std::string hex64(std::uint64_t value) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string_view trim_view(std::string_view s) {
    const auto first = s.find_first_not_of(kWhitespace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kWhitespace);
    return s.substr(first, last - first + 1);
}

std::string location(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

int parse_int(std::string_view value, const std::string& where) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError(where + ": expected an integer, got \"" + std::string(value) + "\"");
    }
    return out;
}

unsigned long long parse_ull(std::string_view value, const std::string& where) {
    unsigned long long out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError(where + ": expected a non-negative integer, got \"" + std::string(value) +
                         "\"");
    }
    return out;
}

double parse_double(std::string_view value, const std::string& where) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw InputError(where + ": expected a number, got \"" + std::string(value) + "\"");
    }
    return out;
}

bool parse_bool(std::string_view value, const std::string& where) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw InputError(where + ": expected true or false, got \"" + std::string(value) + "\"");
}

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

void validate(const RunConfig& cfg, const std::string& context) {
    auto fail = [&context](const std::string& message) {
        throw InputError(context + ": " + message);
    };
    if (cfg.embedder.kind != "reference_hashed" && cfg.embedder.kind != "external_service") {
        fail("embedder.kind must be reference_hashed or external_service, got \"" +
             cfg.embedder.kind + "\"");
    }
    if (cfg.embedder.dim < 8) fail("embedder.dim must be >= 8");
    if (cfg.embedder.timeout_ms < 1) fail("embedder.timeout_ms must be >= 1");
    if (cfg.embedder.batch < 1) fail("embedder.batch must be >= 1");
    if (cfg.reward.k < 1) fail("reward.k must be >= 1");
    if (cfg.reward.lambda_structure < 0.0 || cfg.reward.lambda_retrieval < 0.0) {
        fail("reward lambdas must be >= 0");
    }
    if (cfg.aggregation.policy != "weighted_sum" && cfg.aggregation.policy != "residual" &&
        cfg.aggregation.policy != "adaptive_residual") {
        fail("aggregation.policy must be weighted_sum, residual, or adaptive_residual, got \"" +
             cfg.aggregation.policy + "\"");
    }
    if (cfg.aggregation.alpha_w < 0.0 || cfg.aggregation.alpha_w > 1.0) {
        fail("aggregation.alpha_w must lie in [0, 1]");
    }
    if (cfg.aggregation.beta < 0.0 || cfg.aggregation.beta > 1.0) {
        fail("aggregation.beta must lie in [0, 1]");
    }
    if (cfg.aggregation.gamma < 0.0 || cfg.aggregation.gamma > 1.0) {
        fail("aggregation.gamma must lie in [0, 1]");
    }
    if (cfg.aggregation.beta_min > cfg.aggregation.beta_max) {
        fail("aggregation.beta_min must be <= aggregation.beta_max");
    }
    if (cfg.grpo.group_size < 2) fail("grpo.group_size must be >= 2");
    if (!(cfg.grpo.epsilon > 0.0)) fail("grpo.epsilon must be > 0");
    if (cfg.harness.max_turns < 1) fail("harness.max_turns must be >= 1");
    if (cfg.harness.doc_char_budget < 0) fail("harness.doc_char_budget must be >= 0");
}

} // namespace

std::string RunConfig::fingerprint() const {
    std::string canonical;
    auto put = [&canonical](std::string_view key, const std::string& value) {
        canonical += key;
        canonical += '=';
        canonical += value;
        canonical += '\n';
    };
    put("embedder.kind", embedder.kind);
    put("embedder.dim", std::to_string(embedder.dim));
    put("embedder.endpoint", embedder.endpoint);
    put("embedder.model", embedder.model);
    put("embedder.timeout_ms", std::to_string(embedder.timeout_ms));
    put("embedder.batch", std::to_string(embedder.batch));
    put("reward.k", std::to_string(reward.k));
    put("reward.alpha", format_double(reward.alpha));
    put("reward.beta_split", format_double(reward.beta_split));
    put("reward.lambda_structure", format_double(reward.lambda_structure));
    put("reward.lambda_retrieval", format_double(reward.lambda_retrieval));
    put("reward.clamp", reward.clamp_negative_sims ? "true" : "false");
    put("aggregation.policy", aggregation.policy);
    put("aggregation.alpha_w", format_double(aggregation.alpha_w));
    put("aggregation.beta", format_double(aggregation.beta));
    put("aggregation.gamma", format_double(aggregation.gamma));
    put("aggregation.beta_min", format_double(aggregation.beta_min));
    put("aggregation.beta_max", format_double(aggregation.beta_max));
    put("grpo.group_size", std::to_string(grpo.group_size));
    put("grpo.epsilon", format_double(grpo.epsilon));
    put("harness.max_turns", std::to_string(harness.max_turns));
    put("harness.seed", std::to_string(harness.seed));
    put("harness.doc_char_budget", std::to_string(harness.doc_char_budget));
    return hex64(fnv1a64(canonical));
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);

    RunConfig cfg;
    using Setter = std::function<void(std::string_view, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"embedder.kind",
         [&cfg](std::string_view v, const std::string&) { cfg.embedder.kind = std::string(v); }},
        {"embedder.dim",
         [&cfg](std::string_view v, const std::string& w) { cfg.embedder.dim = parse_int(v, w); }},
        {"embedder.endpoint",
         [&cfg](std::string_view v, const std::string&) {
             cfg.embedder.endpoint = std::string(v);
         }},
        {"embedder.model",
         [&cfg](std::string_view v, const std::string&) { cfg.embedder.model = std::string(v); }},
        {"embedder.timeout_ms",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.embedder.timeout_ms = parse_int(v, w);
         }},
        {"embedder.batch",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.embedder.batch = parse_int(v, w);
         }},
        {"reward.k",
         [&cfg](std::string_view v, const std::string& w) { cfg.reward.k = parse_int(v, w); }},
        {"reward.alpha",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.reward.alpha = parse_double(v, w);
         }},
        {"reward.beta_split",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.reward.beta_split = parse_double(v, w);
         }},
        {"reward.lambda_structure",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.reward.lambda_structure = parse_double(v, w);
         }},
        {"reward.lambda_retrieval",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.reward.lambda_retrieval = parse_double(v, w);
         }},
        {"reward.clamp",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.reward.clamp_negative_sims = parse_bool(v, w);
         }},
        {"aggregation.policy",
         [&cfg](std::string_view v, const std::string&) {
             cfg.aggregation.policy = std::string(v);
         }},
        {"aggregation.alpha_w",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.aggregation.alpha_w = parse_double(v, w);
         }},
        {"aggregation.beta",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.aggregation.beta = parse_double(v, w);
         }},
        {"aggregation.gamma",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.aggregation.gamma = parse_double(v, w);
         }},
        {"aggregation.beta_min",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.aggregation.beta_min = parse_double(v, w);
         }},
        {"aggregation.beta_max",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.aggregation.beta_max = parse_double(v, w);
         }},
        {"grpo.group_size",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.grpo.group_size = parse_int(v, w);
         }},
        {"grpo.epsilon",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.grpo.epsilon = parse_double(v, w);
         }},
        {"harness.max_turns",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.harness.max_turns = parse_int(v, w);
         }},
        {"harness.seed",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.harness.seed = parse_ull(v, w);
         }},
        {"harness.doc_char_budget",
         [&cfg](std::string_view v, const std::string& w) {
             cfg.harness.doc_char_budget = parse_int(v, w);
         }},
    };
    static const std::vector<std::string> kSections = {"embedder", "reward", "aggregation", "grpo",
                                                       "harness"};

    std::string section;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim_view(line);
        if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') continue;

        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw InputError(location(path, line_no) + ": unterminated section header");
            }
            section = std::string(trim_view(stripped.substr(1, stripped.size() - 2)));
            if (std::find(kSections.begin(), kSections.end(), section) == kSections.end()) {
                throw InputError(location(path, line_no) + ": unknown config section [" + section +
                                 "]");
            }
            continue;
        }

        const auto eq = stripped.find('=');
        if (eq == std::string_view::npos) {
            throw InputError(location(path, line_no) + ": expected key = value");
        }
        if (section.empty()) {
            throw InputError(location(path, line_no) + ": key outside any [section]");
        }
        const std::string key =
            section + "." + std::string(trim_view(stripped.substr(0, eq)));
        const std::string_view value = trim_view(stripped.substr(eq + 1));
        const auto setter = setters.find(key);
        if (setter == setters.end()) {
            throw InputError(location(path, line_no) + ": unknown key \"" + key + "\"");
        }
        setter->second(value, location(path, line_no));
    }

    validate(cfg, path);
    return cfg;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbedderSection& section) {
    if (section.kind == "reference_hashed") {
        return std::make_unique<ReferenceHashedProvider>(static_cast<std::size_t>(section.dim));
    }
    if (section.kind == "external_service") {
        ExternalServiceConfig cfg;
        cfg.endpoint = section.endpoint;
        if (const char* override_endpoint = std::getenv(kEmbedEndpointEnvVar);
            override_endpoint != nullptr && *override_endpoint != '\0') {
            cfg.endpoint = override_endpoint;
        }
        if (cfg.endpoint.empty()) {
            throw InputError("external_service embedder needs embedder.endpoint (or " +
                             std::string(kEmbedEndpointEnvVar) + ")");
        }
        cfg.model = section.model;
        cfg.timeout_ms = section.timeout_ms;
        cfg.batch_size = section.batch;
        return std::make_unique<ExternalServiceProvider>(std::move(cfg));
    }
    throw InputError("unknown embedder kind \"" + section.kind +
                     "\" (valid: reference_hashed, external_service)");
}

AggregationPolicy make_aggregation_policy(const AggregationSection& section) {
    AggregationPolicy policy;
    try {
        policy.kind = aggregation_kind_from_name(section.policy);
    } catch (const std::invalid_argument& e) {
        throw InputError(e.what());
    }
    policy.alpha_w = section.alpha_w;
    policy.beta = section.beta;
    policy.adaptive = AdaptiveBetaState{};
    policy.adaptive.gamma = section.gamma;
    policy.adaptive.beta_min = section.beta_min;
    policy.adaptive.beta_max = section.beta_max;
    return policy;
}

} // namespace subsearch
