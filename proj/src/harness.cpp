#include "subsearch/harness.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>

#include <json.hpp>

#include "subsearch/parser.hpp"
#include "subsearch/wire.hpp"

namespace subsearch {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Fixed phrasing variants; a nonzero perturbation seed appends one to every
// subquery so rollouts within a group differ deterministically.
constexpr std::array<std::string_view, 7> kFillers = {
    " specifically", " in detail",  " right now",          " exactly",
    " officially",   " this year", " according to records"};

std::string filler_for(int seed) {
    if (seed == 0) return "";
    return std::string(kFillers[splitmix64(static_cast<std::uint64_t>(seed)) % kFillers.size()]);
}

constexpr std::string_view kQuestionWhitespace = " \t\r\n";

std::string trim_copy(std::string_view s) {
    const auto first = s.find_first_not_of(kQuestionWhitespace);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(kQuestionWhitespace);
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && kQuestionWhitespace.find(s[i]) != std::string_view::npos) ++i;
        std::size_t j = i;
        while (j < s.size() && kQuestionWhitespace.find(s[j]) == std::string_view::npos) ++j;
        if (j > i) tokens.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return tokens;
}

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (!out.empty()) out += ' ';
        out += tokens[i];
    }
    return out;
}

// Comparison questions "<head>, <A> or <B>?" become one subquery per entity
// plus the head (minus its question word); anything else splits into token
// halves, or stays whole when too short.
std::vector<std::string> derive_subqueries(const std::string& question) {
    std::string q = trim_copy(question);
    while (!q.empty() && (q.back() == '?' || q.back() == '.')) q.pop_back();
    q = trim_copy(q);
    if (q.empty()) return {std::string(question)};

    const std::size_t comma = q.rfind(',');
    if (comma != std::string::npos) {
        const std::string tail = trim_copy(std::string_view(q).substr(comma + 1));
        const std::size_t or_pos = tail.find(" or ");
        if (or_pos != std::string::npos) {
            const std::string a = trim_copy(std::string_view(tail).substr(0, or_pos));
            const std::string b = trim_copy(std::string_view(tail).substr(or_pos + 4));
            if (!a.empty() && !b.empty()) {
                const auto head_tokens =
                    whitespace_tokens(std::string_view(q).substr(0, comma));
                const std::string head = head_tokens.size() > 1
                                             ? join_tokens(head_tokens, 1, head_tokens.size())
                                             : join_tokens(head_tokens, 0, head_tokens.size());
                return {a + " " + head, b + " " + head};
            }
        }
    }

    const auto tokens = whitespace_tokens(q);
    if (tokens.size() >= 4) {
        const std::size_t half = tokens.size() / 2;
        return {join_tokens(tokens, 0, half), join_tokens(tokens, half, tokens.size())};
    }
    return {q};
}

std::string best_doc_title(const std::vector<DocGroup>& groups) {
    const RetrievedDoc* best = nullptr;
    for (const DocGroup& group : groups) {
        for (const RetrievedDoc& doc : group) {
            if (best == nullptr || doc.score > best->score) best = &doc;
        }
    }
    return best ? best->title : std::string{};
}

} // namespace

std::string_view policy_kind_name(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::Replay: return "replay";
    case PolicyKind::TemplateDecompose: return "template_decompose";
    case PolicyKind::TemplateMonolithic: return "template_monolithic";
    }
    return "unknown";
}

std::optional<PolicyKind> policy_kind_from_name(std::string_view name) {
    if (name == "replay") return PolicyKind::Replay;
    if (name == "template_decompose") return PolicyKind::TemplateDecompose;
    if (name == "template_monolithic") return PolicyKind::TemplateMonolithic;
    return std::nullopt;
}

std::vector<std::string> policy_kind_names() {
    return {"replay", "template_decompose", "template_monolithic"};
}

ScriptedPolicy ScriptedPolicy::replay_of(const ReasoningTrace& trace, int seed) {
    ScriptedPolicy policy;
    policy.kind = PolicyKind::Replay;
    policy.perturbation_seed = seed;
    std::size_t answers = 0;
    for (const Turn& turn : trace.turns) {
        PolicyAction action;
        action.kind = turn.kind;
        switch (turn.kind) {
        case TurnKind::Think: action.text = turn.content; break;
        case TurnKind::Search: action.subqueries = turn.subqueries; break;
        case TurnKind::Information: action.doc_groups = turn.doc_groups; break;
        case TurnKind::Answer:
            action.text = turn.content;
            ++answers;
            break;
        }
        policy.script.push_back(std::move(action));
    }
    if (answers != 1 || policy.script.empty() || policy.script.back().kind != TurnKind::Answer) {
        throw std::invalid_argument(
            "replay_of: trace must end with exactly one answer turn to be replayable");
    }
    return policy;
}

ScriptedPolicy ScriptedPolicy::template_decompose(std::optional<std::string> answer, int seed) {
    ScriptedPolicy policy;
    policy.kind = PolicyKind::TemplateDecompose;
    policy.answer_slot = std::move(answer);
    policy.perturbation_seed = seed;
    return policy;
}

ScriptedPolicy ScriptedPolicy::template_monolithic(std::optional<std::string> answer, int seed) {
    ScriptedPolicy policy;
    policy.kind = PolicyKind::TemplateMonolithic;
    policy.answer_slot = std::move(answer);
    policy.perturbation_seed = seed;
    return policy;
}

Episode run_episode(const std::string& question, const std::vector<std::string>& golden,
                    const ScriptedPolicy& policy, const Corpus* corpus,
                    const EmbeddingProvider& provider, const RewardConfig& reward_cfg,
                    const AggregationPolicy& agg_policy, const HarnessSection& harness_cfg) {
    ReasoningTrace built;
    built.question = question;
    std::vector<DocGroup> seen_groups;
    int rounds = 0;
    bool answered = false;

    const std::string filler = filler_for(policy.perturbation_seed);
    const bool blank_answer = policy.kind == PolicyKind::Replay && policy.perturbation_seed > 0 &&
                              policy.perturbation_seed % 4 == 3;

    auto push_think = [&built](std::string text) {
        Turn turn;
        turn.kind = TurnKind::Think;
        turn.content = std::move(text);
        built.turns.push_back(std::move(turn));
    };
    auto push_answer = [&](std::string text) {
        Turn turn;
        turn.kind = TurnKind::Answer;
        turn.content = std::move(text);
        built.turns.push_back(std::move(turn));
        answered = true;
    };
    auto force_truncation = [&] {
        push_think("Turn limit reached; answering with what was retrieved so far.");
        push_answer("");
    };
    // Emits a Search/Information pair; returns false when the turn budget is
    // exhausted (caller must force-terminate).
    auto do_search = [&](std::vector<std::string> subqueries,
                         const std::vector<DocGroup>* scripted_docs) -> bool {
        if (rounds >= harness_cfg.max_turns) return false;
        ++rounds;
        if (!filler.empty()) {
            for (std::string& q : subqueries) q += filler;
        }
        std::vector<DocGroup> groups;
        if (scripted_docs != nullptr) {
            groups = *scripted_docs;
        } else {
            if (corpus == nullptr) {
                throw std::invalid_argument(
                    "run_episode: retrieval-backed policies need a corpus");
            }
            groups.reserve(subqueries.size());
            for (const std::string& q : subqueries) {
                groups.push_back(retrieve(*corpus, q, reward_cfg.k, provider));
            }
        }
        Turn search;
        search.kind = TurnKind::Search;
        search.subqueries = std::move(subqueries);
        built.turns.push_back(std::move(search));
        Turn info;
        info.kind = TurnKind::Information;
        info.doc_groups = groups;
        built.turns.push_back(std::move(info));
        seen_groups.insert(seen_groups.end(), groups.begin(), groups.end());
        return true;
    };

    switch (policy.kind) {
    case PolicyKind::Replay: {
        for (std::size_t i = 0; i < policy.script.size() && !answered; ++i) {
            const PolicyAction& action = policy.script[i];
            switch (action.kind) {
            case TurnKind::Think: push_think(action.text); break;
            case TurnKind::Search: {
                const std::vector<DocGroup>* scripted = nullptr;
                if (i + 1 < policy.script.size() &&
                    policy.script[i + 1].kind == TurnKind::Information) {
                    scripted = &policy.script[i + 1].doc_groups;
                    ++i; // the pair is consumed together
                }
                if (!do_search(action.subqueries, scripted)) {
                    force_truncation();
                }
                break;
            }
            case TurnKind::Information: {
                // Stray information action (malformed script): emit as-is and
                // let the format reward judge the sequence.
                Turn info;
                info.kind = TurnKind::Information;
                info.doc_groups = action.doc_groups;
                built.turns.push_back(std::move(info));
                break;
            }
            case TurnKind::Answer: push_answer(blank_answer ? "" : action.text); break;
            }
        }
        break;
    }
    case PolicyKind::TemplateDecompose:
    case PolicyKind::TemplateMonolithic: {
        const bool decompose = policy.kind == PolicyKind::TemplateDecompose;
        push_think(decompose ? "Breaking the question into focused subqueries before searching."
                             : "Searching for the question as a single query.");
        std::vector<std::string> subqueries =
            decompose ? derive_subqueries(question) : std::vector<std::string>{trim_copy(question)};
        if (!do_search(std::move(subqueries), nullptr)) {
            force_truncation();
            break;
        }
        push_think("The retrieved documents cover the subqueries; answering now.");
        push_answer(policy.answer_slot ? *policy.answer_slot : best_doc_title(seen_groups));
        break;
    }
    }
    if (!answered) force_truncation();

    Episode episode;
    episode.question = question;
    episode.raw = render_trace(built, static_cast<std::size_t>(harness_cfg.doc_char_budget));
    episode.trace = parse_trace(episode.raw, question).trace;
    episode.breakdown = score_trace(episode.raw, question, golden, provider, reward_cfg);
    episode.aggregated = aggregate(agg_policy, episode.breakdown);
    return episode;
}

namespace {

int derive_perturbation_seed(unsigned long long base, std::size_t question_idx, int rollout_idx) {
    if (rollout_idx == 0) return 0; // one unperturbed rollout per group
    const std::uint64_t mixed =
        splitmix64(base ^ splitmix64(static_cast<std::uint64_t>(question_idx) * 0x100000001b3ull +
                                     static_cast<std::uint64_t>(rollout_idx)));
    const int seed = static_cast<int>(mixed % 1000000007ull);
    return seed == 0 ? 1 : seed;
}

} // namespace

BatchReport run_batch(const std::string& dataset_path, const ScriptedPolicy& prototype,
                      const Corpus& corpus, const EmbeddingProvider& provider,
                      const RunConfig& cfg) {
    const std::vector<QaItem> items = load_dataset(dataset_path);
    if (items.empty()) throw InputError("dataset holds no questions: " + dataset_path);

    const AggregationPolicy agg = make_aggregation_policy(cfg.aggregation);

    BatchReport report;
    report.policy_name = std::string(policy_kind_name(prototype.kind));
    report.config_fingerprint = cfg.fingerprint();
    report.group_size = cfg.grpo.group_size;
    report.seed = cfg.harness.seed;
    report.beta_t_used =
        agg.kind == AggregationKind::AdaptiveResidual ? agg.adaptive.beta_t() : agg.beta;
    report.beta_after = agg.adaptive;

    double answer_sum = 0.0;
    double aggregated_sum = 0.0;
    std::size_t rollout_count = 0;

    for (std::size_t qi = 0; qi < items.size(); ++qi) {
        RolloutGroup group;
        group.question = items[qi].question;
        group.golden = items[qi].golden_answers;

        std::vector<double> rewards;
        for (int g = 0; g < cfg.grpo.group_size; ++g) {
            ScriptedPolicy policy = prototype;
            policy.perturbation_seed = derive_perturbation_seed(cfg.harness.seed, qi, g);
            const Episode episode =
                run_episode(items[qi].question, items[qi].golden_answers, policy, &corpus,
                            provider, cfg.reward, agg, cfg.harness);
            Rollout rollout;
            rollout.raw = episode.raw;
            rollout.breakdown = episode.breakdown;
            rollout.aggregated = episode.aggregated;
            rollout.perturbation_seed = policy.perturbation_seed;
            rewards.push_back(episode.aggregated);
            answer_sum += episode.breakdown.r_answer;
            aggregated_sum += episode.aggregated;
            ++rollout_count;
            group.rollouts.push_back(std::move(rollout));
        }
        const std::vector<double> advantages = group_advantages(rewards, cfg.grpo.epsilon);
        for (std::size_t g = 0; g < advantages.size(); ++g) {
            group.rollouts[g].advantage = advantages[g];
        }
        report.groups.push_back(std::move(group));
    }

    report.mean_answer = answer_sum / static_cast<double>(rollout_count);
    report.mean_aggregated = aggregated_sum / static_cast<double>(rollout_count);
    if (agg.kind == AggregationKind::AdaptiveResidual) {
        report.beta_after = advance_beta(agg.adaptive, report.mean_answer);
    }
    return report;
}

std::string report_to_json(const BatchReport& report) {
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["policy"] = report.policy_name;
    j["group_size"] = report.group_size;
    j["seed"] = report.seed;
    j["config_fingerprint"] = report.config_fingerprint;
    j["beta_t_used"] = report.beta_t_used;
    j["beta_t"] = report.beta_after.beta_t();
    j["ema"] = report.beta_after.ema;
    j["episodes"] = nlohmann::ordered_json::array();
    for (const RolloutGroup& group : report.groups) {
        for (std::size_t g = 0; g < group.rollouts.size(); ++g) {
            const Rollout& rollout = group.rollouts[g];
            nlohmann::ordered_json episode;
            episode["question"] = group.question;
            episode["rollout"] = g;
            episode["r_answer"] = rollout.breakdown.r_answer;
            episode["avg_answerability"] = rollout.breakdown.avg_answerability;
            episode["avg_decomposition"] = rollout.breakdown.avg_decomposition;
            episode["r_format"] = rollout.breakdown.r_format;
            episode["aggregated"] = rollout.aggregated;
            episode["advantage"] = rollout.advantage;
            j["episodes"].push_back(std::move(episode));
        }
    }
    j["summary"] = {{"mean_r_answer", report.mean_answer},
                    {"mean_aggregated", report.mean_aggregated}};
    return j.dump(2) + "\n";
}

} // namespace subsearch
