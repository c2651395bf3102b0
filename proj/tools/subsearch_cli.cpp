// subsearch — command-line surface over the trace scorer and the simulated
// search environment. Subcommands: build-index, score, simulate,
// compare-agg, render. Exit codes: 0 success, 1 internal error, 2 usage or
// input error.

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subsearch/aggregation.hpp"
#include "subsearch/config.hpp"
#include "subsearch/grpo.hpp"
#include "subsearch/harness.hpp"
#include "subsearch/parser.hpp"
#include "subsearch/rewards.hpp"
#include "subsearch/search_env.hpp"
#include "subsearch/wire.hpp"

namespace {

using nlohmann::ordered_json;

std::string fmt_double(double value) {
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw subsearch::InputError(path + ": cannot open file");
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

subsearch::RunConfig load_config_or_default(const std::string& path) {
    if (path.empty()) {
        return subsearch::RunConfig{};
    }
    return subsearch::load_config(path);
}

struct BreakdownRow {
    double r_answer = 0.0;
    double avg_answerability = 0.0;
    double avg_decomposition = 0.0;
    double r_format = 0.0;
};

// ---------------------------------------------------------------------------
// build-index

int cmd_build_index(const std::string& corpus_path, const std::string& config_path) {
    auto cfg = load_config_or_default(config_path);
    auto provider = subsearch::make_provider(cfg.embedder);
    auto corpus = subsearch::ingest_corpus(corpus_path, *provider);
    std::cout << "docs: " << corpus.size() << "\n"
              << "embedder: " << corpus.provider_fingerprint << "\n"
              << "digest: " << corpus.content_digest() << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// score

ordered_json breakdown_to_json(const subsearch::RewardBreakdown& b, double aggregated) {
    ordered_json j;
    j["r_answer"] = b.r_answer;
    j["avg_answerability"] = b.avg_answerability;
    j["avg_decomposition"] = b.avg_decomposition;
    j["r_format"] = b.r_format;
    j["aggregated"] = aggregated;
    j["f_format"] = b.f_format;
    j["f_retrieval"] = b.f_retrieval;
    j["has_answer"] = b.has_answer;
    ordered_json leaves = ordered_json::array();
    for (const auto& leaf : b.answerability_per_leaf) {
        leaves.push_back({{"node", leaf.node_id}, {"value", leaf.value}});
    }
    j["answerability_per_leaf"] = std::move(leaves);
    ordered_json events = ordered_json::array();
    for (const auto& ev : b.decomposition_per_event) {
        events.push_back({{"parent", ev.parent_node_id},
                          {"r_coverage", ev.r_coverage},
                          {"r_split", ev.r_split},
                          {"r_decomp", ev.r_decomp}});
    }
    j["decomposition_per_event"] = std::move(events);
    j["notes"] = b.notes;
    return j;
}

int cmd_score(const std::string& trace_path, const std::string& question,
              const std::vector<std::string>& golden, const std::string& config_path,
              bool as_json) {
    auto cfg = load_config_or_default(config_path);
    auto provider = subsearch::make_provider(cfg.embedder);
    auto raw = read_text_file(trace_path);
    auto breakdown = subsearch::score_trace(raw, question, golden, *provider, cfg.reward);
    auto policy = subsearch::make_aggregation_policy(cfg.aggregation);
    double aggregated = subsearch::aggregate(policy, breakdown);

    if (as_json) {
        std::cout << breakdown_to_json(breakdown, aggregated).dump(2) << "\n";
        return 0;
    }
    std::cout << "r_answer: " << fmt_double(breakdown.r_answer) << "\n"
              << "avg_answerability: " << fmt_double(breakdown.avg_answerability) << "\n"
              << "avg_decomposition: " << fmt_double(breakdown.avg_decomposition) << "\n"
              << "r_format: " << fmt_double(breakdown.r_format) << "\n"
              << "aggregated: " << fmt_double(aggregated) << "\n"
              << "f_format: " << (breakdown.f_format ? "true" : "false") << "\n"
              << "f_retrieval: " << (breakdown.f_retrieval ? "true" : "false") << "\n";
    for (const auto& leaf : breakdown.answerability_per_leaf) {
        std::cout << "leaf " << leaf.node_id << ": " << fmt_double(leaf.value) << "\n";
    }
    for (const auto& ev : breakdown.decomposition_per_event) {
        std::cout << "event " << ev.parent_node_id << ": coverage=" << fmt_double(ev.r_coverage)
                  << " split=" << fmt_double(ev.r_split) << " decomp=" << fmt_double(ev.r_decomp)
                  << "\n";
    }
    for (const auto& note : breakdown.notes) {
        std::cout << "note: " << note << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

subsearch::ScriptedPolicy make_policy(const std::string& name, const std::string& replay_trace_path) {
    auto kind = subsearch::policy_kind_from_name(name);
    if (!kind) {
        std::string valid;
        for (const auto& n : subsearch::policy_kind_names()) {
            if (!valid.empty()) valid += ", ";
            valid += n;
        }
        throw subsearch::InputError("unknown policy '" + name + "' (valid: " + valid + ")");
    }
    switch (*kind) {
        case subsearch::PolicyKind::Replay: {
            if (replay_trace_path.empty()) {
                throw subsearch::InputError("--policy replay requires --replay-trace PATH");
            }
            auto raw = read_text_file(replay_trace_path);
            auto parsed = subsearch::parse_trace(raw, "");
            try {
                return subsearch::ScriptedPolicy::replay_of(parsed.trace);
            } catch (const std::invalid_argument& e) {
                throw subsearch::InputError(replay_trace_path + ": " + e.what());
            }
        }
        case subsearch::PolicyKind::TemplateDecompose:
            return subsearch::ScriptedPolicy::template_decompose();
        case subsearch::PolicyKind::TemplateMonolithic:
            return subsearch::ScriptedPolicy::template_monolithic();
    }
    throw std::logic_error("unreachable policy kind");
}

int cmd_simulate(const std::string& dataset_path, const std::string& corpus_path,
                 const std::string& policy_name, int group_size_override,
                 long long seed_override, const std::string& config_path,
                 const std::string& out_path, const std::string& replay_trace_path) {
    auto cfg = load_config_or_default(config_path);
    if (group_size_override > 0) {
        cfg.grpo.group_size = group_size_override;
    }
    if (seed_override >= 0) {
        cfg.harness.seed = static_cast<unsigned long long>(seed_override);
    }
    auto policy = make_policy(policy_name, replay_trace_path);
    auto provider = subsearch::make_provider(cfg.embedder);
    auto corpus = subsearch::ingest_corpus(corpus_path, *provider);
    auto report = subsearch::run_batch(dataset_path, policy, corpus, *provider, cfg);
    auto json_text = subsearch::report_to_json(report);
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            throw subsearch::InputError(out_path + ": cannot open for writing");
        }
        out << json_text;
    } else {
        std::cout << json_text;
    }
    std::size_t episodes = 0;
    for (const auto& g : report.groups) episodes += g.rollouts.size();
    std::cout << "policy=" << report.policy_name << " episodes=" << episodes
              << " mean_r_answer=" << fmt_double(report.mean_answer)
              << " mean_aggregated=" << fmt_double(report.mean_aggregated)
              << " beta_t=" << fmt_double(report.beta_t_used) << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// compare-agg

std::vector<BreakdownRow> rows_from_report_file(const std::string& path) {
    auto text = read_text_file(path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw subsearch::InputError(path + ": invalid report JSON: " + e.what());
    }
    if (!doc.contains("episodes") || !doc["episodes"].is_array()) {
        throw subsearch::InputError(path + ": report has no episodes array");
    }
    std::vector<BreakdownRow> rows;
    for (const auto& ep : doc["episodes"]) {
        BreakdownRow row;
        try {
            row.r_answer = ep.at("r_answer").get<double>();
            row.avg_answerability = ep.at("avg_answerability").get<double>();
            row.avg_decomposition = ep.at("avg_decomposition").get<double>();
            row.r_format = ep.at("r_format").get<double>();
        } catch (const nlohmann::json::exception& e) {
            throw subsearch::InputError(path + ": malformed episode entry: " + e.what());
        }
        rows.push_back(row);
    }
    if (rows.empty()) {
        throw subsearch::InputError(path + ": report holds no episodes");
    }
    return rows;
}

int cmd_compare_agg(const std::vector<std::string>& report_paths, const std::string& dataset_path,
                    const std::string& corpus_path, const std::string& policy_name,
                    const std::string& config_path, const std::string& replay_trace_path) {
    auto cfg = load_config_or_default(config_path);
    std::vector<BreakdownRow> rows;
    if (!report_paths.empty()) {
        for (const auto& path : report_paths) {
            auto part = rows_from_report_file(path);
            rows.insert(rows.end(), part.begin(), part.end());
        }
    } else {
        if (dataset_path.empty() || corpus_path.empty()) {
            throw subsearch::InputError(
                "compare-agg needs either --report FILES or --dataset and --corpus");
        }
        auto policy = make_policy(policy_name, replay_trace_path);
        auto provider = subsearch::make_provider(cfg.embedder);
        auto corpus = subsearch::ingest_corpus(corpus_path, *provider);
        auto report = subsearch::run_batch(dataset_path, policy, corpus, *provider, cfg);
        for (const auto& group : report.groups) {
            for (const auto& rollout : group.rollouts) {
                rows.push_back({rollout.breakdown.r_answer, rollout.breakdown.avg_answerability,
                                rollout.breakdown.avg_decomposition, rollout.breakdown.r_format});
            }
        }
    }

    // One policy object per aggregation scheme, all fed identical inputs.
    subsearch::AggregationPolicy weighted = subsearch::make_aggregation_policy(cfg.aggregation);
    weighted.kind = subsearch::AggregationKind::WeightedSum;
    subsearch::AggregationPolicy residual = weighted;
    residual.kind = subsearch::AggregationKind::Residual;
    subsearch::AggregationPolicy adaptive = weighted;
    adaptive.kind = subsearch::AggregationKind::AdaptiveResidual;

    std::cout << std::left << std::setw(19) << "policy" << std::setw(20) << "mean_aggregated"
              << "punished_correct\n";
    for (const auto* policy : {&weighted, &residual, &adaptive}) {
        double sum = 0.0;
        int punished = 0;
        for (const auto& row : rows) {
            subsearch::RewardBreakdown b;
            b.r_answer = row.r_answer;
            b.avg_answerability = row.avg_answerability;
            b.avg_decomposition = row.avg_decomposition;
            b.r_format = row.r_format;
            double value = subsearch::aggregate(*policy, b);
            sum += value;
            // A correct answer should keep its full terminal reward; anything
            // below 1 + r_format means the intermediate term punished it.
            if (row.r_answer == 1.0 && value < 1.0 + row.r_format - 1e-12) {
                ++punished;
            }
        }
        std::cout << std::left << std::setw(19) << subsearch::aggregation_kind_name(policy->kind)
                  << std::setw(20) << fmt_double(sum / static_cast<double>(rows.size()))
                  << punished << "\n";
    }
    return 0;
}

// ---------------------------------------------------------------------------
// render

int cmd_render(const std::string& episode_path, const std::string& question) {
    auto raw = read_text_file(episode_path);
    auto report = subsearch::parse_trace(raw, question);
    std::cout << subsearch::render_trace(report.trace) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic scorer and simulated search harness for decomposition traces"};
    app.require_subcommand(1);

    // build-index
    auto* build = app.add_subcommand("build-index", "Embed a JSONL corpus and print its summary");
    std::string build_corpus, build_config;
    build->add_option("--corpus", build_corpus, "Corpus JSONL (id, title, text)")->required();
    build->add_option("--config", build_config, "Run config file");

    // score
    auto* score = app.add_subcommand("score", "Score one raw trace file");
    std::string score_trace, score_question, score_config;
    std::vector<std::string> score_golden;
    bool score_json = false;
    score->add_option("--trace", score_trace, "Raw tagged trace file")->required();
    score->add_option("--question", score_question, "Original question");
    score->add_option("--golden", score_golden, "Gold answer (repeatable)");
    score->add_option("--config", score_config, "Run config file");
    score->add_flag("--json", score_json, "Emit JSON instead of the table");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run scripted rollout groups over a dataset");
    std::string sim_dataset, sim_corpus, sim_policy = "template_decompose";
    std::string sim_config, sim_out, sim_replay;
    int sim_group_size = 0;
    long long sim_seed = -1;
    simulate->add_option("--dataset", sim_dataset, "QA JSONL (question, golden_answers)")->required();
    simulate->add_option("--corpus", sim_corpus, "Corpus JSONL")->required();
    simulate->add_option("--policy", sim_policy,
                         "replay | template_decompose | template_monolithic");
    simulate->add_option("--group-size", sim_group_size, "Rollouts per question (overrides config)");
    simulate->add_option("--seed", sim_seed, "Batch seed (overrides config)");
    simulate->add_option("--config", sim_config, "Run config file");
    simulate->add_option("--out", sim_out, "Report JSON path (default: stdout)");
    simulate->add_option("--replay-trace", sim_replay, "Trace file for --policy replay");

    // compare-agg
    auto* compare = app.add_subcommand(
        "compare-agg", "Re-aggregate stored breakdowns under all three policies");
    std::vector<std::string> cmp_reports;
    std::string cmp_dataset, cmp_corpus, cmp_policy = "template_decompose";
    std::string cmp_config, cmp_replay;
    compare->add_option("--report", cmp_reports, "Report JSON file (repeatable)");
    compare->add_option("--dataset", cmp_dataset, "QA JSONL (fresh run form)");
    compare->add_option("--corpus", cmp_corpus, "Corpus JSONL (fresh run form)");
    compare->add_option("--policy", cmp_policy, "Policy for the fresh run form");
    compare->add_option("--config", cmp_config, "Run config file");
    compare->add_option("--replay-trace", cmp_replay, "Trace file for --policy replay");

    // render
    auto* render = app.add_subcommand("render", "Parse a trace file and print its canonical form");
    std::string render_episode, render_question;
    render->add_option("--episode", render_episode, "Raw tagged trace file")->required();
    render->add_option("--question", render_question, "Original question");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(build)) {
            return cmd_build_index(build_corpus, build_config);
        }
        if (app.got_subcommand(score)) {
            return cmd_score(score_trace, score_question, score_golden, score_config, score_json);
        }
        if (app.got_subcommand(simulate)) {
            return cmd_simulate(sim_dataset, sim_corpus, sim_policy, sim_group_size, sim_seed,
                                sim_config, sim_out, sim_replay);
        }
        if (app.got_subcommand(compare)) {
            return cmd_compare_agg(cmp_reports, cmp_dataset, cmp_corpus, cmp_policy, cmp_config,
                                   cmp_replay);
        }
        if (app.got_subcommand(render)) {
            return cmd_render(render_episode, render_question);
        }
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const subsearch::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
