// Python bindings for the subsearch core: trace parsing, process rewards,
// aggregation, group-relative advantages, retrieval, and batch simulation.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <stdexcept>
#include <string>

#include "subsearch/aggregation.hpp"
#include "subsearch/config.hpp"
#include "subsearch/embedder.hpp"
#include "subsearch/grpo.hpp"
#include "subsearch/harness.hpp"
#include "subsearch/parser.hpp"
#include "subsearch/rewards.hpp"
#include "subsearch/search_env.hpp"
#include "subsearch/trace.hpp"
#include "subsearch/wire.hpp"

namespace py = pybind11;
using namespace subsearch;

namespace {

std::string severity_name(IssueSeverity severity) {
    switch (severity) {
    case IssueSeverity::Structural: return "structural";
    case IssueSeverity::Retrieval: return "retrieval";
    case IssueSeverity::Cosmetic: return "cosmetic";
    case IssueSeverity::Advisory: return "advisory";
    }
    return "unknown";
}

// One-call batch simulation mirroring the CLI's simulate command; returns the
// deterministic report JSON.
std::string simulate_to_json(const std::string& dataset_path, const std::string& corpus_path,
                             const std::string& policy_name, long long seed, int group_size,
                             const std::string& config_path) {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (seed >= 0) cfg.harness.seed = static_cast<unsigned long long>(seed);
    if (group_size > 0) cfg.grpo.group_size = group_size;

    const auto kind = policy_kind_from_name(policy_name);
    if (!kind.has_value() || *kind == PolicyKind::Replay) {
        throw InputError("simulate_to_json supports policies template_decompose and "
                         "template_monolithic, got '" +
                         policy_name + "'");
    }
    const ScriptedPolicy prototype = *kind == PolicyKind::TemplateDecompose
                                         ? ScriptedPolicy::template_decompose()
                                         : ScriptedPolicy::template_monolithic();

    const std::unique_ptr<EmbeddingProvider> provider = make_provider(cfg.embedder);
    const Corpus corpus = ingest_corpus(corpus_path, *provider);
    const BatchReport report = run_batch(dataset_path, prototype, corpus, *provider, cfg);
    return report_to_json(report);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Process rewards, trace parsing, and rollout scoring for "
              "decomposition-based search agents";
    m.attr("__version__") = "0.1.0";

    py::register_exception<InputError>(m, "InputError");

    // ------------------------------------------------------------ embeddings
    py::class_<Embedding>(m, "Embedding", "Unit-norm dense vector")
        .def(py::init<>())
        .def_readonly("values", &Embedding::values)
        .def("dim", &Embedding::dim)
        .def_static("normalized", &Embedding::normalized, py::arg("values"),
                    "L2-normalize a raw vector (zero maps to the uniform unit vector)")
        .def("__eq__", [](const Embedding& a, const Embedding& b) { return a == b; })
        .def("__len__", &Embedding::dim)
        .def("__repr__", [](const Embedding& e) {
            return "Embedding(dim=" + std::to_string(e.dim()) + ")";
        });

    m.def("cosine", &cosine, py::arg("a"), py::arg("b"),
          "Dot product of two unit vectors (raises on dimension mismatch)");
    m.def("fnv1a64", [](const std::string& bytes) { return fnv1a64(bytes); }, py::arg("bytes"),
          "64-bit FNV-1a hash of a byte string");

    py::class_<EmbeddingProvider>(m, "EmbeddingProvider", "Abstract text embedder")
        .def("embed", &EmbeddingProvider::embed, py::arg("texts"))
        .def("embed_one", &EmbeddingProvider::embed_one, py::arg("text"))
        .def("dim", &EmbeddingProvider::dim)
        .def("fingerprint", &EmbeddingProvider::fingerprint);

    py::class_<ReferenceHashedProvider, EmbeddingProvider>(
        m, "ReferenceHashedProvider",
        "Deterministic hashed bag-of-words embedder (lowercase, split on "
        "non-alphanumeric bytes, FNV-1a bucket, L2-normalize)")
        .def(py::init<std::size_t>(), py::arg("dim") = 256);

    // ----------------------------------------------------------------- trace
    py::enum_<TurnKind>(m, "TurnKind")
        .value("THINK", TurnKind::Think)
        .value("SEARCH", TurnKind::Search)
        .value("INFORMATION", TurnKind::Information)
        .value("ANSWER", TurnKind::Answer);

    py::class_<RetrievedDoc>(m, "RetrievedDoc")
        .def(py::init<>())
        .def_readwrite("doc_id", &RetrievedDoc::doc_id)
        .def_readwrite("title", &RetrievedDoc::title)
        .def_readwrite("body", &RetrievedDoc::body)
        .def_readwrite("score", &RetrievedDoc::score)
        .def("__eq__", [](const RetrievedDoc& a, const RetrievedDoc& b) { return a == b; })
        .def("__repr__", [](const RetrievedDoc& d) {
            return "RetrievedDoc(doc_id='" + d.doc_id + "', title='" + d.title + "')";
        });

    py::class_<Turn>(m, "Turn")
        .def(py::init<>())
        .def_readwrite("kind", &Turn::kind)
        .def_readwrite("content", &Turn::content)
        .def_readwrite("subqueries", &Turn::subqueries)
        .def_readwrite("doc_groups", &Turn::doc_groups)
        .def("__eq__", [](const Turn& a, const Turn& b) { return a == b; });

    py::class_<ReasoningTrace>(m, "ReasoningTrace")
        .def(py::init<>())
        .def_readwrite("question", &ReasoningTrace::question)
        .def_readwrite("turns", &ReasoningTrace::turns)
        .def_readwrite("answer", &ReasoningTrace::answer)
        .def("__eq__",
             [](const ReasoningTrace& a, const ReasoningTrace& b) { return a == b; });

    // ---------------------------------------------------------------- parser
    py::class_<Issue>(m, "Issue")
        .def_readonly("position", &Issue::position)
        .def_readonly("message", &Issue::message)
        .def_property_readonly(
            "code", [](const Issue& i) { return std::string(issue_code_name(i.code)); })
        .def_property_readonly(
            "severity", [](const Issue& i) { return severity_name(issue_severity(i.code)); })
        .def("__repr__", [](const Issue& i) {
            return "Issue(" + std::string(issue_code_name(i.code)) + " @ " +
                   std::to_string(i.position) + ")";
        });

    py::class_<ParseReport>(m, "ParseReport")
        .def_readonly("trace", &ParseReport::trace)
        .def_readonly("f_format", &ParseReport::f_format)
        .def_readonly("f_retrieval", &ParseReport::f_retrieval)
        .def_readonly("issues", &ParseReport::issues)
        .def("has_structural_issue", &ParseReport::has_structural_issue);

    m.def("parse_trace", &parse_trace, py::arg("raw"), py::arg("question") = "",
          "Parse a tagged rollout; total over arbitrary bytes, never raises");
    m.def("split_subqueries", &split_subqueries, py::arg("search_content"));
    m.def("render_information", &render_information, py::arg("groups"),
          py::arg("group_char_budget") = 0);
    m.def("render_trace", &render_trace, py::arg("trace"), py::arg("group_char_budget") = 0,
          "Canonical tagged rendering; parse(render(parse(x).trace)) is a fixpoint");
    m.def("escape_hash_separator", &escape_hash_separator, py::arg("text"));

    // ------------------------------------------------------------ decomposition
    py::class_<DecompNode>(m, "DecompNode")
        .def_readonly("level", &DecompNode::level)
        .def_readonly("index", &DecompNode::index)
        .def_readonly("query_text", &DecompNode::query_text)
        .def_readonly("parent", &DecompNode::parent)
        .def_readonly("children", &DecompNode::children)
        .def_readonly("docs", &DecompNode::docs)
        .def_readonly("order", &DecompNode::order)
        .def("id", &DecompNode::id);

    py::class_<DecompositionTree>(m, "DecompositionTree")
        .def_readonly("nodes", &DecompositionTree::nodes)
        .def_readonly("notes", &DecompositionTree::notes);

    py::class_<DecompEvent>(m, "DecompEvent")
        .def_readonly("parent", &DecompEvent::parent)
        .def_readonly("children", &DecompEvent::children);

    m.def("build_decomposition_tree", &build_decomposition_tree, py::arg("trace"),
          py::arg("provider"), py::keep_alive<0, 2>());
    m.def("decomposition_events", &decomposition_events, py::arg("tree"));
    m.def("searched_leaves", &searched_leaves, py::arg("tree"));

    // --------------------------------------------------------------- rewards
    py::class_<RewardConfig>(m, "RewardConfig")
        .def(py::init<>())
        .def_readwrite("k", &RewardConfig::k)
        .def_readwrite("alpha", &RewardConfig::alpha)
        .def_readwrite("beta_split", &RewardConfig::beta_split)
        .def_readwrite("lambda_structure", &RewardConfig::lambda_structure)
        .def_readwrite("lambda_retrieval", &RewardConfig::lambda_retrieval)
        .def_readwrite("clamp_negative_sims", &RewardConfig::clamp_negative_sims);

    py::class_<LeafReward>(m, "LeafReward")
        .def_readonly("node_id", &LeafReward::node_id)
        .def_readonly("value", &LeafReward::value);

    py::class_<EventReward>(m, "EventReward")
        .def_readonly("parent_node_id", &EventReward::parent_node_id)
        .def_readonly("r_coverage", &EventReward::r_coverage)
        .def_readonly("r_split", &EventReward::r_split)
        .def_readonly("r_decomp", &EventReward::r_decomp);

    py::class_<RewardBreakdown>(m, "RewardBreakdown")
        .def(py::init<>())
        .def_readwrite("r_answer", &RewardBreakdown::r_answer)
        .def_readonly("answerability_per_leaf", &RewardBreakdown::answerability_per_leaf)
        .def_readonly("decomposition_per_event", &RewardBreakdown::decomposition_per_event)
        .def_readwrite("r_format", &RewardBreakdown::r_format)
        .def_readwrite("avg_answerability", &RewardBreakdown::avg_answerability)
        .def_readwrite("avg_decomposition", &RewardBreakdown::avg_decomposition)
        .def_readwrite("f_format", &RewardBreakdown::f_format)
        .def_readwrite("f_retrieval", &RewardBreakdown::f_retrieval)
        .def_readwrite("has_answer", &RewardBreakdown::has_answer)
        .def_readonly("notes", &RewardBreakdown::notes);

    py::class_<DecompositionScore>(m, "DecompositionScore")
        .def_readonly("r_coverage", &DecompositionScore::r_coverage)
        .def_readonly("r_split", &DecompositionScore::r_split)
        .def_readonly("r_decomp", &DecompositionScore::r_decomp);

    m.def("normalize_answer", &normalize_answer, py::arg("text"),
          "Lowercase, strip punctuation, drop a/an/the, collapse whitespace");
    m.def("answer_reward", &answer_reward, py::arg("generated"), py::arg("golden"));
    m.def("answerability_from_embeddings", &answerability_from_embeddings, py::arg("query"),
          py::arg("ranked_docs"), py::arg("k"), py::arg("clamp") = true);
    m.def("decomposition_from_embeddings", &decomposition_from_embeddings, py::arg("parent"),
          py::arg("children"), py::arg("cfg") = RewardConfig{});
    m.def("format_reward", &format_reward, py::arg("report"), py::arg("cfg") = RewardConfig{});
    m.def(
        "score_trace",
        [](const std::string& raw, const std::string& question,
           const std::vector<std::string>& golden, const EmbeddingProvider& provider,
           const RewardConfig& cfg) { return score_trace(raw, question, golden, provider, cfg); },
        py::arg("raw"), py::arg("question"), py::arg("golden"), py::arg("provider"),
        py::arg("cfg") = RewardConfig{},
        "Full scoring pipeline over one raw rollout (docs come from the trace)");

    // ----------------------------------------------------------- aggregation
    py::enum_<AggregationKind>(m, "AggregationKind")
        .value("WEIGHTED_SUM", AggregationKind::WeightedSum)
        .value("RESIDUAL", AggregationKind::Residual)
        .value("ADAPTIVE_RESIDUAL", AggregationKind::AdaptiveResidual);

    py::class_<AdaptiveBetaState>(m, "AdaptiveBetaState")
        .def(py::init<>())
        .def_readwrite("ema", &AdaptiveBetaState::ema)
        .def_readwrite("gamma", &AdaptiveBetaState::gamma)
        .def_readwrite("beta_min", &AdaptiveBetaState::beta_min)
        .def_readwrite("beta_max", &AdaptiveBetaState::beta_max)
        .def_readwrite("step", &AdaptiveBetaState::step)
        .def("beta_t", &AdaptiveBetaState::beta_t);

    py::class_<AggregationPolicy>(m, "AggregationPolicy")
        .def(py::init<>())
        .def_readwrite("kind", &AggregationPolicy::kind)
        .def_readwrite("alpha_w", &AggregationPolicy::alpha_w)
        .def_readwrite("beta", &AggregationPolicy::beta)
        .def_readwrite("adaptive", &AggregationPolicy::adaptive);

    m.def("intermediate_scalar", &intermediate_scalar, py::arg("breakdown"));
    m.def("aggregate", &aggregate, py::arg("policy"), py::arg("breakdown"),
          "Combine a reward breakdown under the policy (never advances beta)");
    m.def("advance_beta", &advance_beta, py::arg("state"), py::arg("batch_mean_answer_reward"),
          "One EMA step from a batch mean answer reward; returns the new state");

    // ------------------------------------------------------------ advantages
    m.def("group_advantages", &group_advantages, py::arg("rewards"), py::arg("epsilon") = 1e-8,
          "Group-relative advantages: (r - mean) / (population std + epsilon)");

    // ------------------------------------------------------------- retrieval
    py::class_<Corpus>(m, "Corpus")
        .def_readonly("docs", &Corpus::docs)
        .def_readonly("provider_fingerprint", &Corpus::provider_fingerprint)
        .def("size", &Corpus::size)
        .def("content_digest", &Corpus::content_digest)
        .def("__len__", &Corpus::size);

    m.def("ingest_corpus", &ingest_corpus, py::arg("path"), py::arg("provider"),
          "Embed a JSONL corpus (id, title, text) into an in-memory dense index");
    m.def("retrieve", &retrieve, py::arg("corpus"), py::arg("subquery"), py::arg("k"),
          py::arg("provider"), "Top-k docs by cosine, scores attached, ties by doc id");

    py::class_<QaItem>(m, "QaItem")
        .def_readonly("question", &QaItem::question)
        .def_readonly("golden_answers", &QaItem::golden_answers);
    m.def("load_dataset", &load_dataset, py::arg("path"));

    // -------------------------------------------------------------- harness
    m.def("simulate_to_json", &simulate_to_json, py::arg("dataset_path"), py::arg("corpus_path"),
          py::arg("policy") = "template_decompose", py::arg("seed") = -1,
          py::arg("group_size") = 0, py::arg("config_path") = "",
          "Run scripted rollout groups over a dataset and return the report JSON");
}
