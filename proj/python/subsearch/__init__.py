"""Process rewards, trace parsing, and rollout scoring for decomposition-based search agents.

The heavy lifting lives in the compiled ``_core`` extension; this package
re-exports its public surface.
"""

from ._core import (
    AdaptiveBetaState,
    AggregationKind,
    AggregationPolicy,
    Corpus,
    DecompEvent,
    DecompNode,
    DecompositionScore,
    DecompositionTree,
    Embedding,
    EmbeddingProvider,
    EventReward,
    InputError,
    Issue,
    LeafReward,
    ParseReport,
    QaItem,
    ReasoningTrace,
    ReferenceHashedProvider,
    RetrievedDoc,
    RewardBreakdown,
    RewardConfig,
    Turn,
    TurnKind,
    __version__,
    advance_beta,
    aggregate,
    answer_reward,
    answerability_from_embeddings,
    build_decomposition_tree,
    cosine,
    decomposition_events,
    decomposition_from_embeddings,
    escape_hash_separator,
    fnv1a64,
    format_reward,
    group_advantages,
    ingest_corpus,
    intermediate_scalar,
    load_dataset,
    normalize_answer,
    parse_trace,
    render_information,
    render_trace,
    retrieve,
    score_trace,
    searched_leaves,
    simulate_to_json,
    split_subqueries,
)

__all__ = [
    "AdaptiveBetaState",
    "AggregationKind",
    "AggregationPolicy",
    "Corpus",
    "DecompEvent",
    "DecompNode",
    "DecompositionScore",
    "DecompositionTree",
    "Embedding",
    "EmbeddingProvider",
    "EventReward",
    "InputError",
    "Issue",
    "LeafReward",
    "ParseReport",
    "QaItem",
    "ReasoningTrace",
    "ReferenceHashedProvider",
    "RetrievedDoc",
    "RewardBreakdown",
    "RewardConfig",
    "Turn",
    "TurnKind",
    "__version__",
    "advance_beta",
    "aggregate",
    "answer_reward",
    "answerability_from_embeddings",
    "build_decomposition_tree",
    "cosine",
    "decomposition_events",
    "decomposition_from_embeddings",
    "escape_hash_separator",
    "fnv1a64",
    "format_reward",
    "group_advantages",
    "ingest_corpus",
    "intermediate_scalar",
    "load_dataset",
    "normalize_answer",
    "parse_trace",
    "render_information",
    "render_trace",
    "retrieve",
    "score_trace",
    "searched_leaves",
    "simulate_to_json",
    "split_subqueries",
]
