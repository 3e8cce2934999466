"""Network-aware as-you-type top-k search over social tagging data."""

from .corpus import (
    Corpus,
    Triple,
    expand_tags,
    filter_corpus,
    ingest_triples,
    load_cooccurrence,
)
from .completion import (
    CompletionIndex,
    IndexView,
    PrefixCursor,
    build_index,
    open_cursor,
    top_tf,
)
from .graph import (
    ExpDecay,
    MaxProduct,
    NetworkSpec,
    ProximityIterator,
    SimilarityGraph,
    build_network,
    dice_network,
    filter_edges,
    load_edges,
    proximity_map,
)
from .engine import (
    EngineConfig,
    Query,
    ResultEntry,
    Session,
    TopKResult,
    execute,
)
from .reference import reference_ranking, reference_scores, reference_topk
from .evaluation import (
    ExperimentSpec,
    leave_one_out_precision,
    ndcg_trace,
    scalability_sweep,
)
from .synth import generate_synthetic, random_instance

__all__ = [
    "Corpus",
    "Triple",
    "expand_tags",
    "filter_corpus",
    "ingest_triples",
    "load_cooccurrence",
    "CompletionIndex",
    "IndexView",
    "PrefixCursor",
    "build_index",
    "open_cursor",
    "top_tf",
    "ExpDecay",
    "MaxProduct",
    "NetworkSpec",
    "ProximityIterator",
    "SimilarityGraph",
    "build_network",
    "dice_network",
    "filter_edges",
    "load_edges",
    "proximity_map",
    "EngineConfig",
    "Query",
    "ResultEntry",
    "Session",
    "TopKResult",
    "execute",
    "reference_ranking",
    "reference_scores",
    "reference_topk",
    "ExperimentSpec",
    "leave_one_out_precision",
    "ndcg_trace",
    "scalability_sweep",
    "generate_synthetic",
    "random_instance",
]
