"""Object-tag link prediction on user/object/tag graphs.

The library builds SPPMI-weighted co-occurrence graphs over objects (via
shared users) and over tags (via shared objects), encodes both with
two-layer graph convolutions, and trains an inner-product decoder with
noise-contrastive estimation. Graph-free baselines, ablation variants,
ranking metrics, and a reproducible CLI ship alongside.
"""

__version__ = "0.1.0"

from .baselines import train_mf, train_skipgram
from .dualgraph import (DualGraphs, NormalizedAdjacency, SppmiGraph,
                        build_graphs, normalize, object_cooccurrence, sppmi,
                        tag_cooccurrence)
from .errors import DataError, NumericalError, TaglinkError
from .evaluation import (EvalReport, Split, SyntheticSpec, evaluate,
                       generate_synthetic, ndcg_at_k, rank_tags, recall_at_k,
                       split_pairs)
from .kg import KnowledgeGraph, compute_stats, load_triples, save_triples, tag_sets
from .trainer import TrainConfig, TrainedModel, load_model, save_model, train

__all__ = [
    "DataError", "DualGraphs", "EvalReport", "KnowledgeGraph",
    "NormalizedAdjacency", "NumericalError", "Split", "SppmiGraph",
    "SyntheticSpec", "TaglinkError", "TrainConfig", "TrainedModel",
    "build_graphs", "compute_stats", "evaluate", "generate_synthetic",
    "load_model", "load_triples", "ndcg_at_k", "normalize",
    "object_cooccurrence", "rank_tags", "recall_at_k", "save_model",
    "save_triples", "split_pairs", "sppmi", "tag_cooccurrence", "tag_sets",
    "train", "train_mf", "train_skipgram",
]
