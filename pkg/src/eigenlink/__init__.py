"""Unsupervised entity linking via per-document low-rank subspaces."""

from .dataset import DocumentTask, Mention, attach_candidates, load_dataset, write_dataset
from .eigenthemes import (
    DocumentMatrix,
    LinkResult,
    MentionLink,
    build_document_matrix,
    learn_subspace,
    link_document,
    score_candidate,
)
from .embeddings import EmbeddingStore, load_embeddings, unit_normalize
from .index import (
    CandidateList,
    InvertedIndex,
    build_index,
    generate_candidates,
    oracle_recall,
    tokenize,
)
from .kg import EntityCatalog, EntityRecord, compute_degrees, load_catalog, write_catalog
from .linalg import Subspace, symmetric_eigh, truncated_svd, weighted_sscp
from .pipeline import LinkContext, RunConfig, link_one, run_documents
from .synth import SynthConfig, generate
from .weighting import WeightScheme, degree_ranking, mention_weights, reciprocal_rank_weight

__version__ = "0.1.0"

__all__ = [
    "CandidateList",
    "DocumentMatrix",
    "DocumentTask",
    "EmbeddingStore",
    "EntityCatalog",
    "EntityRecord",
    "InvertedIndex",
    "LinkContext",
    "LinkResult",
    "Mention",
    "MentionLink",
    "RunConfig",
    "Subspace",
    "SynthConfig",
    "WeightScheme",
    "attach_candidates",
    "build_document_matrix",
    "build_index",
    "compute_degrees",
    "degree_ranking",
    "generate",
    "generate_candidates",
    "learn_subspace",
    "link_document",
    "link_one",
    "load_catalog",
    "load_dataset",
    "load_embeddings",
    "mention_weights",
    "oracle_recall",
    "reciprocal_rank_weight",
    "run_documents",
    "score_candidate",
    "symmetric_eigh",
    "tokenize",
    "truncated_svd",
    "unit_normalize",
    "weighted_sscp",
    "write_catalog",
    "write_dataset",
]
