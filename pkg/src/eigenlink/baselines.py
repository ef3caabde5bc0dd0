"""Non-subspace linking methods sharing the LinkResult contract.

NameMatch resolves by exact (case-insensitive, whitespace-collapsed)
name equality and degree. Degree takes the candidate generator's order
at face value. Avg replaces the subspace by the weighted centroid of
the document matrix. LocalCtxt/GlobalCtxt rank by cosine between entity
descriptions and a context embedding.
"""

from __future__ import annotations

import math

import numpy as np

from .dataset import DocumentTask
from .embeddings import EmbeddingStore, unit_normalize
from .eigenthemes import (
    DocumentMatrix,
    LinkResult,
    MentionLink,
    _rank_mention,
    build_document_matrix,
)
from .errors import EmptyDocumentError
from .index import CandidateList
from .kg import EntityCatalog
from .weighting import (
    WeightScheme,
    context_scores,
    global_context_vector,
    local_context_vector,
)


def build_name_lookup(
    catalog: EntityCatalog, include_aliases: bool = False
) -> dict[str, list[str]]:
    """Normalized name -> qids sorted by degree descending, qid ascending."""
    lookup: dict[str, list[str]] = {}
    for rec in catalog:
        names = [rec.name] + (rec.aliases if include_aliases else [])
        for name in names:
            lookup.setdefault(_normalize_name(name), []).append(rec.qid)
    for key, qids in lookup.items():
        uniq = sorted(set(qids), key=lambda q: (-catalog.records[q].degree, q))
        lookup[key] = uniq
    return lookup


def _normalize_name(name: str) -> str:
    return " ".join(name.casefold().split())


def name_match(
    mention: str,
    catalog: EntityCatalog,
    name_lookup: dict[str, list[str]] | None = None,
    include_aliases: bool = False,
) -> list[tuple[str, float]]:
    """Exact-name matches ranked by degree; empty when nothing matches."""
    if name_lookup is None:
        name_lookup = build_name_lookup(catalog, include_aliases)
    matches = name_lookup.get(_normalize_name(mention), [])
    return [(qid, float(catalog.records[qid].degree)) for qid in matches]


def degree_baseline(
    candidates: CandidateList, catalog: EntityCatalog
) -> list[tuple[str, float]]:
    """The generator's degree order, scored by the degrees themselves."""
    return [(qid, float(catalog.records[qid].degree)) for qid in candidates.candidates]


def avg_scores(
    dm: DocumentMatrix,
    candidates: CandidateList,
    store: EmbeddingStore,
) -> dict[str, float]:
    """Cosine of each candidate against the weighted centroid of the rows.

    A (near-)zero centroid gives every candidate score 0, which the
    ranking tie-break resolves back to degree order.
    """
    total = float(np.sum(dm.weights))
    if total <= 0.0:
        centroid = np.zeros(dm.matrix.shape[1])
    else:
        centroid = (dm.weights[:, None] * dm.matrix).sum(axis=0) / total
    cnorm = math.sqrt(float(centroid @ centroid))
    scores: dict[str, float] = {}
    for qid in candidates.candidates:
        emb = store.get(qid)
        if emb is None:
            scores[qid] = -math.inf
            continue
        if cnorm <= 1e-12:
            scores[qid] = 0.0
            continue
        e = unit_normalize(emb)
        enorm = math.sqrt(float(e @ e))
        scores[qid] = float(e @ centroid) / (enorm * cnorm) if enorm > 0.0 else 0.0
    return scores


def _empty_mention(mention) -> MentionLink:
    return MentionLink(
        surface=mention.surface,
        gold_qid=mention.gold_qid,
        candidates=[],
        ranking=[],
        predicted_qid=None,
    )


def link_document_degree(task: DocumentTask, catalog: EntityCatalog) -> LinkResult:
    mentions = []
    for mention in task.mentions:
        cands = mention.candidates.candidates if mention.candidates else []
        if not cands:
            mentions.append(_empty_mention(mention))
            continue
        ranking = degree_baseline(mention.candidates, catalog)
        mentions.append(
            MentionLink(
                surface=mention.surface,
                gold_qid=mention.gold_qid,
                candidates=cands,
                ranking=ranking,
                predicted_qid=ranking[0][0],
            )
        )
    return LinkResult(doc_id=task.doc_id, method="degree", mentions=mentions)


def link_document_namematch(
    task: DocumentTask,
    catalog: EntityCatalog,
    name_lookup: dict[str, list[str]],
) -> LinkResult:
    mentions = []
    for mention in task.mentions:
        cands = mention.candidates.candidates if mention.candidates else []
        ranking = name_match(mention.surface, catalog, name_lookup)
        mentions.append(
            MentionLink(
                surface=mention.surface,
                gold_qid=mention.gold_qid,
                candidates=cands,
                ranking=ranking,
                predicted_qid=ranking[0][0] if ranking else None,
            )
        )
    return LinkResult(doc_id=task.doc_id, method="namematch", mentions=mentions)


def link_document_avg(
    task: DocumentTask,
    store: EmbeddingStore,
    scheme: WeightScheme,
    word_store: EmbeddingStore | None = None,
    desc_store: EmbeddingStore | None = None,
    window: int = 5,
) -> LinkResult:
    try:
        dm = build_document_matrix(
            task, store, scheme, word_store=word_store, desc_store=desc_store, window=window
        )
    except EmptyDocumentError:
        dm = None
    mentions = []
    for mention in task.mentions:
        cands = mention.candidates.candidates if mention.candidates else []
        if not cands:
            mentions.append(_empty_mention(mention))
            continue
        if dm is None:
            scores = {qid: -math.inf for qid in cands}
        else:
            scores = avg_scores(dm, mention.candidates, store)
        ranking = _rank_mention(cands, scores)
        finite = any(math.isfinite(s) and s != 0.0 for _, s in ranking)
        mentions.append(
            MentionLink(
                surface=mention.surface,
                gold_qid=mention.gold_qid,
                candidates=cands,
                ranking=ranking,
                predicted_qid=ranking[0][0],
                fallback=None if finite else "degree",
            )
        )
    return LinkResult(doc_id=task.doc_id, method="avg", mentions=mentions)


def link_document_context(
    task: DocumentTask,
    word_store: EmbeddingStore,
    desc_store: EmbeddingStore,
    mode: str = "local",
    window: int = 5,
) -> LinkResult:
    """LocalCtxt / GlobalCtxt: description-vs-context cosine ranking."""
    tokens = task.tokens or []
    if mode == "global":
        context = global_context_vector(tokens, word_store, task.nouns)
    mentions = []
    for mention in task.mentions:
        cands = mention.candidates.candidates if mention.candidates else []
        if not cands:
            mentions.append(_empty_mention(mention))
            continue
        if mode == "local":
            context = local_context_vector(tokens, mention.position, word_store, window)
        cos = context_scores(mention.candidates, context, desc_store)
        if cos is None:
            scores = {qid: 0.0 for qid in cands}
            fallback = "degree"
        else:
            scores = {qid: cos.get(qid, -math.inf) for qid in cands}
            fallback = None
        ranking = _rank_mention(cands, scores)
        mentions.append(
            MentionLink(
                surface=mention.surface,
                gold_qid=mention.gold_qid,
                candidates=cands,
                ranking=ranking,
                predicted_qid=ranking[0][0],
                fallback=fallback,
            )
        )
    return LinkResult(
        doc_id=task.doc_id,
        method="local" if mode == "local" else "global",
        mentions=mentions,
    )
