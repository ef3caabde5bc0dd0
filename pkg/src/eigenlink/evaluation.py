"""Metrics and analyses over linking results.

Mentions are bucketed from the candidate generator's output alone:
"easy" when the top-degree candidate is the gold entity, "hard" when
gold is present but not first, "not_found" when truncation or matching
lost it. Easy/hard metrics are computed within their bucket; "overall"
pools every labeled mention and counts not_found ones as misses.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .dataset import DocumentTask
from .eigenthemes import LinkResult
from .errors import FormatError

BUCKETS = ("easy", "hard", "not_found")


@dataclass
class MentionOutcome:
    doc_id: str
    mention_idx: int
    surface: str
    gold_qid: str | None
    predicted_qid: str | None
    bucket: str | None  # None for unlabeled mentions, excluded from metrics
    rank_of_gold: int | None
    predicted_score: float | None
    gold_score: float | None = None
    nongold_mean: float | None = None


@dataclass
class MetricsReport:
    counts: dict[str, int]
    precision_at_1: dict[str, float]
    mrr: dict[str, float]
    oracle_recall: float

    def to_dict(self) -> dict:
        return {
            "counts": self.counts,
            "precision_at_1": self.precision_at_1,
            "mrr": self.mrr,
            "oracle_recall": self.oracle_recall,
        }


def classify(candidates: Sequence[str], gold: str) -> str:
    """Bucket one labeled mention from its degree-sorted candidate list."""
    if gold not in candidates:
        return "not_found"
    return "easy" if candidates[0] == gold else "hard"


def _finite(x: float | None) -> float | None:
    return x if x is not None and math.isfinite(x) else None


def build_outcomes(results: Iterable[LinkResult]) -> list[MentionOutcome]:
    """Flatten link results into per-mention outcome records."""
    outcomes: list[MentionOutcome] = []
    for result in results:
        for idx, ml in enumerate(result.mentions):
            gold = ml.gold_qid
            bucket = classify(ml.candidates, gold) if gold is not None else None
            rank_of_gold = None
            gold_score = None
            nongold: list[float] = []
            predicted_score = None
            for pos, (qid, score) in enumerate(ml.ranking, start=1):
                if qid == ml.predicted_qid and predicted_score is None:
                    predicted_score = _finite(score)
                if gold is None:
                    continue
                if qid == gold:
                    rank_of_gold = pos
                    gold_score = _finite(score)
                elif math.isfinite(score):
                    nongold.append(score)
            outcomes.append(
                MentionOutcome(
                    doc_id=result.doc_id,
                    mention_idx=idx,
                    surface=ml.surface,
                    gold_qid=gold,
                    predicted_qid=ml.predicted_qid,
                    bucket=bucket,
                    rank_of_gold=rank_of_gold,
                    predicted_score=predicted_score,
                    gold_score=gold_score,
                    nongold_mean=float(np.mean(nongold)) if nongold else None,
                )
            )
    return outcomes


def _select(outcomes: Iterable[MentionOutcome], bucket: str) -> list[MentionOutcome]:
    if bucket == "overall":
        return [o for o in outcomes if o.bucket is not None]
    if bucket not in BUCKETS:
        raise ValueError(f"unknown bucket {bucket!r}")
    return [o for o in outcomes if o.bucket == bucket]


def precision_at_1(outcomes: Iterable[MentionOutcome], bucket: str = "overall") -> float:
    """Fraction of the bucket's mentions whose prediction is the gold entity."""
    selected = _select(outcomes, bucket)
    if not selected:
        return 0.0
    correct = sum(
        1 for o in selected if o.predicted_qid is not None and o.predicted_qid == o.gold_qid
    )
    return correct / len(selected)


def mrr(outcomes: Iterable[MentionOutcome], bucket: str = "overall") -> float:
    """Mean reciprocal rank of gold in the method ranking; absent gold counts 0."""
    selected = _select(outcomes, bucket)
    if not selected:
        return 0.0
    total = sum(1.0 / o.rank_of_gold for o in selected if o.rank_of_gold is not None)
    return total / len(selected)


def bucket_counts(outcomes: Iterable[MentionOutcome]) -> dict[str, int]:
    counts = {b: 0 for b in BUCKETS}
    unlabeled = 0
    for o in outcomes:
        if o.bucket is None:
            unlabeled += 1
        else:
            counts[o.bucket] += 1
    counts["total"] = counts["easy"] + counts["hard"] + counts["not_found"]
    counts["unlabeled"] = unlabeled
    return counts


def metrics_report(outcomes: Sequence[MentionOutcome]) -> MetricsReport:
    counts = bucket_counts(outcomes)
    total = counts["total"]
    found = counts["easy"] + counts["hard"]
    return MetricsReport(
        counts=counts,
        precision_at_1={b: precision_at_1(outcomes, b) for b in ("overall", "easy", "hard")},
        mrr={b: mrr(outcomes, b) for b in ("overall", "easy", "hard")},
        oracle_recall=found / total if total else 0.0,
    )


@dataclass
class ScoreGapReport:
    mean: float
    ci_low: float
    ci_high: float
    n_mentions: int

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
            "n_mentions": self.n_mentions,
        }


def score_gap(
    outcomes: Iterable[MentionOutcome],
    resamples: int = 10_000,
    seed: int = 0,
) -> ScoreGapReport | None:
    """Relative gap (G - N) / N between gold and mean non-gold scores.

    Only mentions where gold was found, scored, and at least one other
    candidate carries a positive mean score are eligible. The CI is a
    seeded percentile bootstrap.
    """
    gaps = [
        (o.gold_score - o.nongold_mean) / o.nongold_mean
        for o in outcomes
        if o.gold_score is not None and o.nongold_mean is not None and o.nongold_mean > 0.0
    ]
    if not gaps:
        return None
    arr = np.asarray(gaps)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, len(arr), size=(resamples, len(arr)))
    means = arr[idx].mean(axis=1)
    lo, hi = np.percentile(means, [2.5, 97.5])
    return ScoreGapReport(
        mean=float(arr.mean()),
        ci_low=float(lo),
        ci_high=float(hi),
        n_mentions=len(arr),
    )


def mutilation(
    docs: Sequence[DocumentTask],
    runner: Callable[[list[DocumentTask]], list[LinkResult]],
    fractions: Sequence[float],
    seed: int = 0,
    repeats: int = 10,
) -> dict[float, float]:
    """Overall P@1 after keeping only a fraction of the easy mentions.

    Hard and not-found mentions always stay. Each (fraction, repeat)
    pair subsamples independently from a seed derived from the root
    seed; fraction 1.0 short-circuits to the unmodified dataset.
    """
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise ValueError(f"fractions must lie in [0, 1], got {f}")
    easy_slots = [
        (di, mi)
        for di, doc in enumerate(docs)
        for mi, m in enumerate(doc.mentions)
        if m.gold_qid is not None
        and m.candidates is not None
        and classify(m.candidates.candidates, m.gold_qid) == "easy"
    ]

    results: dict[float, float] = {}
    for f in fractions:
        if f >= 1.0:
            results[f] = precision_at_1(build_outcomes(runner(list(docs))), "overall")
            continue
        keep = round(f * len(easy_slots))
        values = []
        for rep in range(repeats):
            rng = np.random.default_rng([seed, int(round(f * 1000)), rep])
            kept_idx = rng.choice(len(easy_slots), size=keep, replace=False) if keep else []
            kept = {easy_slots[i] for i in kept_idx}
            dropped = set(easy_slots) - kept
            subsampled: list[DocumentTask] = []
            for di, doc in enumerate(docs):
                mentions = [
                    m for mi, m in enumerate(doc.mentions) if (di, mi) not in dropped
                ]
                if mentions:
                    subsampled.append(
                        DocumentTask(
                            doc_id=doc.doc_id,
                            mentions=mentions,
                            tokens=doc.tokens,
                            nouns=doc.nouns,
                        )
                    )
            values.append(precision_at_1(build_outcomes(runner(subsampled)), "overall"))
        results[f] = float(np.mean(values))
    return results


CSV_HEADER = [
    "doc_id",
    "mention_idx",
    "surface",
    "gold_qid",
    "predicted_qid",
    "bucket",
    "rank_of_gold",
    "score",
]


def write_predictions(outcomes: Iterable[MentionOutcome], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for o in outcomes:
            writer.writerow(
                [
                    o.doc_id,
                    o.mention_idx,
                    o.surface,
                    o.gold_qid or "",
                    o.predicted_qid or "",
                    o.bucket or "",
                    o.rank_of_gold if o.rank_of_gold is not None else "",
                    "%.12g" % o.predicted_score if o.predicted_score is not None else "",
                ]
            )


def read_predictions(path: str) -> list[MentionOutcome]:
    outcomes: list[MentionOutcome] = []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != CSV_HEADER:
            raise FormatError(f"unexpected predictions header: {header}")
        for row in reader:
            (doc_id, mention_idx, surface, gold, predicted, bucket, rank, score) = row
            outcomes.append(
                MentionOutcome(
                    doc_id=doc_id,
                    mention_idx=int(mention_idx),
                    surface=surface,
                    gold_qid=gold or None,
                    predicted_qid=predicted or None,
                    bucket=bucket or None,
                    rank_of_gold=int(rank) if rank else None,
                    predicted_score=float(score) if score else None,
                )
            )
    return outcomes
