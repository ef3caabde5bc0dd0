"""Token inverted index over entity names and aliases.

A mention's candidates are the entities for which every mention token
occurs in the entity's name or in one of its aliases, where all tokens
must come from a single name or a single alias (not spread across
them). Candidates are ordered by degree descending, qid ascending on
ties, and truncated to at most T per mention.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from .errors import FormatError
from .kg import EntityCatalog

INDEX_FORMAT = "eigenlink-index"
INDEX_VERSION = 1

_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric codepoint."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class InvertedIndex:
    """token -> ascending-sorted list of qids whose name or an alias contains it."""

    postings: dict[str, list[str]]

    @property
    def vocabulary_size(self) -> int:
        return len(self.postings)


@dataclass
class CandidateList:
    """Degree-sorted candidates for one mention, truncated to T."""

    mention_surface: str
    candidates: list[str]
    truncated: bool = False

    def __len__(self) -> int:
        return len(self.candidates)

    def __contains__(self, qid: str) -> bool:
        return qid in self.candidates


def build_index(catalog: EntityCatalog) -> InvertedIndex:
    """Index every token of every entity's name and aliases."""
    postings: dict[str, set[str]] = {}
    for rec in catalog:
        tokens: set[str] = set(tokenize(rec.name))
        for alias in rec.aliases:
            tokens.update(tokenize(alias))
        for tok in tokens:
            postings.setdefault(tok, set()).add(rec.qid)
    return InvertedIndex(postings={tok: sorted(qids) for tok, qids in postings.items()})


def _single_source_match(mention_tokens: set[str], rec) -> bool:
    """True if one name or one alias contains all mention tokens."""
    if mention_tokens.issubset(tokenize(rec.name)):
        return True
    for alias in rec.aliases:
        if mention_tokens.issubset(tokenize(alias)):
            return True
    return False


def generate_candidates(
    index: InvertedIndex,
    catalog: EntityCatalog,
    mention: str,
    T: int = 20,
) -> CandidateList:
    """Intersect posting lists for the mention tokens, filter to
    single-source matches, sort by degree and truncate to T."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    tokens = tokenize(mention)
    if not tokens:
        return CandidateList(mention_surface=mention, candidates=[])

    # Intersect postings, rarest token first to keep the working set small.
    posting_sets = []
    for tok in set(tokens):
        qids = index.postings.get(tok)
        if qids is None:
            return CandidateList(mention_surface=mention, candidates=[])
        posting_sets.append(qids)
    posting_sets.sort(key=len)
    matched = set(posting_sets[0])
    for qids in posting_sets[1:]:
        matched.intersection_update(qids)
        if not matched:
            return CandidateList(mention_surface=mention, candidates=[])

    # A stale index may reference entities the catalog no longer has; those
    # can never be verified against a name, so they are dropped here.
    token_set = set(tokens)
    hits = []
    for qid in matched:
        rec = catalog.get(qid)
        if rec is not None and _single_source_match(token_set, rec):
            hits.append(qid)
    hits.sort(key=lambda q: (-catalog.records[q].degree, q))
    truncated = len(hits) > T
    return CandidateList(
        mention_surface=mention,
        candidates=hits[:T],
        truncated=truncated,
    )


def oracle_recall(
    tasks: list[tuple[str, str]],
    index: InvertedIndex,
    catalog: EntityCatalog,
    T: int = 20,
) -> float:
    """Fraction of (mention, gold_qid) tasks whose candidate list contains gold."""
    if not tasks:
        raise ValueError("oracle_recall requires a non-empty task list")
    hits = 0
    for mention, gold in tasks:
        if gold in generate_candidates(index, catalog, mention, T).candidates:
            hits += 1
    return hits / len(tasks)


def save_index(index: InvertedIndex, path: str) -> None:
    """Persist the index as JSONL with a format-version header line."""
    with open(path, "w", encoding="utf-8") as fh:
        header = {
            "format": INDEX_FORMAT,
            "version": INDEX_VERSION,
            "vocabulary_size": index.vocabulary_size,
        }
        fh.write(json.dumps(header) + "\n")
        for tok in sorted(index.postings):
            fh.write(json.dumps({"t": tok, "q": index.postings[tok]}, ensure_ascii=False) + "\n")


def load_index(path: str) -> InvertedIndex:
    with open(path, "r", encoding="utf-8") as fh:
        header_line = fh.readline()
        try:
            header = json.loads(header_line)
        except json.JSONDecodeError as exc:
            raise FormatError(f"index header is not valid JSON: {exc.msg}") from exc
        if header.get("format") != INDEX_FORMAT:
            raise FormatError(f"not an index file (format={header.get('format')!r})")
        if header.get("version") != INDEX_VERSION:
            raise FormatError(f"unsupported index version {header.get('version')!r}")
        postings: dict[str, list[str]] = {}
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                postings[obj["t"]] = list(obj["q"])
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FormatError(f"line {lineno}: bad posting entry") from exc
        declared = header.get("vocabulary_size")
        if declared is not None and declared != len(postings):
            raise FormatError(
                f"header declares {declared} tokens but file has {len(postings)}"
            )
    return InvertedIndex(postings=postings)
