"""Document/mention dataset I/O.

JSONL, one document per line:

    {"doc_id": str,
     "mentions": [{"surface": str, "gold_qid": str|null, "position": int}],
     "tokens": [str],          # optional, needed by context methods
     "nouns": [str]}           # optional, overrides the stopword heuristic

``position`` is the token index the mention occupies in ``tokens``.
Candidate lists are not stored; they are attached by running the
candidate generator over the loaded documents.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import FormatError
from .index import CandidateList, InvertedIndex, generate_candidates
from .kg import EntityCatalog


@dataclass
class Mention:
    surface: str
    gold_qid: str | None = None
    position: int = 0
    candidates: CandidateList | None = None


@dataclass
class DocumentTask:
    doc_id: str
    mentions: list[Mention]
    tokens: list[str] | None = None
    nouns: list[str] | None = None


def load_dataset(path: str) -> list[DocumentTask]:
    docs: list[DocumentTask] = []
    seen_ids: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            doc_id = obj.get("doc_id")
            if not isinstance(doc_id, str) or not doc_id:
                raise FormatError(f"line {lineno}: missing or empty 'doc_id'")
            if doc_id in seen_ids:
                raise FormatError(f"line {lineno}: duplicate doc_id {doc_id!r}")
            seen_ids.add(doc_id)
            raw_mentions = obj.get("mentions")
            if not isinstance(raw_mentions, list):
                raise FormatError(f"line {lineno}: 'mentions' must be a list")
            mentions = []
            for m in raw_mentions:
                surface = m.get("surface")
                if not isinstance(surface, str) or not surface:
                    raise FormatError(f"line {lineno}: mention without a surface")
                gold = m.get("gold_qid")
                if gold is not None and not isinstance(gold, str):
                    raise FormatError(f"line {lineno}: 'gold_qid' must be a string or null")
                mentions.append(
                    Mention(surface=surface, gold_qid=gold, position=int(m.get("position", 0)))
                )
            docs.append(
                DocumentTask(
                    doc_id=doc_id,
                    mentions=mentions,
                    tokens=obj.get("tokens"),
                    nouns=obj.get("nouns"),
                )
            )
    return docs


def write_dataset(docs: list[DocumentTask], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            obj: dict = {
                "doc_id": doc.doc_id,
                "mentions": [
                    {"surface": m.surface, "gold_qid": m.gold_qid, "position": m.position}
                    for m in doc.mentions
                ],
            }
            if doc.tokens is not None:
                obj["tokens"] = doc.tokens
            if doc.nouns is not None:
                obj["nouns"] = doc.nouns
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def attach_candidates(
    doc: DocumentTask,
    idx: InvertedIndex,
    catalog: EntityCatalog,
    T: int = 20,
) -> DocumentTask:
    """Return a copy of the document with candidate lists generated."""
    mentions = [
        replace(m, candidates=generate_candidates(idx, catalog, m.surface, T))
        for m in doc.mentions
    ]
    return replace(doc, mentions=mentions)
