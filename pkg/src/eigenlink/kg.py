"""Entity catalog ingestion.

The catalog is a pre-extracted JSONL artifact: one record per line with
the entity identifier, canonical name, aliases and knowledge-graph
degree. Identifiers are opaque strings; nothing Wikidata-specific is
assumed. Degrees may be stored in the catalog or recomputed from an
edge list, with stored values taking precedence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import FormatError, IntegrityError


@dataclass
class EntityRecord:
    """One knowledge-graph entity: identifier, names and degree."""

    qid: str
    name: str
    aliases: list[str] = field(default_factory=list)
    degree: int = 0


@dataclass
class EntityCatalog:
    """Immutable-after-build store of entity records keyed by qid."""

    records: dict[str, EntityRecord]

    @property
    def count(self) -> int:
        return len(self.records)

    def get(self, qid: str) -> EntityRecord | None:
        return self.records.get(qid)

    def degree(self, qid: str) -> int:
        rec = self.records.get(qid)
        return rec.degree if rec is not None else 0

    def __iter__(self) -> Iterator[EntityRecord]:
        return iter(self.records.values())

    def __len__(self) -> int:
        return len(self.records)


def _parse_record(obj: dict, lineno: int) -> tuple[EntityRecord, bool]:
    """Validate one raw JSON object. Returns (record, degree_was_explicit)."""
    if not isinstance(obj, dict):
        raise FormatError(f"line {lineno}: catalog record must be a JSON object")
    qid = obj.get("qid")
    name = obj.get("name")
    if not isinstance(qid, str) or not qid:
        raise FormatError(f"line {lineno}: missing or empty 'qid'")
    if not isinstance(name, str) or not name:
        raise FormatError(f"line {lineno}: missing or empty 'name'")
    aliases = obj.get("aliases", [])
    if not isinstance(aliases, list) or any(not isinstance(a, str) for a in aliases):
        raise FormatError(f"line {lineno}: 'aliases' must be a list of strings")
    has_degree = "degree" in obj
    degree = obj.get("degree", 0)
    if not isinstance(degree, int) or isinstance(degree, bool) or degree < 0:
        raise FormatError(f"line {lineno}: 'degree' must be a non-negative integer")
    return EntityRecord(qid=qid, name=name, aliases=list(aliases), degree=degree), has_degree


def load_catalog(path: str, edges_path: str | None = None) -> EntityCatalog:
    """Load a JSONL entity catalog.

    When ``edges_path`` is given, degrees are computed from the edge list
    and fill in records that do not carry an explicit ``degree`` field;
    explicit values always win.
    """
    records: dict[str, EntityRecord] = {}
    implicit_degree: list[str] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"line {lineno}: invalid JSON ({exc.msg})") from exc
            rec, explicit = _parse_record(obj, lineno)
            if rec.qid in records:
                raise IntegrityError(f"line {lineno}: duplicate qid {rec.qid!r}")
            records[rec.qid] = rec
            if not explicit:
                implicit_degree.append(rec.qid)
    if edges_path is not None:
        degrees = compute_degrees(load_edges(edges_path))
        for qid in implicit_degree:
            records[qid].degree = degrees.get(qid, 0)
    return EntityCatalog(records=records)


def write_catalog(catalog: EntityCatalog, path: str) -> None:
    """Write a catalog back out as JSONL, one record per line."""
    with open(path, "w", encoding="utf-8") as fh:
        for rec in catalog:
            obj = {
                "qid": rec.qid,
                "name": rec.name,
                "aliases": rec.aliases,
                "degree": rec.degree,
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_edges(path: str) -> list[tuple[str, str]]:
    """Read an edge list: one tab-separated qid pair per line."""
    edges: list[tuple[str, str]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise FormatError(f"line {lineno}: expected two tab-separated qids")
            edges.append((parts[0], parts[1]))
    return edges


def compute_degrees(edge_list: Iterable[tuple[str, str]]) -> dict[str, int]:
    """Vertex degrees of the undirected, deduplicated graph.

    (a, b) and (b, a) are the same edge; self-loops add one to the
    endpoint's degree.
    """
    seen: set[tuple[str, str]] = set()
    degrees: dict[str, int] = {}
    for a, b in edge_list:
        if not a or not b:
            raise IntegrityError("edge endpoints must be non-empty identifiers")
        key = (a, b) if a <= b else (b, a)
        if key in seen:
            continue
        seen.add(key)
        degrees[a] = degrees.get(a, 0) + 1
        if b != a:
            degrees[b] = degrees.get(b, 0) + 1
    return degrees
