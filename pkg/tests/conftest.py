"""Shared fixtures: small hand catalogs and session-scoped synthetic corpora."""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np
import pytest

from eigenlink.dataset import load_dataset
from eigenlink.embeddings import EmbeddingStore, load_embeddings
from eigenlink.evaluation import build_outcomes, metrics_report
from eigenlink.index import build_index
from eigenlink.kg import EntityCatalog, EntityRecord, load_catalog
from eigenlink.pipeline import LinkContext, RunConfig, run_documents
from eigenlink.synth import SynthConfig, generate


def make_catalog(rows) -> EntityCatalog:
    """rows: iterable of (qid, name, aliases, degree)."""
    records = {}
    for qid, name, aliases, degree in rows:
        records[qid] = EntityRecord(qid=qid, name=name, aliases=list(aliases), degree=degree)
    return EntityCatalog(records=records)


def make_store(dim: int, vectors: dict[str, list[float]]) -> EmbeddingStore:
    store = EmbeddingStore(dim)
    for key, vec in vectors.items():
        store.add(key, np.asarray(vec, dtype=float))
    return store


@dataclass
class Corpus:
    """A generated corpus with its stores loaded and ready to link."""

    dir: str
    manifest: dict
    catalog: EntityCatalog
    index: object
    store: EmbeddingStore
    docs: list

    def run(self, method: str, jobs: int = 1, **cfg_kwargs):
        cfg = RunConfig(method=method, **cfg_kwargs)
        ctx = LinkContext(
            catalog=self.catalog, index=self.index, config=cfg, store=self.store
        )
        results = run_documents(self.docs, ctx, jobs)
        outcomes = build_outcomes(results)
        return results, outcomes, metrics_report(outcomes)


def load_corpus(out_dir: str, manifest: dict) -> Corpus:
    catalog = load_catalog(f"{out_dir}/catalog.jsonl")
    return Corpus(
        dir=out_dir,
        manifest=manifest,
        catalog=catalog,
        index=build_index(catalog),
        store=load_embeddings(f"{out_dir}/embeddings.txt"),
        docs=load_dataset(f"{out_dir}/dataset.jsonl"),
    )


def build_corpus(tmp_factory, name: str, **cfg_kwargs) -> Corpus:
    out = str(tmp_factory.mktemp(name))
    manifest = generate(SynthConfig(**cfg_kwargs), out)
    return load_corpus(out, manifest)


@pytest.fixture(scope="session")
def default_corpus(tmp_path_factory) -> Corpus:
    """The stock planted corpus: d=64, rank 3, 50 docs x 8 x 10, seed 17."""
    return build_corpus(tmp_path_factory, "default_corpus")


@pytest.fixture(scope="session")
def default_eigen(default_corpus):
    """Unweighted subspace run on the stock corpus, shared across tests."""
    return default_corpus.run("eigen", weighting="none")


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory) -> Corpus:
    """A fast corpus for perturbation and CLI-level tests."""
    return build_corpus(
        tmp_path_factory,
        "small_corpus",
        docs=8,
        mentions_per_doc=5,
        candidates_per_mention=6,
        d=24,
        rank=2,
        noise_amplitude=0.2,
        seed=5,
    )


def pytest_terminal_summary(terminalreporter):
    """Re-print the acceptance PASS/FAIL lines after capture is torn down."""
    lines: list[str] = []
    # the module may be registered under either its plain or package name
    for name, module in list(sys.modules.items()):
        if name.rpartition(".")[2] == "test_acceptance":
            for line in getattr(module, "SUMMARY_LINES", []):
                if line not in lines:
                    lines.append(line)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
