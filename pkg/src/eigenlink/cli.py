"""Command-line entry points: synth, build-index, link, eval, mutilate.

Every output artifact embeds the full run configuration, the seed and a
format version. Exit codes: 0 success, 2 I/O failure, 3 file format
failure, 4 configuration contradiction, 1 anything else.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .dataset import attach_candidates, load_dataset
from .embeddings import load_embeddings
from .errors import (
    ConfigError,
    DataError,
    EigenlinkError,
    FormatError,
    IntegrityError,
)
from .evaluation import (
    build_outcomes,
    metrics_report,
    mutilation,
    read_predictions,
    score_gap,
    write_predictions,
)
from .index import build_index, load_index, save_index
from .kg import load_catalog
from .pipeline import METHODS, LinkContext, RunConfig, run_documents
from .synth import SynthConfig, generate
from .weighting import WEIGHT_KINDS, build_description_store, load_descriptions

log = logging.getLogger("eigenlink")

METRICS_FORMAT = "eigenlink-metrics"
MUTILATION_FORMAT = "eigenlink-mutilation"
FORMAT_VERSION = 1

RUN_DEFAULTS = {
    "method": "eigen",
    "T": 20,
    "k": 10,
    "delta": 1.0,
    "weighting": "degree_rr",
    "window": 5,
    "seed": 0,
    "jobs": os.cpu_count() or 1,
}

_SYNTH_FIELD_PARSERS = {
    "seed": int,
    "d": int,
    "rank": int,
    "subclusters": int,
    "docs": int,
    "mentions_per_doc": int,
    "candidates_per_mention": int,
    "noise_amplitude": float,
    "easy_fraction": float,
    "miss_fraction": float,
    "distractors_per_doc": int,
    "vocab_size": int,
    "doc_length": int,
    "word_dim": int,
    "adversarial": lambda s: s.lower() in ("1", "true", "yes"),
}


def _add_run_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--dataset", required=True, help="dataset JSONL file")
    parser.add_argument("--catalog", required=True, help="entity catalog JSONL file")
    parser.add_argument("--embeddings", help="entity embedding file")
    parser.add_argument("--words", help="word embedding file (context methods)")
    parser.add_argument("--descriptions", help="entity descriptions JSONL (context methods)")
    parser.add_argument("--index", help="prebuilt index file; built in-memory when absent")
    parser.add_argument("--edges", help="edge list TSV to fill in missing degrees")
    parser.add_argument("--T", type=int, default=None, help="max candidates per mention")
    parser.add_argument("--k", type=int, default=None, help="subspace components")
    parser.add_argument("--delta", type=float, default=None, help="rank weight decay")
    parser.add_argument("--weighting", choices=WEIGHT_KINDS, default=None)
    parser.add_argument("--window", type=int, default=None, help="local context window")
    parser.add_argument("--seed", type=int, default=None, help="root random seed")
    parser.add_argument("--jobs", type=int, default=None, help="parallel documents")
    parser.add_argument(
        "--unscaled",
        action="store_const",
        const=True,
        default=None,
        help="score by plain projection norm, without strength rescaling",
    )
    parser.add_argument("--config-file", help="JSON file with defaults for the flags above")
    parser.add_argument("--out", required=True, help="output directory")


def _resolve_run_config(args, method: str) -> RunConfig:
    file_cfg: dict = {}
    if args.config_file:
        with open(args.config_file, "r", encoding="utf-8") as fh:
            try:
                file_cfg = json.load(fh)
            except json.JSONDecodeError as exc:
                raise FormatError(f"config file is not valid JSON: {exc.msg}") from exc
        if not isinstance(file_cfg, dict):
            raise FormatError("config file must hold a JSON object")
        unknown = set(file_cfg) - set(RUN_DEFAULTS) - {"rescale"}
        if unknown:
            raise ConfigError(f"unknown config-file keys: {sorted(unknown)}")

    def pick(name: str):
        value = getattr(args, name, None)
        if value is not None:
            return value
        if name in file_cfg:
            return file_cfg[name]
        return RUN_DEFAULTS[name]

    if args.unscaled is not None:
        rescale = False
    else:
        rescale = bool(file_cfg.get("rescale", True))

    cfg = RunConfig(
        method=method,
        T=pick("T"),
        k=pick("k"),
        delta=pick("delta"),
        weighting=pick("weighting"),
        window=pick("window"),
        seed=pick("seed"),
        jobs=pick("jobs"),
        rescale=rescale,
    )
    cfg.validate()
    return cfg


def _load_context(args, cfg: RunConfig) -> LinkContext:
    catalog = load_catalog(args.catalog, edges_path=args.edges)
    index = load_index(args.index) if args.index else build_index(catalog)
    store = load_embeddings(args.embeddings) if args.embeddings else None
    word_store = load_embeddings(args.words) if args.words else None
    desc_store = None
    if args.descriptions:
        if word_store is None:
            raise ConfigError("--descriptions requires --words")
        desc_store = build_description_store(load_descriptions(args.descriptions), word_store)
    ctx = LinkContext(
        catalog=catalog,
        index=index,
        config=cfg,
        store=store,
        word_store=word_store,
        desc_store=desc_store,
    )
    ctx.validate()
    return ctx


def _echo_config(cfg: RunConfig, args, extra: dict | None = None) -> dict:
    echo = cfg.to_dict()
    # jobs only controls scheduling, never results; leaving it out keeps
    # artifacts byte-identical across parallelism settings.
    echo.pop("jobs", None)
    for key in ("dataset", "catalog", "embeddings", "words", "descriptions", "index", "edges"):
        value = getattr(args, key, None)
        if value:
            echo[key] = value
    if extra:
        echo.update(extra)
    return echo


def _write_json(obj: dict, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_synth(args) -> int:
    cfg_values: dict = {}
    for item in args.config or []:
        for pair in item.split(","):
            pair = pair.strip()
            if not pair:
                continue
            if "=" not in pair:
                raise ConfigError(f"--config entries must be key=value, got {pair!r}")
            key, _, raw = pair.partition("=")
            key = key.strip()
            parser_fn = _SYNTH_FIELD_PARSERS.get(key)
            if parser_fn is None:
                raise ConfigError(f"unknown synth config key {key!r}")
            try:
                cfg_values[key] = parser_fn(raw.strip())
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    cfg = SynthConfig(**cfg_values)
    manifest = generate(cfg, args.out)
    n_mentions = sum(len(d["mentions"]) for d in manifest["documents"])
    print(f"generated {len(manifest['documents'])} documents, {n_mentions} mentions -> {args.out}")
    return 0


def cmd_build_index(args) -> int:
    catalog = load_catalog(args.catalog, edges_path=args.edges)
    index = build_index(catalog)
    save_index(index, args.out)
    print(f"indexed {catalog.count} entities, {index.vocabulary_size} tokens -> {args.out}")
    return 0


def cmd_link(args) -> int:
    cfg = _resolve_run_config(args, args.method)
    ctx = _load_context(args, cfg)
    docs = load_dataset(args.dataset)
    results = run_documents(docs, ctx, cfg.jobs)
    outcomes = build_outcomes(results)

    unlabeled = sum(1 for o in outcomes if o.bucket is None)
    if unlabeled:
        log.info("excluded %d mentions without gold annotation", unlabeled)

    report = metrics_report(outcomes)
    gap = score_gap(outcomes, seed=cfg.seed)
    effective = [r.effective_k for r in results if r.effective_k is not None]

    os.makedirs(args.out, exist_ok=True)
    write_predictions(outcomes, os.path.join(args.out, "predictions.csv"))
    metrics = {
        "format": METRICS_FORMAT,
        "version": FORMAT_VERSION,
        "config": _echo_config(cfg, args),
        "seed": cfg.seed,
        **report.to_dict(),
        "score_gap": gap.to_dict() if gap else None,
        "effective_k": {"min": min(effective), "max": max(effective)} if effective else None,
        "documents": len(results),
    }
    _write_json(metrics, os.path.join(args.out, "metrics.json"))
    p1 = report.precision_at_1
    print(
        f"{cfg.method}: P@1 overall={p1['overall']:.3f} easy={p1['easy']:.3f} "
        f"hard={p1['hard']:.3f} mrr={report.mrr['overall']:.3f} "
        f"({report.counts['total']} mentions)"
    )
    return 0


def cmd_eval(args) -> int:
    outcomes = read_predictions(args.predictions)
    report = metrics_report(outcomes)
    os.makedirs(args.out, exist_ok=True)
    metrics = {
        "format": METRICS_FORMAT,
        "version": FORMAT_VERSION,
        "config": {"predictions": args.predictions},
        "seed": None,
        **report.to_dict(),
    }
    _write_json(metrics, os.path.join(args.out, "metrics.json"))
    print(
        f"recomputed: P@1 overall={report.precision_at_1['overall']:.3f} "
        f"mrr={report.mrr['overall']:.3f} ({report.counts['total']} mentions)"
    )
    return 0


def cmd_mutilate(args) -> int:
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for method in methods:
        if method not in METHODS:
            raise ConfigError(f"unknown method {method!r}")
    try:
        fractions = [float(f) for f in args.fractions.split(",") if f.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad fractions list: {args.fractions!r}") from exc
    if not fractions:
        raise ConfigError("need at least one fraction")
    if args.repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {args.repeats}")

    base_cfg = _resolve_run_config(args, methods[0])
    ctx = _load_context(args, base_cfg)
    docs = [
        attach_candidates(doc, ctx.index, ctx.catalog, base_cfg.T)
        for doc in load_dataset(args.dataset)
    ]

    curves: dict[str, list[float]] = {}
    for method in methods:
        cfg = _resolve_run_config(args, method)
        mctx = LinkContext(
            catalog=ctx.catalog,
            index=ctx.index,
            config=cfg,
            store=ctx.store,
            word_store=ctx.word_store,
            desc_store=ctx.desc_store,
        )
        mctx.validate()

        def runner(subset, _ctx=mctx, _jobs=cfg.jobs):
            return run_documents(subset, _ctx, _jobs)

        by_fraction = mutilation(docs, runner, fractions, seed=cfg.seed, repeats=args.repeats)
        curves[method] = [by_fraction[f] for f in fractions]

    os.makedirs(args.out, exist_ok=True)
    payload = {
        "format": MUTILATION_FORMAT,
        "version": FORMAT_VERSION,
        "config": _echo_config(base_cfg, args, {"methods": methods, "repeats": args.repeats}),
        "seed": base_cfg.seed,
        "fractions": fractions,
        "p1_overall": curves,
    }
    _write_json(payload, os.path.join(args.out, "mutilation.json"))
    for method in methods:
        rendered = ", ".join(f"{f:g}:{v:.3f}" for f, v in zip(fractions, curves[method]))
        print(f"{method}: {rendered}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigenlink",
        description="Unsupervised entity linking over per-document low-rank subspaces",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    p_synth.add_argument(
        "--config",
        action="append",
        metavar="KEY=VALUE",
        help="synthesis parameter, repeatable or comma-separated",
    )
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.set_defaults(func=cmd_synth)

    p_index = sub.add_parser("build-index", help="build and persist the inverted index")
    p_index.add_argument("--catalog", required=True)
    p_index.add_argument("--edges", help="edge list TSV to fill in missing degrees")
    p_index.add_argument("--out", required=True, help="index file to write")
    p_index.set_defaults(func=cmd_build_index)

    p_link = sub.add_parser("link", help="link a dataset and write predictions + metrics")
    p_link.add_argument("--method", choices=METHODS, default="eigen")
    _add_run_flags(p_link)
    p_link.set_defaults(func=cmd_link)

    p_eval = sub.add_parser("eval", help="recompute metrics from a predictions CSV")
    p_eval.add_argument("--predictions", required=True)
    p_eval.add_argument("--out", required=True)
    p_eval.set_defaults(func=cmd_eval)

    p_mut = sub.add_parser("mutilate", help="easy-mention subsampling analysis")
    p_mut.add_argument("--methods", default="eigen,avg,degree", help="comma-separated methods")
    p_mut.add_argument(
        "--fractions",
        default="1.0,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1,0.0",
        help="comma-separated easy fractions to keep",
    )
    p_mut.add_argument("--repeats", type=int, default=10)
    _add_run_flags(p_mut)
    p_mut.set_defaults(func=cmd_mutilate)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except (FormatError, IntegrityError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EigenlinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
