"""Command-line pipeline: ingest, run, eval, dump-config.

Exit codes: 0 success, 1 usage or config problem, 2 data error (unreadable
or malformed inputs), 3 remote embedding backend failure. Log level comes
from the TRIALRANK_LOG_LEVEL environment variable (default INFO).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
from pathlib import Path
from typing import Any, Sequence

from .config import PRESETS, PipelineConfig, from_dict, load_config, preset, save_config, to_yaml
from .corpus import ClinicalTrialDoc, dump_jsonl, load_corpus
from .embedding import (
    EmbedderConfig,
    EmbeddingVector,
    build_vocab,
    document_text,
    embed_hashed_tfidf,
    embed_remote_many,
    infer_vector,
    train_paragraph_vectors,
)
from .embedding.config import BACKENDS, DOC_FIELDS
from .errors import ConfigError, EmptyCorpus, MalformedResponse, RemoteUnavailable, TrialRankError
from .metrics import DEFAULT_CUTOFFS, DEFAULT_REL_THRESHOLD, evaluate_run, parse_qrels
from .ranking import parse_run_file, rank_all, emit_run_file
from .report import emit_report, summary_table_text
from .topics import Topic, load_topics

logger = logging.getLogger("trialrank")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_REMOTE = 3

LOG_LEVEL_ENV = "TRIALRANK_LOG_LEVEL"

CORPUS_DUMP_NAME = "corpus.jsonl"


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage, but 2 means data error here; remap to 1."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _parse_cutoffs(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoffs must be comma-separated integers, got {text!r}")


def _add_config_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="YAML", help="config file; flags override its values")
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a bundled run preset")
    p.add_argument("--corpus-dir", help="directory of trial XML files")
    p.add_argument("--topics", help="topic XML file")
    p.add_argument("--qrels", help="relevance judgments file")
    p.add_argument("--output-dir", help="where artifacts are written")
    p.add_argument("--run-tag", help="tag written into every run line")
    p.add_argument("--k-cap", type=int, help="documents kept per topic")
    p.add_argument("--cutoffs", type=_parse_cutoffs, help="comma-separated, e.g. 5,10,15,20")
    p.add_argument("--rel-threshold", type=int, choices=(1, 2),
                   help="lowest grade counting as relevant")
    p.add_argument("--backend", choices=BACKENDS, help="embedding backend")
    p.add_argument("--dim", type=int, help="embedding dimension")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--doc-fields", choices=DOC_FIELDS, help="trial text fed to the embedder")
    p.add_argument("--remote-url", help="embedding service endpoint (remote backend)")
    p.add_argument("--epochs", type=int, help="paragraph-vector training epochs")
    p.add_argument("--workers", type=int, default=1, help="parallel workers for parse/train")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="trialrank", description="Batch clinical-trial retrieval and evaluation.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ingest = sub.add_parser("ingest", help="parse trial XML and dump normalized JSON lines")
    _add_config_flags(ingest)

    run = sub.add_parser("run", help="embed corpus and topics, rank, write a run file")
    _add_config_flags(run)

    ev = sub.add_parser("eval", help="score a run file against qrels")
    ev.add_argument("--run", required=True, help="run file to score")
    ev.add_argument("--qrels", required=True, help="relevance judgments file")
    ev.add_argument("--output-dir", help="report directory (default: run file's directory)")
    ev.add_argument("--cutoffs", type=_parse_cutoffs, default=list(DEFAULT_CUTOFFS))
    ev.add_argument("--rel-threshold", type=int, choices=(1, 2), default=DEFAULT_REL_THRESHOLD)
    ev.add_argument("--no-figures", action="store_true", help="skip chart rendering")

    dump = sub.add_parser("dump-config", help="print the effective config as YAML")
    _add_config_flags(dump)
    dump.add_argument("--out", help="also write the YAML to this path")
    return parser


_TOP_LEVEL_FLAGS = {
    "corpus_dir": "corpus_dir",
    "topics": "topics_path",
    "qrels": "qrels_path",
    "output_dir": "output_dir",
    "run_tag": "run_tag",
    "k_cap": "k_cap",
    "cutoffs": "cutoffs",
    "rel_threshold": "rel_threshold",
}
_EMBEDDER_FLAGS = ("backend", "dim", "seed", "doc_fields", "remote_url")


def assemble_config(args: argparse.Namespace) -> PipelineConfig:
    """Layer config sources: built-in defaults, then preset, file, flags."""
    cfg = preset(args.preset) if args.preset else PipelineConfig()
    if args.config:
        cfg = load_config(args.config, base=cfg)

    overrides: dict[str, Any] = {
        key: getattr(args, attr)
        for attr, key in _TOP_LEVEL_FLAGS.items()
        if getattr(args, attr) is not None
    }
    embedder: dict[str, Any] = {
        attr: getattr(args, attr) for attr in _EMBEDDER_FLAGS if getattr(args, attr) is not None
    }
    if args.epochs is not None:
        embedder["pv"] = {"epochs": args.epochs}
    if embedder:
        overrides["embedder"] = embedder
    return from_dict(overrides, base=cfg)


def _load_docs(cfg: PipelineConfig, workers: int):
    t0 = time.perf_counter()
    docs, stats = load_corpus(cfg.corpus_dir, workers=workers)
    if not docs:
        raise EmptyCorpus(f"no parseable trial XML under {cfg.corpus_dir}")
    logger.info("ingest: %d docs in %.2fs", len(docs), time.perf_counter() - t0)
    return docs, stats


def _embed_all(
    docs: Sequence[ClinicalTrialDoc],
    topics: Sequence[Topic],
    emb: EmbedderConfig,
    workers: int,
) -> tuple[list[EmbeddingVector], list[EmbeddingVector]]:
    doc_ids = [d.nct_id for d in docs]
    doc_texts = [document_text(d, emb.doc_fields) for d in docs]
    topic_ids = [t.topic_id for t in topics]
    query_texts = [t.query_text for t in topics]

    if emb.backend == "hashed_tfidf":
        vocab = build_vocab(doc_texts, emb)
        doc_vecs = [embed_hashed_tfidf(text, vocab, emb, source_id=sid)
                    for text, sid in zip(doc_texts, doc_ids)]
        topic_vecs = [embed_hashed_tfidf(text, vocab, emb, source_id=sid)
                      for text, sid in zip(query_texts, topic_ids)]
    elif emb.backend in ("pv_dbow", "pv_dm"):
        model = train_paragraph_vectors(list(zip(doc_ids, doc_texts)), emb, workers=workers)
        doc_vecs = [model.vector_for(sid) for sid in doc_ids]
        topic_vecs = [infer_vector(text, model, source_id=sid)
                      for text, sid in zip(query_texts, topic_ids)]
    else:
        doc_vecs = embed_remote_many(doc_texts, emb, source_ids=doc_ids)
        topic_vecs = embed_remote_many(query_texts, emb, source_ids=topic_ids)
    return doc_vecs, topic_vecs


def cmd_ingest(cfg: PipelineConfig, workers: int = 1) -> int:
    docs, stats = _load_docs(cfg, workers)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    dump_path = out_dir / CORPUS_DUMP_NAME
    dump_jsonl(docs, dump_path)
    print(f"{stats.summary_line()} dump={dump_path}")
    return EXIT_OK


def cmd_run(cfg: PipelineConfig, workers: int = 1) -> int:
    docs, _ = _load_docs(cfg, workers)

    t0 = time.perf_counter()
    topics = load_topics(cfg.topics_path)
    logger.info("topics: %d in %.2fs", len(topics), time.perf_counter() - t0)

    t0 = time.perf_counter()
    doc_vecs, topic_vecs = _embed_all(docs, topics, cfg.embedder, workers)
    logger.info("embed[%s]: %d doc + %d topic vectors in %.2fs", cfg.embedder.backend,
                len(doc_vecs), len(topic_vecs), time.perf_counter() - t0)

    t0 = time.perf_counter()
    run = rank_all(topic_vecs, doc_vecs, k_cap=cfg.k_cap, run_tag=cfg.run_tag)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run_path = out_dir / f"{cfg.run_tag}.run"
    emit_run_file(run, run_path)
    logger.info("rank+emit: %d lines in %.2fs", len(run.entries), time.perf_counter() - t0)
    print(run_path)
    return EXIT_OK


def cmd_eval(
    run_path: str | Path,
    qrels_path: str | Path,
    output_dir: str | Path | None = None,
    cutoffs: Sequence[int] = DEFAULT_CUTOFFS,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
    figures: bool = True,
) -> int:
    run = parse_run_file(run_path)
    qrels = parse_qrels(qrels_path)
    report = evaluate_run(run, qrels, cutoffs=cutoffs, rel_threshold=rel_threshold)
    out_dir = Path(output_dir) if output_dir is not None else Path(run_path).parent
    written = emit_report(report, out_dir, figures=figures)
    logger.info("report: %d files under %s", len(written), out_dir)
    print(summary_table_text(report), end="")
    return EXIT_OK


def cmd_dump_config(cfg: PipelineConfig, out: str | None = None) -> int:
    text = to_yaml(cfg)
    if out:
        save_config(cfg, out)
    print(text, end="")
    return EXIT_OK


def _setup_logging() -> None:
    name = os.environ.get(LOG_LEVEL_ENV, "INFO").upper()
    level = getattr(logging, name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    logging.getLogger().setLevel(level)


def main(argv: Sequence[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    try:
        if args.command == "ingest":
            return cmd_ingest(assemble_config(args), workers=args.workers)
        if args.command == "run":
            return cmd_run(assemble_config(args), workers=args.workers)
        if args.command == "eval":
            return cmd_eval(args.run, args.qrels, args.output_dir,
                            cutoffs=args.cutoffs, rel_threshold=args.rel_threshold,
                            figures=not args.no_figures)
        return cmd_dump_config(assemble_config(args), out=args.out)
    except ConfigError as exc:
        logger.error("config: %s", exc)
        return EXIT_USAGE
    except (RemoteUnavailable, MalformedResponse) as exc:
        logger.error("remote backend: %s", exc)
        return EXIT_REMOTE
    except (TrialRankError, OSError, ValueError) as exc:
        logger.error("%s: %s", args.command, exc)
        return EXIT_DATA


def entrypoint() -> None:
    raise SystemExit(main())
