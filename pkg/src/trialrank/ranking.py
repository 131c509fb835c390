"""Cosine-similarity ranking and TREC run file I/O.

Scoring is exact and exhaustive: every document is scored against every
topic, sorted by (score desc, nct_id asc), and truncated to the per-topic
cap. The nct_id tie-break makes run files a pure function of their inputs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .embedding import EmbeddingVector
from .errors import DimMismatch, DuplicateDoc, MalformedRunLine

logger = logging.getLogger(__name__)

DEFAULT_K_CAP = 1000


@dataclass(frozen=True)
class RunEntry:
    topic_id: str
    nct_id: str
    rank: int
    score: float
    run_tag: str

    def format_line(self) -> str:
        return f"{self.topic_id} Q0 {self.nct_id} {self.rank} {self.score:.6f} {self.run_tag}"


@dataclass
class RankedRun:
    """Run entries grouped by topic, topics in first-appearance order."""

    entries: list[RunEntry] = field(default_factory=list)
    k_cap: int = DEFAULT_K_CAP

    def topic_ids(self) -> list[str]:
        seen: dict[str, None] = {}
        for entry in self.entries:
            seen.setdefault(entry.topic_id, None)
        return list(seen)

    def by_topic(self) -> dict[str, list[RunEntry]]:
        grouped: dict[str, list[RunEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.topic_id, []).append(entry)
        return grouped

    def validate(self) -> None:
        for topic_id, entries in self.by_topic().items():
            if len(entries) > self.k_cap:
                raise ValueError(f"topic {topic_id}: {len(entries)} entries exceed k_cap={self.k_cap}")
            seen_docs: set[str] = set()
            prev_score = None
            for i, entry in enumerate(entries, start=1):
                if entry.rank != i:
                    raise ValueError(f"topic {topic_id}: rank {entry.rank} at position {i}")
                if entry.nct_id in seen_docs:
                    raise DuplicateDoc(f"topic {topic_id}: document {entry.nct_id} listed twice")
                seen_docs.add(entry.nct_id)
                if prev_score is not None and entry.score > prev_score:
                    raise ValueError(
                        f"topic {topic_id}: score increases at rank {entry.rank}"
                    )
                prev_score = entry.score


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """(a.b) / (|a| |b|), clamped to [-1, 1]; zero-norm vectors score 0."""
    if a.dim != b.dim:
        raise DimMismatch(f"cosine between dims {a.dim} and {b.dim}")
    denom = float(np.linalg.norm(a.values)) * float(np.linalg.norm(b.values))
    if denom == 0.0:
        return 0.0
    return float(np.clip(float(a.values @ b.values) / denom, -1.0, 1.0))


class VectorIndex:
    """Document vectors stacked once for repeated topic scoring."""

    def __init__(self, docs: Sequence[EmbeddingVector]):
        if not docs:
            raise ValueError("cannot index zero documents")
        dims = {d.dim for d in docs}
        if len(dims) != 1:
            raise DimMismatch(f"documents disagree on dim: {sorted(dims)}")
        self.dim = dims.pop()
        self.doc_ids = [d.source_id for d in docs]
        self._id_array = np.array(self.doc_ids)
        self.matrix = np.stack([d.values for d in docs])
        self.norms = np.linalg.norm(self.matrix, axis=1)

    def score(self, topic_vec: EmbeddingVector) -> np.ndarray:
        """Cosine of the topic against every document (zero-norm pairs -> 0)."""
        if topic_vec.dim != self.dim:
            raise DimMismatch(f"topic dim {topic_vec.dim} != index dim {self.dim}")
        t_norm = float(np.linalg.norm(topic_vec.values))
        if t_norm == 0.0:
            return np.zeros(len(self.doc_ids))
        dots = self.matrix @ topic_vec.values
        with np.errstate(divide="ignore", invalid="ignore"):
            scores = dots / (self.norms * t_norm)
        scores[self.norms == 0.0] = 0.0
        return np.clip(scores, -1.0, 1.0)

    def top_k(self, topic_vec: EmbeddingVector, k_cap: int) -> list[tuple[str, float]]:
        scores = self.score(topic_vec)
        # lexsort's last key is primary: score descending, then nct_id ascending
        order = np.lexsort((self._id_array, -scores))[:k_cap]
        return [(self.doc_ids[i], float(scores[i])) for i in order]


def rank_topic(
    topic_vec: EmbeddingVector,
    docs: Sequence[EmbeddingVector],
    k_cap: int = DEFAULT_K_CAP,
    run_tag: str = "trialrank",
) -> list[RunEntry]:
    """Score and rank all documents for one topic, truncated to ``k_cap``."""
    return _entries_for_topic(topic_vec, VectorIndex(docs), k_cap, run_tag)


def rank_all(
    topic_vecs: Sequence[EmbeddingVector],
    docs: Sequence[EmbeddingVector],
    k_cap: int = DEFAULT_K_CAP,
    run_tag: str = "trialrank",
) -> RankedRun:
    """Rank every topic against the same document collection."""
    index = VectorIndex(docs)
    entries: list[RunEntry] = []
    for topic_vec in topic_vecs:
        entries.extend(_entries_for_topic(topic_vec, index, k_cap, run_tag))
    return RankedRun(entries=entries, k_cap=k_cap)


def _entries_for_topic(
    topic_vec: EmbeddingVector, index: VectorIndex, k_cap: int, run_tag: str
) -> list[RunEntry]:
    return [
        RunEntry(topic_id=topic_vec.source_id, nct_id=doc_id, rank=i, score=score, run_tag=run_tag)
        for i, (doc_id, score) in enumerate(index.top_k(topic_vec, k_cap), start=1)
    ]


def format_run(run: RankedRun) -> str:
    return "".join(entry.format_line() + "\n" for entry in run.entries)


def emit_run_file(run: RankedRun, path: str | Path) -> None:
    """Write the standard 6-column TREC run format; byte-stable."""
    run.validate()
    Path(path).write_text(format_run(run), encoding="utf-8", newline="\n")


def parse_run_file(path: str | Path, k_cap: int = DEFAULT_K_CAP) -> RankedRun:
    """Parse a 6-column run file, re-sorting out-of-order ranks per topic.

    Raises :class:`MalformedRunLine` (with the offending line number) for
    format or invariant violations and :class:`DuplicateDoc` for repeated
    documents within a topic.
    """
    return parse_run_lines(Path(path).read_text(encoding="utf-8").splitlines(), k_cap)


def parse_run_lines(lines: Iterable[str], k_cap: int = DEFAULT_K_CAP) -> RankedRun:
    parsed: list[tuple[int, RunEntry]] = []
    topic_order: dict[str, int] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cols = line.split()
        if len(cols) != 6:
            raise MalformedRunLine(line_no, f"expected 6 columns, got {len(cols)}")
        topic_id, _q0, nct_id, rank_s, score_s, run_tag = cols
        try:
            rank = int(rank_s)
            score = float(score_s)
        except ValueError:
            raise MalformedRunLine(line_no, f"bad rank/score in {line.strip()!r}") from None
        if rank < 1:
            raise MalformedRunLine(line_no, f"rank must be >= 1, got {rank}")
        topic_order.setdefault(topic_id, len(topic_order))
        parsed.append((line_no, RunEntry(topic_id, nct_id, rank, score, run_tag)))

    parsed.sort(key=lambda item: (topic_order[item[1].topic_id], item[1].rank))

    entries: list[RunEntry] = []
    seen: dict[str, set[str]] = {}
    expected_rank: dict[str, int] = {}
    prev_score: dict[str, float] = {}
    for line_no, entry in parsed:
        docs = seen.setdefault(entry.topic_id, set())
        if entry.nct_id in docs:
            raise DuplicateDoc(
                f"line {line_no}: document {entry.nct_id} repeated in topic {entry.topic_id}"
            )
        docs.add(entry.nct_id)
        want = expected_rank.get(entry.topic_id, 1)
        if entry.rank != want:
            raise MalformedRunLine(
                line_no, f"topic {entry.topic_id}: rank {entry.rank} where {want} expected"
            )
        expected_rank[entry.topic_id] = want + 1
        if entry.topic_id in prev_score and entry.score > prev_score[entry.topic_id]:
            raise MalformedRunLine(
                line_no, f"topic {entry.topic_id}: score increases at rank {entry.rank}"
            )
        prev_score[entry.topic_id] = entry.score
        entries.append(entry)
    deepest = max((rank - 1 for rank in expected_rank.values()), default=0)
    return RankedRun(entries=entries, k_cap=max(k_cap, deepest))
