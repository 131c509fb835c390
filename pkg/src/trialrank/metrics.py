"""Graded-relevance evaluation of ranked runs against qrels.

Conventions (trec_eval compatible): NDCG uses linear gain ``grade`` with a
``log2(rank+1)`` discount and normalizes by the ideal ordering of ALL judged
documents for the topic; average precision divides by the total number of
relevant judged documents, not ``min(R, k)``; unjudged retrieved documents
count as grade 0. Binary metrics treat ``grade >= rel_threshold`` as
relevant; the track's grades are 0 = non-relevant, 1 = excluded,
2 = eligible, so the default threshold 2 counts only eligible trials.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateJudgment, GradeOutOfRange, MalformedQrelLine, NoOverlap
from .ranking import RankedRun

logger = logging.getLogger(__name__)

METRICS = ("ndcg", "p", "map", "recall")
DEFAULT_CUTOFFS = (5, 10, 15, 20)
GRADES = (0, 1, 2)
DEFAULT_REL_THRESHOLD = 2


@dataclass(frozen=True)
class QrelSet:
    """Graded judgments keyed by (topic_id, nct_id)."""

    grades: dict[tuple[str, str], int]

    def topics(self) -> list[str]:
        return sorted({topic for topic, _ in self.grades})

    def judged_for(self, topic_id: str) -> dict[str, int]:
        return {doc: g for (topic, doc), g in self.grades.items() if topic == topic_id}

    def grade(self, topic_id: str, nct_id: str) -> int:
        return self.grades.get((topic_id, nct_id), 0)


def parse_qrels(path: str | Path) -> QrelSet:
    """Read standard 4-column qrels: ``topic iteration doc grade``."""
    return parse_qrel_lines(Path(path).read_text(encoding="utf-8").splitlines())


def parse_qrel_lines(lines: Iterable[str]) -> QrelSet:
    grades: dict[tuple[str, str], int] = {}
    for line_no, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        cols = line.split()
        if len(cols) != 4:
            raise MalformedQrelLine(line_no, f"expected 4 columns, got {len(cols)}")
        topic_id, _iteration, nct_id, grade_s = cols
        try:
            grade = int(grade_s)
        except ValueError:
            raise MalformedQrelLine(line_no, f"grade {grade_s!r} is not an integer") from None
        if grade not in GRADES:
            raise GradeOutOfRange(f"line {line_no}: grade {grade} outside {GRADES}")
        key = (topic_id, nct_id)
        if key in grades:
            raise DuplicateJudgment(f"line {line_no}: ({topic_id}, {nct_id}) judged twice")
        grades[key] = grade
    return QrelSet(grades=grades)


def ndcg_at_k(ranked: Sequence[str], judged: Mapping[str, int], k: int) -> float:
    """DCG over the top k divided by the DCG of the ideal ordering of every
    judged document; 0 when the topic has no positive grades."""
    dcg = 0.0
    for i, doc in enumerate(ranked[:k], start=1):
        dcg += judged.get(doc, 0) / math.log2(i + 1)
    ideal = sorted(judged.values(), reverse=True)
    idcg = 0.0
    for i, grade in enumerate(ideal[:k], start=1):
        idcg += grade / math.log2(i + 1)
    return dcg / idcg if idcg > 0.0 else 0.0


def precision_at_k(
    ranked: Sequence[str], judged: Mapping[str, int], k: int,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
) -> float:
    """Fraction of the top k that is relevant; the denominator stays k even
    when fewer documents were retrieved."""
    hits = sum(1 for doc in ranked[:k] if judged.get(doc, 0) >= rel_threshold)
    return hits / k


def average_precision_at_k(
    ranked: Sequence[str], judged: Mapping[str, int], k: int,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
) -> float:
    """Sum of precision@i over relevant ranks i <= k, divided by the total
    number of relevant judged documents."""
    total_relevant = sum(1 for g in judged.values() if g >= rel_threshold)
    if total_relevant == 0:
        return 0.0
    hits = 0
    ap_sum = 0.0
    for i, doc in enumerate(ranked[:k], start=1):
        if judged.get(doc, 0) >= rel_threshold:
            hits += 1
            ap_sum += hits / i
    return ap_sum / total_relevant


def recall_at_k(
    ranked: Sequence[str], judged: Mapping[str, int], k: int,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
) -> float:
    total_relevant = sum(1 for g in judged.values() if g >= rel_threshold)
    if total_relevant == 0:
        return 0.0
    hits = sum(1 for doc in ranked[:k] if judged.get(doc, 0) >= rel_threshold)
    return hits / total_relevant


def topic_metrics(
    ranked: Sequence[str], judged: Mapping[str, int],
    cutoffs: Sequence[int] = DEFAULT_CUTOFFS,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
) -> dict[str, dict[int, float]]:
    return {
        "ndcg": {k: ndcg_at_k(ranked, judged, k) for k in cutoffs},
        "p": {k: precision_at_k(ranked, judged, k, rel_threshold) for k in cutoffs},
        "map": {k: average_precision_at_k(ranked, judged, k, rel_threshold) for k in cutoffs},
        "recall": {k: recall_at_k(ranked, judged, k, rel_threshold) for k in cutoffs},
    }


@dataclass
class MetricReport:
    per_topic: dict[str, dict[str, dict[int, float]]]
    means: dict[str, dict[int, float]]
    cutoffs: tuple[int, ...]
    rel_threshold: int = DEFAULT_REL_THRESHOLD
    run_tag: str = ""
    skipped_topics: tuple[str, ...] = ()


def evaluate_run(
    run: RankedRun,
    qrels: QrelSet,
    cutoffs: Sequence[int] = DEFAULT_CUTOFFS,
    rel_threshold: int = DEFAULT_REL_THRESHOLD,
) -> MetricReport:
    """Score a run against qrels at every cutoff.

    Every qrels topic is evaluated: topics the run never retrieved score 0
    across the board. Run topics without judgments are skipped (and logged),
    and means are arithmetic means over the evaluated topics.
    """
    qrel_topics = qrels.topics()
    run_topics = set(run.topic_ids())
    if not run_topics & set(qrel_topics):
        raise NoOverlap("run and qrels share no topic ids")

    skipped = tuple(sorted(run_topics - set(qrel_topics)))
    for topic_id in skipped:
        logger.warning("run topic %s has no judgments; skipping", topic_id)

    by_topic = run.by_topic()
    per_topic: dict[str, dict[str, dict[int, float]]] = {}
    for topic_id in qrel_topics:
        ranked = [entry.nct_id for entry in by_topic.get(topic_id, [])]
        per_topic[topic_id] = topic_metrics(ranked, qrels.judged_for(topic_id), cutoffs, rel_threshold)

    means = {
        metric: {
            k: sum(per_topic[t][metric][k] for t in qrel_topics) / len(qrel_topics)
            for k in cutoffs
        }
        for metric in METRICS
    }
    run_tag = run.entries[0].run_tag if run.entries else ""
    return MetricReport(
        per_topic=per_topic,
        means=means,
        cutoffs=tuple(cutoffs),
        rel_threshold=rel_threshold,
        run_tag=run_tag,
        skipped_topics=skipped,
    )
