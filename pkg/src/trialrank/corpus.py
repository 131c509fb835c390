"""Parsing of ClinicalTrials.gov-style trial XML into normalized documents.

Only a small tag subset is extracted (id, summary, description, eligibility);
missing optional tags become empty strings so downstream code never branches
on presence. Eligibility free text is segmented into inclusion and exclusion
passages by header detection.
"""

from __future__ import annotations

import html
import json
import logging
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable
from xml.etree import ElementTree as ET

from .errors import MalformedXml, MissingId

logger = logging.getLogger(__name__)

_WS_RUN = re.compile(r"\s+")

# Deletes C0/C1 control characters except the whitespace ones (those are
# handled by whitespace collapsing instead).
_CTRL_TABLE = {c: None for c in range(0x20) if chr(c) not in "\t\n\v\f\r"}
_CTRL_TABLE[0x7F] = None
_CTRL_TABLE.update({c: None for c in range(0x80, 0xA0)})

# Header patterns: prefer matches anchored to a line start; fall back to an
# unanchored search so single-line criteria blocks still split.
_INCLUSION_LINE = re.compile(r"(?im)^[^\S\n]*inclusion\s+criteria\s*:?")
_INCLUSION_ANY = re.compile(r"(?i)inclusion\s+criteria\s*:?")
_EXCLUSION_LINE = re.compile(r"(?im)^[^\S\n]*exclusion\s+criteria\s*:?")
_EXCLUSION_ANY = re.compile(r"(?i)exclusion\s+criteria\s*:?")


@dataclass(frozen=True)
class ClinicalTrialDoc:
    """One parsed trial. ``inclusion``/``exclusion`` are cleaned passages cut
    out of ``raw_eligibility``; either may be empty."""

    nct_id: str
    brief_summary: str
    detailed_description: str
    inclusion: str
    exclusion: str
    raw_eligibility: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)


@dataclass
class CorpusStats:
    doc_count: int = 0
    empty_description_count: int = 0
    missing_eligibility_count: int = 0
    parse_failure_count: int = 0

    def summary_line(self) -> str:
        return (
            f"docs={self.doc_count} empty_description={self.empty_description_count} "
            f"missing_eligibility={self.missing_eligibility_count} "
            f"parse_failures={self.parse_failure_count}"
        )


def clean_text(raw: str) -> str:
    """Normalize free text: drop control characters, decode XML/HTML entities,
    collapse whitespace runs to single spaces, strip the ends.

    Applied repeatedly until stable, so the function is idempotent even when
    entity decoding exposes new entities or control characters.
    """
    text = raw
    while True:
        cleaned = _clean_pass(text)
        if cleaned == text:
            return cleaned
        text = cleaned


def _clean_pass(text: str) -> str:
    text = text.translate(_CTRL_TABLE)
    text = html.unescape(text)
    return _WS_RUN.sub(" ", text).strip()


def segment_eligibility(raw: str) -> tuple[str, str]:
    """Split eligibility text into (inclusion, exclusion) passages.

    The split point is the first exclusion header ("exclusion criteria" with
    optional colon, any case); everything after it is the exclusion passage.
    An inclusion header before the split is removed but all surrounding text
    is kept, so no non-header text is ever lost. Both passages come back
    :func:`clean_text`-normalized; absent headers yield empty passages.
    """
    m_exc = _find_header(_EXCLUSION_LINE, _EXCLUSION_ANY, raw)
    if m_exc:
        before, after = raw[: m_exc.start()], raw[m_exc.end() :]
    else:
        before, after = raw, ""
    m_inc = _find_header(_INCLUSION_LINE, _INCLUSION_ANY, before)
    if m_inc:
        before = before[: m_inc.start()] + " " + before[m_inc.end() :]
    return clean_text(before), clean_text(after)


def _find_header(line_pattern: re.Pattern, any_pattern: re.Pattern, text: str):
    return line_pattern.search(text) or any_pattern.search(text)


def parse_trial_xml(xml_text: str) -> ClinicalTrialDoc:
    """Parse a single trial XML document.

    Extracts the trial id plus the brief summary, detailed description, and
    eligibility blocks; text may sit directly in the tag or inside
    ``<textblock>`` children (both occur in corpus dumps).

    Raises :class:`MalformedXml` on unparseable input and :class:`MissingId`
    when no trial identifier is present; callers should skip such files and
    count them as parse failures.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    nct_id = _first_text(root, (".//id_info/nct_id", ".//nct_id"))
    if not nct_id:
        raise MissingId("no <id_info> trial identifier found")

    raw_eligibility = _element_text(root.find(".//eligibility"))
    inclusion, exclusion = segment_eligibility(raw_eligibility)
    return ClinicalTrialDoc(
        nct_id=nct_id,
        brief_summary=clean_text(_element_text(root.find(".//brief_summary"))),
        detailed_description=clean_text(_element_text(root.find(".//detailed_description"))),
        inclusion=inclusion,
        exclusion=exclusion,
        raw_eligibility=raw_eligibility,
    )


def _first_text(root: ET.Element, xpaths: tuple[str, ...]) -> str:
    for xpath in xpaths:
        el = root.find(xpath)
        if el is not None and el.text and el.text.strip():
            return el.text.strip()
    return ""


def _element_text(el: ET.Element | None) -> str:
    """All text content of an element, joined across nested tags."""
    if el is None:
        return ""
    return "\n".join(el.itertext())


def load_corpus(
    root_path: str | Path, workers: int = 1
) -> tuple[list[ClinicalTrialDoc], CorpusStats]:
    """Load every ``*.xml`` under ``root_path`` (recursively).

    Files are read as UTF-8 with lossy replacement of invalid bytes. Files
    that fail to parse are counted and skipped, never fatal; duplicate ids
    keep the first occurrence in path-sorted order with a warning. The
    returned list is sorted by nct_id, so output depends only on file
    contents, not enumeration order.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise FileNotFoundError(f"corpus directory not found: {root}")
    paths = sorted(root.rglob("*.xml"))

    stats = CorpusStats()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parsed = list(pool.map(_parse_path, paths))
    else:
        parsed = [_parse_path(p) for p in paths]

    by_id: dict[str, ClinicalTrialDoc] = {}
    for path, doc in zip(paths, parsed):
        if doc is None:
            stats.parse_failure_count += 1
            continue
        if doc.nct_id in by_id:
            logger.warning("duplicate nct_id %s in %s; keeping first occurrence", doc.nct_id, path)
            continue
        by_id[doc.nct_id] = doc

    docs = sorted(by_id.values(), key=lambda d: d.nct_id)
    stats.doc_count = len(docs)
    stats.empty_description_count = sum(1 for d in docs if not d.detailed_description)
    stats.missing_eligibility_count = sum(1 for d in docs if not d.raw_eligibility.strip())
    return docs, stats


def _parse_path(path: Path) -> ClinicalTrialDoc | None:
    try:
        text = path.read_bytes().decode("utf-8", errors="replace")
        return parse_trial_xml(text)
    except (MalformedXml, MissingId, OSError) as exc:
        logger.warning("skipping %s: %s", path, exc)
        return None


def docs_to_jsonl(docs: Iterable[ClinicalTrialDoc]) -> str:
    """One JSON object per line, fields in declaration order."""
    return "".join(doc.to_json() + "\n" for doc in docs)


def dump_jsonl(docs: Iterable[ClinicalTrialDoc], path: str | Path) -> None:
    Path(path).write_text(docs_to_jsonl(docs), encoding="utf-8", newline="\n")
