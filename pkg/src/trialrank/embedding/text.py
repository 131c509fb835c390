"""Tokenization and document-text assembly."""

from __future__ import annotations

import re

from ..corpus import ClinicalTrialDoc

# Maximal runs of unicode alphanumerics (underscore excluded).
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase tokens split on non-alphanumeric runs.

    Length-1 tokens survive only when they are a letter or a digit, which
    drops stray marks like ordinal signs.
    """
    tokens = _TOKEN_RE.findall(text.lower())
    return [t for t in tokens if len(t) > 1 or t.isalpha() or t.isdigit()]


def document_text(doc: ClinicalTrialDoc, doc_fields: str) -> str:
    """Assemble the trial text selected by ``doc_fields``.

    The exclusion passage is intentionally never part of any selection; it is
    parsed and carried on the document but not embedded.
    """
    parts = [doc.brief_summary]
    if doc_fields in ("summary_description", "summary_description_inclusion"):
        parts.append(doc.detailed_description)
    if doc_fields == "summary_description_inclusion":
        parts.append(doc.inclusion)
    return " ".join(p for p in parts if p)
