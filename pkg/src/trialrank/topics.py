"""Questionnaire-template topics: parsing and query-text flattening.

Canonical topic XML::

    <topics>
      <topic number="1" template="glaucoma">
        <field name="age">64</field>
        <field name="diagnosis">open-angle glaucoma</field>
      </topic>
    </topics>

Alternate readers for other topic formats can be plugged in through the
``parser`` argument of :func:`load_topics`; everything downstream only sees
:class:`Topic` objects.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence
from xml.etree import ElementTree as ET

from .corpus import clean_text
from .errors import DuplicateTopicId, MalformedXml

MAX_FIELDS = 32


@dataclass(frozen=True)
class Topic:
    """One questionnaire instance: the query side of retrieval.

    ``fields`` keeps document order; ``query_text`` is the deterministic
    flattening used for embedding. Fields marked "not applicable" upstream
    are expected to arrive as empty strings and are kept as such.
    """

    topic_id: str
    disorder: str
    fields: tuple[tuple[str, str], ...]
    query_text: str

    def __post_init__(self):
        if not 1 <= len(self.fields) <= MAX_FIELDS:
            raise ValueError(
                f"topic {self.topic_id!r} has {len(self.fields)} fields; expected 1..{MAX_FIELDS}"
            )


def make_topic(topic_id: str, disorder: str, fields: Sequence[tuple[str, str]]) -> Topic:
    field_tuple = tuple((str(n), str(v)) for n, v in fields)
    return Topic(
        topic_id=topic_id,
        disorder=disorder,
        fields=field_tuple,
        query_text=flatten_fields(field_tuple),
    )


def flatten_fields(fields: Sequence[tuple[str, str]]) -> str:
    """Flatten ordered (name, value) pairs into query text.

    Each field renders as ``name: value.`` (empty values render as
    ``name: .``), joined by single spaces and whitespace-normalized. The
    result is order-sensitive on purpose: field order carries template
    structure.
    """
    return clean_text(" ".join(f"{name}: {value}." for name, value in fields))


def flatten_topic(topic: Topic) -> str:
    return flatten_fields(topic.fields)


def parse_topics(xml_text: str) -> list[Topic]:
    """Parse canonical topic XML into topics, preserving document order.

    Raises :class:`MalformedXml` for unparseable input or schema violations
    and :class:`DuplicateTopicId` when two topics share a number.
    """
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    topics: list[Topic] = []
    seen: set[str] = set()
    for topic_el in root.iter("topic"):
        topic_id = (topic_el.get("number") or "").strip()
        if not topic_id:
            raise MalformedXml("<topic> without a number attribute")
        if topic_id in seen:
            raise DuplicateTopicId(f"topic id {topic_id!r} appears more than once")
        seen.add(topic_id)
        fields = [
            ((f.get("name") or "").strip(), (f.text or "").strip())
            for f in topic_el.findall("field")
        ]
        if not fields:
            raise MalformedXml(f"topic {topic_id!r} has no <field> children")
        topics.append(make_topic(topic_id, (topic_el.get("template") or "").strip(), fields))
    return topics


def load_topics(
    path: str | Path, parser: Callable[[str], list[Topic]] = parse_topics
) -> list[Topic]:
    """Read a topic file; ``parser`` is the seam for alternate formats."""
    return parser(Path(path).read_text(encoding="utf-8"))


def topics_to_json(topics: Sequence[Topic]) -> str:
    """Debug mirror of a topic set; stable bytes for identical topics."""
    payload = [
        {
            "topic_id": t.topic_id,
            "disorder": t.disorder,
            "fields": [[name, value] for name, value in t.fields],
            "query_text": t.query_text,
        }
        for t in topics
    ]
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def topics_from_json(text: str) -> list[Topic]:
    topics = []
    for obj in json.loads(text):
        topic = Topic(
            topic_id=obj["topic_id"],
            disorder=obj["disorder"],
            fields=tuple((n, v) for n, v in obj["fields"]),
            query_text=obj["query_text"],
        )
        topics.append(topic)
    return topics
