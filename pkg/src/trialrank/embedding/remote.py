"""HTTP client for a remote embedding service.

Wire protocol: POST ``{"texts": [...]}`` to the configured URL; the service
answers ``{"vectors": [[...], ...], "dim": N}`` with one vector per input
text, in input order. Transient failures (connection errors and 5xx) are
retried with exponential backoff; anything else fails fast.
"""

from __future__ import annotations

import logging
import math
import time
from typing import Sequence

import requests

from ..errors import DimMismatch, MalformedResponse, RemoteUnavailable
from .config import EmbedderConfig
from .vectors import EmbeddingVector, make_vector

logger = logging.getLogger(__name__)

MAX_BATCH = 64
DEFAULT_RETRIES = 3


def embed_remote(
    texts: Sequence[str],
    cfg: EmbedderConfig,
    source_ids: Sequence[str] | None = None,
    *,
    session: requests.Session | None = None,
    timeout: float = 30.0,
    retries: int = DEFAULT_RETRIES,
    backoff: float = 0.5,
) -> list[EmbeddingVector]:
    """Embed one batch (at most :data:`MAX_BATCH` texts), preserving order.

    ``retries`` counts attempts after the first; ``backoff`` is the initial
    sleep, doubled per retry. Empty batches return immediately without any
    network traffic.
    """
    if len(texts) > MAX_BATCH:
        raise ValueError(f"batch of {len(texts)} exceeds the {MAX_BATCH}-text limit")
    if source_ids is not None and len(source_ids) != len(texts):
        raise ValueError("source_ids must match texts in length")
    if not texts:
        return []

    payload = _post_with_retries(
        cfg.remote_url, {"texts": list(texts)}, session, timeout, retries, backoff
    )
    vectors = _validate_payload(payload, len(texts), cfg.dim)
    ids = source_ids if source_ids is not None else [""] * len(texts)
    return [make_vector(vec, sid) for vec, sid in zip(vectors, ids)]


def embed_remote_many(
    texts: Sequence[str],
    cfg: EmbedderConfig,
    source_ids: Sequence[str] | None = None,
    **kwargs,
) -> list[EmbeddingVector]:
    """Embed any number of texts by chunking into protocol-sized batches."""
    out: list[EmbeddingVector] = []
    for start in range(0, len(texts), MAX_BATCH):
        chunk_ids = source_ids[start : start + MAX_BATCH] if source_ids is not None else None
        out.extend(embed_remote(texts[start : start + MAX_BATCH], cfg, chunk_ids, **kwargs))
    return out


def _post_with_retries(url, body, session, timeout, retries, backoff) -> dict:
    post = session.post if session is not None else requests.post
    last_error = None
    for attempt in range(retries + 1):
        if attempt > 0:
            delay = backoff * 2 ** (attempt - 1)
            logger.debug("remote attempt %d failed (%s); retrying in %.2fs", attempt, last_error, delay)
            time.sleep(delay)
        try:
            response = post(url, json=body, timeout=timeout)
        except requests.RequestException as exc:
            last_error = exc
            continue
        if 500 <= response.status_code < 600:
            last_error = f"server returned {response.status_code}"
            continue
        if response.status_code != 200:
            raise RemoteUnavailable(f"embedding service returned status {response.status_code}")
        try:
            return response.json()
        except ValueError as exc:
            raise MalformedResponse(f"response is not JSON: {exc}") from exc
    raise RemoteUnavailable(f"embedding service unreachable after {retries + 1} attempts: {last_error}")


def _validate_payload(payload: dict, expected_count: int, expected_dim: int) -> list[list[float]]:
    if not isinstance(payload, dict) or "vectors" not in payload or "dim" not in payload:
        raise MalformedResponse("response must carry 'vectors' and 'dim'")
    dim = payload["dim"]
    vectors = payload["vectors"]
    if dim != expected_dim:
        raise DimMismatch(f"service dim {dim} != configured dim {expected_dim}")
    if not isinstance(vectors, list) or len(vectors) != expected_count:
        raise MalformedResponse(
            f"expected {expected_count} vectors, got "
            f"{len(vectors) if isinstance(vectors, list) else type(vectors).__name__}"
        )
    for vec in vectors:
        if not isinstance(vec, list) or len(vec) != dim:
            raise DimMismatch("vector length disagrees with declared dim")
        if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in vec):
            raise MalformedResponse("vector entries must be finite numbers")
    return vectors
