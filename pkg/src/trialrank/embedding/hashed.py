"""Hashed TF-IDF embedding: a deterministic, training-free backend.

Tokens land in a signed bucket chosen by a seed-keyed 64-bit hash; weights
are sublinear term frequency times smoothed inverse document frequency.
Vectors are unit length unless the text has no tokens at all.
"""

from __future__ import annotations

import hashlib
import math
from collections import Counter

import numpy as np

from .config import EmbedderConfig
from .text import tokenize
from .vectors import EmbeddingVector, make_vector
from .vocab import VocabModel


def token_hash(token: str, seed: int) -> int:
    """Stable seed-keyed 64-bit hash (process-independent, unlike ``hash``)."""
    key = seed.to_bytes(8, "little", signed=False)
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8, key=key).digest()
    return int.from_bytes(digest, "little")


def embed_hashed_tfidf(text: str, vocab: VocabModel, cfg: EmbedderConfig, source_id: str = "") -> EmbeddingVector:
    values = np.zeros(cfg.dim, dtype=np.float64)
    counts = Counter(tokenize(text))
    for token, tf in counts.items():
        h = token_hash(token, cfg.seed)
        bucket = h % cfg.dim
        sign = 1.0 if (h >> 63) & 1 else -1.0
        idf = math.log((1 + vocab.total_docs) / (1 + vocab.doc_frequency(token)))
        values[bucket] += sign * (1.0 + math.log(tf)) * idf
    norm = np.linalg.norm(values)
    if norm > 0.0:
        values /= norm
    return make_vector(values, source_id)
