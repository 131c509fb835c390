"""Corpus vocabulary with document and corpus frequencies."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from ..errors import EmptyCorpus
from .config import EmbedderConfig
from .text import tokenize


@dataclass(frozen=True)
class TokenStats:
    index: int
    doc_frequency: int
    corpus_frequency: int


@dataclass(frozen=True)
class VocabModel:
    tokens: dict[str, TokenStats]
    total_docs: int

    def __contains__(self, token: str) -> bool:
        return token in self.tokens

    def __len__(self) -> int:
        return len(self.tokens)

    def index(self, token: str) -> int:
        return self.tokens[token].index

    def doc_frequency(self, token: str) -> int:
        stats = self.tokens.get(token)
        return stats.doc_frequency if stats else 0

    def index_to_token(self) -> list[str]:
        ordered = [""] * len(self.tokens)
        for token, stats in self.tokens.items():
            ordered[stats.index] = token
        return ordered


def build_vocab(corpus_texts: Sequence[str], cfg: EmbedderConfig) -> VocabModel:
    """Count token frequencies over the corpus and assign indices.

    Indices follow lexicographic token order, so the vocabulary is identical
    under any corpus permutation. Paragraph-vector backends drop tokens whose
    corpus frequency falls below ``cfg.pv.min_token_count``; the hashed
    backend keeps everything (it needs document frequencies for idf).
    """
    if not corpus_texts:
        raise EmptyCorpus("cannot build a vocabulary from an empty corpus")

    doc_freq: Counter[str] = Counter()
    corpus_freq: Counter[str] = Counter()
    for text in corpus_texts:
        tokens = tokenize(text)
        corpus_freq.update(tokens)
        doc_freq.update(set(tokens))

    min_count = cfg.pv.min_token_count if cfg.backend in ("pv_dbow", "pv_dm") else 1
    kept = sorted(t for t, c in corpus_freq.items() if c >= min_count)
    tokens = {
        token: TokenStats(index=i, doc_frequency=doc_freq[token], corpus_frequency=corpus_freq[token])
        for i, token in enumerate(kept)
    }
    return VocabModel(tokens=tokens, total_docs=len(corpus_texts))
