"""Paragraph-vector training (PV-DBOW and PV-DM) with negative sampling.

PV-DBOW trains one vector per document to predict each of the document's
tokens, ignoring word order. PV-DM additionally learns word input vectors:
the document vector averaged with the window around a center token predicts
that token. Both use sigmoid negative-sampling loss with noise words drawn
from the unigram distribution raised to 0.75.

Single-threaded training is bit-reproducible for a fixed seed, corpus, and
config; ``workers > 1`` runs unsynchronized parallel updates over shared
matrices, which is faster on large corpora but NOT reproducible.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..errors import EmptyCorpus, ModelConfigMismatch, VocabTooSmall
from .config import EmbedderConfig
from .hashed import token_hash
from .text import tokenize
from .vectors import EmbeddingVector, make_vector
from .vocab import TokenStats, VocabModel, build_vocab

logger = logging.getLogger(__name__)

NOISE_POWER = 0.75
FORMAT_VERSION = 1

_MAX_RESAMPLE_ROUNDS = 100
_SCORE_CLIP = 500.0  # keeps exp() finite; far outside any score seen in training


def _sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -_SCORE_CLIP, _SCORE_CLIP)))


def negative_sampling_loss(context_vec: np.ndarray, output_vecs: np.ndarray) -> float:
    """Loss for one prediction step.

    ``output_vecs[0]`` is the target token's output vector, the remaining
    rows are noise tokens: ``-log s(x·w0) - sum_j log s(-x·wj)``.
    """
    scores = output_vecs @ context_vec
    probs = _sigmoid(scores)
    return float(-(np.log(probs[0]) + np.log1p(-probs[1:]).sum()))


def negative_sampling_grad(
    context_vec: np.ndarray, output_vecs: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of :func:`negative_sampling_loss`.

    Returns (d loss / d context_vec, d loss / d output_vecs), both taken at
    the pre-update values.
    """
    scores = output_vecs @ context_vec
    err = _sigmoid(scores)
    err[0] -= 1.0
    return err @ output_vecs, np.outer(err, context_vec)


def _apply_step(
    context_vec: np.ndarray,
    word_indices: np.ndarray,
    output_weights: np.ndarray,
    lr: float,
    update_outputs: bool = True,
) -> tuple[float, np.ndarray]:
    """One SGD step; returns (loss, delta to add to the context vector).

    Output rows are updated in place (duplicate indices accumulate); the
    context update is returned so callers can spread it over contributors.
    """
    outputs = output_weights[word_indices]
    scores = outputs @ context_vec
    probs = _sigmoid(scores)
    err = probs.copy()
    err[0] -= 1.0
    loss = float(-(np.log(probs[0]) + np.log1p(-probs[1:]).sum()))
    if update_outputs:
        np.add.at(output_weights, word_indices, -lr * np.outer(err, context_vec))
    return loss, -lr * (err @ outputs)


def _draw_negatives(rng: np.random.Generator, noise_cum: np.ndarray, target: int, k: int) -> np.ndarray:
    """k noise-token indices != target from the unigram^0.75 distribution."""
    total = noise_cum[-1]
    idx = np.searchsorted(noise_cum, rng.random(k) * total, side="right")
    for _ in range(_MAX_RESAMPLE_ROUNDS):
        mask = idx == target
        if not mask.any():
            break
        idx[mask] = np.searchsorted(noise_cum, rng.random(int(mask.sum())) * total, side="right")
    return idx


def _lr_for_epoch(cfg: EmbedderConfig, epoch: int) -> float:
    initial, final = cfg.pv.learning_rate_initial, cfg.pv.learning_rate_final
    if cfg.pv.epochs == 1:
        return initial
    return initial + (final - initial) * (epoch / (cfg.pv.epochs - 1))


def _noise_cumulative(vocab: VocabModel) -> np.ndarray:
    counts = np.zeros(len(vocab), dtype=np.float64)
    for stats in vocab.tokens.values():
        counts[stats.index] = stats.corpus_frequency
    return np.cumsum(counts**NOISE_POWER)


def _init_matrix(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    return (rng.random((rows, dim)) - 0.5) / dim


@dataclass
class ParagraphVectorModel:
    """A trained model: document vectors plus the frozen prediction weights
    needed to infer vectors for unseen texts."""

    cfg: EmbedderConfig
    vocab: VocabModel
    doc_ids: list[str]
    doc_vectors: np.ndarray
    word_vectors: np.ndarray | None
    output_weights: np.ndarray
    epoch_losses: list[float]

    def __post_init__(self):
        self._row_by_id = {doc_id: i for i, doc_id in enumerate(self.doc_ids)}
        self._noise_cum = _noise_cumulative(self.vocab)

    def vector_for(self, doc_id: str) -> EmbeddingVector:
        return make_vector(self.doc_vectors[self._row_by_id[doc_id]], doc_id)

    def embeddings(self) -> dict[str, EmbeddingVector]:
        return {doc_id: self.vector_for(doc_id) for doc_id in self.doc_ids}

    def infer(self, text: str, source_id: str = "") -> EmbeddingVector:
        return infer_vector(text, self, source_id=source_id)

    def save(self, path: str | Path) -> None:
        meta = {
            "format_version": FORMAT_VERSION,
            "config_hash": self.cfg.config_hash(),
            "backend": self.cfg.backend,
            "doc_ids": self.doc_ids,
            "vocab_tokens": self.vocab.index_to_token(),
            "doc_frequencies": [
                self.vocab.tokens[t].doc_frequency for t in self.vocab.index_to_token()
            ],
            "corpus_frequencies": [
                self.vocab.tokens[t].corpus_frequency for t in self.vocab.index_to_token()
            ],
            "total_docs": self.vocab.total_docs,
            "epoch_losses": self.epoch_losses,
        }
        word_vectors = self.word_vectors if self.word_vectors is not None else np.zeros((0, 0))
        with open(path, "wb") as fh:
            np.savez(
                fh,
                meta=np.array(json.dumps(meta)),
                doc_vectors=self.doc_vectors,
                word_vectors=word_vectors,
                output_weights=self.output_weights,
            )


def load_pv_model(path: str | Path, cfg: EmbedderConfig) -> ParagraphVectorModel:
    """Load a persisted model, refusing any config-hash mismatch."""
    with np.load(path, allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        if meta.get("format_version") != FORMAT_VERSION:
            raise ModelConfigMismatch(
                f"unsupported model format version {meta.get('format_version')!r}"
            )
        if meta["config_hash"] != cfg.config_hash():
            raise ModelConfigMismatch(
                "model was trained under a different embedder configuration"
            )
        tokens = {
            token: TokenStats(index=i, doc_frequency=df, corpus_frequency=cf)
            for i, (token, df, cf) in enumerate(
                zip(meta["vocab_tokens"], meta["doc_frequencies"], meta["corpus_frequencies"])
            )
        }
        vocab = VocabModel(tokens=tokens, total_docs=meta["total_docs"])
        word_vectors = data["word_vectors"]
        return ParagraphVectorModel(
            cfg=cfg,
            vocab=vocab,
            doc_ids=list(meta["doc_ids"]),
            doc_vectors=data["doc_vectors"],
            word_vectors=None if word_vectors.size == 0 else word_vectors,
            output_weights=data["output_weights"],
            epoch_losses=list(meta["epoch_losses"]),
        )


def train_paragraph_vectors(
    corpus: Sequence[tuple[str, str]],
    cfg: EmbedderConfig,
    workers: int = 1,
) -> ParagraphVectorModel:
    """Train document vectors over ``corpus`` = [(doc_id, text), ...].

    The learning rate decays linearly from the configured initial to final
    value across epochs. Mean per-step loss is recorded per epoch in
    ``epoch_losses``.
    """
    if len(corpus) < 2:
        raise EmptyCorpus(f"paragraph-vector training needs >= 2 documents, got {len(corpus)}")
    if cfg.backend not in ("pv_dbow", "pv_dm"):
        raise ValueError(f"train_paragraph_vectors got backend {cfg.backend!r}")

    vocab = build_vocab([text for _, text in corpus], cfg)
    if len(vocab) == 0:
        raise VocabTooSmall(
            f"no token reaches min_token_count={cfg.pv.min_token_count}"
        )

    doc_ids = [doc_id for doc_id, _ in corpus]
    doc_tokens = [
        np.array([vocab.index(t) for t in tokenize(text) if t in vocab], dtype=np.int64)
        for _, text in corpus
    ]

    dim = cfg.dim
    rng = np.random.default_rng(cfg.seed)
    doc_vectors = _init_matrix(rng, len(corpus), dim)
    word_vectors = _init_matrix(rng, len(vocab), dim) if cfg.backend == "pv_dm" else None
    output_weights = np.zeros((len(vocab), dim), dtype=np.float64)
    noise_cum = _noise_cumulative(vocab)

    epoch_losses: list[float] = []
    for epoch in range(cfg.pv.epochs):
        lr = _lr_for_epoch(cfg, epoch)
        if workers > 1:
            shards = np.array_split(np.arange(len(corpus)), workers)
            shard_rngs = [np.random.default_rng([cfg.seed, epoch, w]) for w in range(workers)]
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(
                    pool.map(
                        lambda args: _train_docs(
                            args[0], doc_tokens, doc_vectors, word_vectors,
                            output_weights, noise_cum, cfg, lr, args[1],
                        ),
                        zip(shards, shard_rngs),
                    )
                )
            loss_sum = sum(r[0] for r in results)
            steps = sum(r[1] for r in results)
        else:
            loss_sum, steps = _train_docs(
                np.arange(len(corpus)), doc_tokens, doc_vectors, word_vectors,
                output_weights, noise_cum, cfg, lr, rng,
            )
        epoch_losses.append(loss_sum / max(steps, 1))
        logger.debug("epoch %d lr=%.5f mean_loss=%.5f", epoch, lr, epoch_losses[-1])

    return ParagraphVectorModel(
        cfg=cfg,
        vocab=vocab,
        doc_ids=doc_ids,
        doc_vectors=doc_vectors,
        word_vectors=word_vectors,
        output_weights=output_weights,
        epoch_losses=epoch_losses,
    )


def _train_docs(
    doc_rows: np.ndarray,
    doc_tokens: list[np.ndarray],
    doc_vectors: np.ndarray,
    word_vectors: np.ndarray | None,
    output_weights: np.ndarray,
    noise_cum: np.ndarray,
    cfg: EmbedderConfig,
    lr: float,
    rng: np.random.Generator,
) -> tuple[float, int]:
    """One epoch over the given documents; returns (loss sum, step count)."""
    k = cfg.pv.negative_samples
    window = cfg.pv.window
    dbow = cfg.backend == "pv_dbow"
    loss_sum = 0.0
    steps = 0
    for row in doc_rows:
        tokens = doc_tokens[row]
        if tokens.size == 0:
            continue
        for pos in range(tokens.size):
            target = int(tokens[pos])
            word_indices = np.empty(k + 1, dtype=np.int64)
            word_indices[0] = target
            word_indices[1:] = _draw_negatives(rng, noise_cum, target, k)
            if dbow:
                loss, delta = _apply_step(doc_vectors[row], word_indices, output_weights, lr)
                doc_vectors[row] += delta
            else:
                context = np.concatenate(
                    (tokens[max(0, pos - window) : pos], tokens[pos + 1 : pos + 1 + window])
                )
                l1 = doc_vectors[row] + word_vectors[context].sum(axis=0)
                l1 /= 1 + context.size
                loss, delta = _apply_step(l1, word_indices, output_weights, lr)
                doc_vectors[row] += delta
                if context.size:
                    np.add.at(word_vectors, context, delta)
            loss_sum += loss
            steps += 1
    return loss_sum, steps


def infer_vector(text: str, model: ParagraphVectorModel, source_id: str = "") -> EmbeddingVector:
    """Embed an unseen text by gradient-training a fresh document vector
    against the model's frozen prediction weights.

    Deterministic for a fixed seed and text (the inference RNG is derived
    from both); texts with no in-vocabulary token embed to the zero vector.
    """
    cfg = model.cfg
    tokens = np.array(
        [model.vocab.index(t) for t in tokenize(text) if t in model.vocab], dtype=np.int64
    )
    if tokens.size == 0:
        return make_vector(np.zeros(cfg.dim), source_id)

    rng = np.random.default_rng([cfg.seed, token_hash(text, cfg.seed)])
    doc_vec = (rng.random(cfg.dim) - 0.5) / cfg.dim
    k = cfg.pv.negative_samples
    window = cfg.pv.window
    dbow = cfg.backend == "pv_dbow"
    for epoch in range(cfg.pv.epochs):
        lr = _lr_for_epoch(cfg, epoch)
        for pos in range(tokens.size):
            target = int(tokens[pos])
            word_indices = np.empty(k + 1, dtype=np.int64)
            word_indices[0] = target
            word_indices[1:] = _draw_negatives(rng, model._noise_cum, target, k)
            if dbow:
                _, delta = _apply_step(
                    doc_vec, word_indices, model.output_weights, lr, update_outputs=False
                )
            else:
                context = np.concatenate(
                    (tokens[max(0, pos - window) : pos], tokens[pos + 1 : pos + 1 + window])
                )
                l1 = doc_vec + model.word_vectors[context].sum(axis=0)
                l1 /= 1 + context.size
                _, delta = _apply_step(
                    l1, word_indices, model.output_weights, lr, update_outputs=False
                )
            doc_vec += delta
    return make_vector(doc_vec, source_id)


def embeddings_by_id(model: ParagraphVectorModel) -> Mapping[str, EmbeddingVector]:
    return model.embeddings()
