"""Embedder configuration shared by every backend."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field

from ..errors import ConfigError

BACKENDS = ("hashed_tfidf", "pv_dbow", "pv_dm", "remote")
DOC_FIELDS = ("summary", "summary_description", "summary_description_inclusion")

MIN_DIM = 8


@dataclass(frozen=True)
class PvConfig:
    """Paragraph-vector hyperparameters. The window only applies to the DM
    flavor; exclusion text never enters training (see EmbedderConfig)."""

    epochs: int = 40
    window: int = 5
    negative_samples: int = 5
    learning_rate_initial: float = 0.025
    learning_rate_final: float = 0.0001
    min_token_count: int = 2

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("pv.epochs must be >= 1")
        if self.window < 1:
            raise ConfigError("pv.window must be >= 1")
        if self.negative_samples < 1:
            raise ConfigError("pv.negative_samples must be >= 1")
        if self.learning_rate_final > self.learning_rate_initial:
            raise ConfigError("pv.learning_rate_final must not exceed learning_rate_initial")
        if self.min_token_count < 1:
            raise ConfigError("pv.min_token_count must be >= 1")


@dataclass(frozen=True)
class EmbedderConfig:
    """Backend selection plus everything needed for reproducible runs.

    ``doc_fields`` picks which trial text is embedded; the default combines
    summary, description, and the inclusion passage. ``remote_url`` is
    required only for the remote backend.
    """

    backend: str = "hashed_tfidf"
    dim: int = 1024
    seed: int = 42
    doc_fields: str = "summary_description_inclusion"
    pv: PvConfig = field(default_factory=PvConfig)
    remote_url: str | None = None

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ConfigError(f"unknown backend {self.backend!r}; expected one of {BACKENDS}")
        if self.dim < MIN_DIM:
            raise ConfigError(f"dim must be >= {MIN_DIM}, got {self.dim}")
        if self.doc_fields not in DOC_FIELDS:
            raise ConfigError(f"unknown doc_fields {self.doc_fields!r}; expected one of {DOC_FIELDS}")
        if self.seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        if self.backend == "remote" and not self.remote_url:
            raise ConfigError("remote backend requires remote_url")

    def config_hash(self) -> str:
        """Stable digest of the fields that shape trained-model compatibility."""
        payload = asdict(self)
        payload.pop("remote_url")  # transport detail, not model identity
        blob = json.dumps(payload, sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()
