"""The dense-vector type every backend produces."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimMismatch


@dataclass(frozen=True, eq=False)
class EmbeddingVector:
    """A fixed-dimension vector tagged with the id of the text it encodes."""

    values: np.ndarray
    source_id: str
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))
        if self.values.ndim != 1 or self.values.shape[0] != self.dim:
            raise DimMismatch(
                f"vector for {self.source_id!r} has shape {self.values.shape}, expected ({self.dim},)"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"vector for {self.source_id!r} contains non-finite entries")


def make_vector(values: np.ndarray, source_id: str = "") -> EmbeddingVector:
    values = np.asarray(values, dtype=np.float64)
    return EmbeddingVector(values=values, source_id=source_id, dim=values.shape[0])
