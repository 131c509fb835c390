"""Pipeline configuration: YAML round-trip, overrides, and run presets.

Precedence is defaults < config file < explicit overrides (CLI flags).
``from_yaml(to_yaml(cfg)) == cfg`` holds for every valid config.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping

import yaml

from .embedding.config import EmbedderConfig, PvConfig
from .errors import ConfigError
from .metrics import DEFAULT_CUTOFFS, DEFAULT_REL_THRESHOLD
from .ranking import DEFAULT_K_CAP

DEFAULT_RUN_TAG = "v1tmurun"


@dataclass(frozen=True)
class PipelineConfig:
    """Everything the end-to-end pipeline needs, in one serializable object."""

    corpus_dir: str = "corpus"
    topics_path: str = "topics.xml"
    qrels_path: str | None = None
    output_dir: str = "out"
    run_tag: str = DEFAULT_RUN_TAG
    k_cap: int = DEFAULT_K_CAP
    cutoffs: tuple[int, ...] = DEFAULT_CUTOFFS
    rel_threshold: int = DEFAULT_REL_THRESHOLD
    embedder: EmbedderConfig = field(default_factory=EmbedderConfig)

    def __post_init__(self):
        if not self.run_tag or self.run_tag.split() != [self.run_tag]:
            raise ConfigError("run_tag must be non-empty without whitespace")
        if self.k_cap < 1:
            raise ConfigError("k_cap must be >= 1")
        cutoffs = tuple(self.cutoffs)
        object.__setattr__(self, "cutoffs", cutoffs)
        if not cutoffs:
            raise ConfigError("cutoffs must not be empty")
        if any(k < 1 for k in cutoffs):
            raise ConfigError("cutoffs must be positive")
        if list(cutoffs) != sorted(set(cutoffs)):
            raise ConfigError("cutoffs must be strictly increasing")
        if self.rel_threshold not in (1, 2):
            raise ConfigError("rel_threshold must be 1 or 2")


def to_dict(cfg: PipelineConfig) -> dict[str, Any]:
    data = asdict(cfg)
    data["cutoffs"] = list(cfg.cutoffs)
    return data


def from_dict(data: Mapping[str, Any], base: PipelineConfig | None = None) -> PipelineConfig:
    """Build a config from a (possibly partial) mapping layered over ``base``."""
    base = base or PipelineConfig()
    top = dict(data)
    emb_data = top.pop("embedder", None)
    unknown = set(top) - {f for f in PipelineConfig.__dataclass_fields__}
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if top.get("cutoffs") is not None:
        top["cutoffs"] = tuple(top["cutoffs"])
    embedder = base.embedder
    if emb_data is not None:
        embedder = _embedder_from_dict(emb_data, embedder)
    return replace(base, embedder=embedder, **top)


def _embedder_from_dict(data: Mapping[str, Any], base: EmbedderConfig) -> EmbedderConfig:
    emb = dict(data)
    pv_data = emb.pop("pv", None)
    unknown = set(emb) - {f for f in EmbedderConfig.__dataclass_fields__}
    if unknown:
        raise ConfigError(f"unknown embedder keys: {sorted(unknown)}")
    pv = base.pv
    if pv_data is not None:
        unknown_pv = set(pv_data) - {f for f in PvConfig.__dataclass_fields__}
        if unknown_pv:
            raise ConfigError(f"unknown pv keys: {sorted(unknown_pv)}")
        pv = replace(base.pv, **pv_data)
    return replace(base, pv=pv, **emb)


def to_yaml(cfg: PipelineConfig) -> str:
    return yaml.safe_dump(to_dict(cfg), sort_keys=False, default_flow_style=False)


def from_yaml(text: str, base: PipelineConfig | None = None) -> PipelineConfig:
    data = yaml.safe_load(text)
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigError("config file must contain a mapping at top level")
    return from_dict(data, base=base)


def load_config(path: str | Path, base: PipelineConfig | None = None) -> PipelineConfig:
    return from_yaml(Path(path).read_text(encoding="utf-8"), base=base)


def save_config(cfg: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(to_yaml(cfg), encoding="utf-8", newline="\n")


# Ready-made configs mirroring the four submitted run styles: 1 and 4 train
# paragraph vectors locally (DBOW / DM), 2 and 3 call a remote encoder on
# progressively richer document text. Tags follow the v<N>tmurun pattern.
PRESETS = {
    "run1": {
        "run_tag": "v1tmurun",
        "embedder": {"backend": "pv_dbow", "dim": 1024,
                     "doc_fields": "summary_description_inclusion"},
    },
    "run2": {
        "run_tag": "v2tmurun",
        "embedder": {"backend": "remote", "dim": 1024, "doc_fields": "summary",
                     "remote_url": "http://localhost:8000/embed"},
    },
    "run3": {
        "run_tag": "v3tmurun",
        "embedder": {"backend": "remote", "dim": 1024,
                     "doc_fields": "summary_description",
                     "remote_url": "http://localhost:8000/embed"},
    },
    "run4": {
        "run_tag": "v4tmurun",
        "embedder": {"backend": "pv_dm", "dim": 1024,
                     "doc_fields": "summary_description_inclusion"},
    },
}


def preset(name: str) -> PipelineConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    return from_dict(PRESETS[name])
