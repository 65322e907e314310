from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields


@dataclass(frozen=True)
class EngineConfig:
    """Every tunable of a run. Field names double as the config-file keys."""

    relevance_threshold: float = 0.25
    propagation_threshold: float = 0.2
    max_hops: int = 2
    top_k_share: int = 5
    capacity: int = 200
    batch_size: int = 10
    aging_half_life: int = 20
    hypothesis_top_k: int = 10
    topics_per_query: int = 4
    alpha: float = 1.0
    alpha_overrides: dict = field(default_factory=dict)
    active_threshold: float = 0.0
    activity_beta: float = 0.2
    synthesis_decay: float = 0.9
    item_retries: int = 1
    workers: int = 1

    def __post_init__(self) -> None:
        problems = []
        if not 0.0 <= self.relevance_threshold <= 1.0:
            problems.append("relevance_threshold must be in [0, 1]")
        # > 1 is allowed and switches propagation off entirely
        if self.propagation_threshold < 0.0:
            problems.append("propagation_threshold must be >= 0")
        if not 0.0 <= self.active_threshold <= 1.0:
            problems.append("active_threshold must be in [0, 1]")
        for name in ("max_hops", "top_k_share", "capacity", "batch_size", "aging_half_life",
                     "hypothesis_top_k", "topics_per_query", "workers"):
            if getattr(self, name) < 1:
                problems.append(f"{name} must be >= 1")
        if self.alpha <= 0:
            problems.append("alpha must be > 0")
        if not 0.0 < self.activity_beta <= 1.0:
            problems.append("activity_beta must be in (0, 1]")
        if not 0.0 <= self.synthesis_decay <= 1.0:
            problems.append("synthesis_decay must be in [0, 1]")
        if self.item_retries < 0:
            problems.append("item_retries must be >= 0")
        if problems:
            raise ValueError("; ".join(problems))

    def replace(self, **changes) -> "EngineConfig":
        return EngineConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "EngineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(blob).hexdigest()[:16]
