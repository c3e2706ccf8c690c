from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from typing import Optional


@dataclass(frozen=True)
class LabConfig:
    """Parameters of one synthetic discrete-commitment experiment."""

    n_train: int = 2000
    n_test: int = 2000
    n_features: int = 20
    ambiguity_fraction: float = 0.2
    # best achievable accuracy on ambiguous samples (0.5 = labels carry no signal)
    ambiguous_signal: float = 0.5
    cluster_separation: float = 3.0
    hidden_width: int = 32
    tau: float = 0.8
    weight_magnitude: float = 1.0
    base_lr: float = 0.15
    batch_size: int = 32
    epochs: int = 30
    seed: int = 0
    threshold: float = 0.7
    logit_init_std: float = 0.1
    # optional structural commitment: also commit when the zero-state fraction is below this cap
    zero_cap: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.ambiguity_fraction <= 1.0:
            raise ValueError("ambiguity_fraction must lie in [0, 1]")
        if not 0.5 <= self.ambiguous_signal <= 1.0:
            raise ValueError("ambiguous_signal must lie in [0.5, 1] for binary labels")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        if self.weight_magnitude <= 0:
            raise ValueError("weight_magnitude must be positive")
        if self.base_lr < 0:
            raise ValueError("base_lr must be non-negative")
        if self.batch_size < 1 or self.epochs < 0:
            raise ValueError("batch_size must be >= 1 and epochs >= 0")
        if min(self.n_train, self.n_test, self.n_features, self.hidden_width) < 1:
            raise ValueError("sizes must be positive")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie in (0, 1)")

    @classmethod
    def from_dict(cls, data: dict) -> "LabConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown lab config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "LabConfig":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)


def load_lab_config(path) -> LabConfig:
    with open(path, encoding="utf-8") as fh:
        return LabConfig.from_json(fh.read())
