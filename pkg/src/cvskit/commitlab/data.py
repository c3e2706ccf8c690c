"""Synthetic binary data with a controlled fraction of structurally ambiguous samples.

Clean samples come from two Gaussian clusters at +/- ``cluster_separation`` along a
random unit direction, labelled by cluster. Ambiguous samples come from one
standard Gaussian centred between them; each gets the label of the side of the
boundary it falls on with probability ``ambiguous_signal``, the other label
otherwise, so the best any classifier can do on them is ``ambiguous_signal``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import LabConfig


@dataclass(frozen=True)
class SyntheticDataset:
    x: np.ndarray  # (n, n_features)
    y: np.ndarray  # (n,) in {0, 1}
    ambiguous: np.ndarray  # (n,) bool

    def __len__(self):
        return len(self.y)


def bayes_accuracy(config: LabConfig) -> float:
    """Mixture ceiling for this data; ignores the (tiny) clean-cluster overlap."""
    rho = config.ambiguity_fraction
    return (1.0 - rho) + rho * config.ambiguous_signal


def _sample(rng: np.random.Generator, n: int, direction: np.ndarray, config: LabConfig) -> SyntheticDataset:
    d = len(direction)
    n_amb = int(round(config.ambiguity_fraction * n))
    ambiguous = np.zeros(n, dtype=bool)
    ambiguous[:n_amb] = True

    y = rng.integers(0, 2, size=n)
    x = rng.normal(size=(n, d))
    sign = 2 * y[~ambiguous] - 1
    x[~ambiguous] += config.cluster_separation * np.outer(sign, direction)

    natural = (x[ambiguous] @ direction > 0).astype(int)
    keep = rng.random(n_amb) < config.ambiguous_signal
    y[ambiguous] = np.where(keep, natural, 1 - natural)

    order = rng.permutation(n)
    return SyntheticDataset(x[order], y[order], ambiguous[order])


def make_dataset(config: LabConfig) -> tuple[SyntheticDataset, SyntheticDataset]:
    """Train and test splits, deterministic under ``config.seed``."""
    rng = np.random.default_rng([config.seed, 0])
    direction = rng.normal(size=config.n_features)
    direction /= np.linalg.norm(direction)
    train = _sample(rng, config.n_train, direction, config)
    test = _sample(rng, config.n_test, direction, config)
    return train, test
