"""Plateau accuracy as a clean/ambiguous mixture, and its inversion.

    plateau = p_clean * clean_acc + (1 - p_clean) * chance

Note: with p_clean = 0.83, clean_acc = 1 and chance = 0.4 this gives 0.898,
not 0.83. An "83% ceiling from 83% clean data" reading only holds when
ambiguous samples score zero; the functions here evaluate the formula as is.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class CeilingModel:
    p_clean: float
    chance: float
    clean_acc: float = 1.0

    def __post_init__(self):
        for name in ("p_clean", "chance", "clean_acc"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [0, 1]")

    @property
    def p_ambig(self) -> float:
        return 1.0 - self.p_clean


def predicted_plateau(model: CeilingModel) -> float:
    return model.p_clean * model.clean_acc + model.p_ambig * model.chance


def fit_clean_fraction(observed_plateau: float, clean_acc: float = 1.0, chance: float = 0.5) -> float:
    """Clean fraction that explains ``observed_plateau`` under the mixture model."""
    if clean_acc == chance:
        raise ValueError("degenerate model: clean_acc equals chance")
    if clean_acc < chance:
        raise ValueError("clean_acc must exceed chance")
    if not chance <= observed_plateau <= clean_acc:
        raise ValueError(
            f"plateau {observed_plateau} out of range [{chance}, {clean_acc}]"
        )
    return (observed_plateau - chance) / (clean_acc - chance)
